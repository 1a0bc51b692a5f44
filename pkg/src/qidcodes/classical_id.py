"""Classical identification codes.

Covers the subset-system construction (uniform distributions on subsets
with bounded pairwise intersections), the blow-up of an ID code over a
classical side register, the large-deviation tail that controls it, and the
simultaneous code obtained by coarse-graining a transmission POVM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidDimensionError, PartialResultError, VacuousBoundError
from .qcore import as_density, binary_relative_entropy, check_povm, resolve_rng
from .verify import VerificationReport, acceptance_matrix, report_from_acceptance

ATTEMPTS_PER_TARGET = 50
_FLOOR_SLACK = 1e-9


def _floor(x: float) -> int:
    return int(math.floor(x + _FLOOR_SLACK))


@dataclass(frozen=True)
class ClassicalIdCode:
    ground_size: int
    sets: tuple
    set_size: int
    lambda2_target: float

    def __post_init__(self):
        sets = tuple(tuple(sorted(int(i) for i in s)) for s in self.sets)
        for s in sets:
            if len(s) != self.set_size or len(set(s)) != len(s):
                raise InvalidDimensionError(f"set {s} does not have {self.set_size} distinct elements")
            if s and (s[0] < 0 or s[-1] >= self.ground_size):
                raise InvalidDimensionError(f"set {s} has indices outside [0, {self.ground_size})")
        object.__setattr__(self, "sets", sets)

    def __len__(self):
        return len(self.sets)

    def incidence(self) -> np.ndarray:
        m = np.zeros((len(self.sets), self.ground_size), dtype=np.int64)
        for i, s in enumerate(self.sets):
            m[i, list(s)] = 1
        return m

    def distributions(self) -> np.ndarray:
        """Uniform distribution on each set, one per row."""
        return self.incidence() / self.set_size

    def intersections(self) -> np.ndarray:
        m = self.incidence()
        return m @ m.T


def ad_hypothesis(epsilon: float, lam: float, constant: float = 2.0) -> bool:
    """Whether ``lam * log2(1/epsilon - 1) > constant``.

    ``constant`` is 2 for the subset construction and 4 for fingerprinting
    (which runs the subset construction at ``lam/2``).
    """
    return lam * math.log2(1.0 / epsilon - 1.0) > constant


def ad_size_guarantee(M: int, epsilon: float) -> float:
    """Guaranteed number of sets, ``2^floor(eps M) / M``."""
    return 2.0 ** _floor(epsilon * M) / M


def ad_construct(M: int, epsilon: float, lam: float, target_n: int, rng=None,
                 attempt_budget: int | None = None) -> ClassicalIdCode:
    """Randomized greedy family of ``floor(eps M)``-subsets of ``range(M)``.

    A random subset is kept when it meets every kept set in at most
    ``lam * floor(eps M)`` elements.  Stops at ``target_n`` sets or after
    ``attempt_budget`` draws (default ``50 * target_n``).

    Raises:
        PartialResultError: when the budget runs out first; ``.result``
            holds the (valid) smaller code.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    k = _floor(epsilon * M)
    if k < 1:
        raise InvalidDimensionError(f"floor(epsilon*M) = 0 for M={M}, epsilon={epsilon}")
    if target_n < 1:
        raise ValueError("target_n must be >= 1")
    rng = resolve_rng(rng)
    budget = ATTEMPTS_PER_TARGET * target_n if attempt_budget is None else attempt_budget
    limit = _floor(lam * k)

    kept = np.zeros((target_n, M), dtype=np.int64)
    n = 0
    for _ in range(budget):
        subset = rng.choice(M, size=k, replace=False)
        if n and (kept[:n, subset].sum(axis=1) > limit).any():
            continue
        kept[n, subset] = 1
        n += 1
        if n == target_n:
            break

    sets = tuple(tuple(np.flatnonzero(row)) for row in kept[:n])
    code = ClassicalIdCode(M, sets, k, lam)
    report = verify_classical_id(code)
    assert report.lambda2 <= lam + 1e-12, "greedy construction violated its intersection limit"
    if n < target_n:
        raise PartialResultError(
            f"subset construction kept {n} of {target_n} sets after {budget} attempts", code)
    return code


def verify_classical_id(code: ClassicalIdCode) -> VerificationReport:
    """Exhaustive errors; the decoder for set ``i`` accepts exactly ``M_i``.

    First-kind error is 0, second-kind is ``max_{i != j} |M_i & M_j| / |M_i|``.
    """
    n = len(code)
    inter = code.intersections()
    off = inter[~np.eye(n, dtype=bool)]
    return VerificationReport(
        n_codewords=n,
        lambda1=0.0,
        lambda2=float(off.max() / code.set_size) if off.size else 0.0,
        lambda1_mean=0.0,
        pairs_checked=n * (n - 1),
        bounds={"lambda2_target": code.lambda2_target,
                "size_guarantee": ad_size_guarantee(code.ground_size, code.set_size / code.ground_size)},
    )


# --- blow-up over a classical register -------------------------------------


@dataclass(frozen=True, eq=False)
class BlowupCode:
    """ID code on ``A (x) C^M`` indexed by functions ``f: [M] -> [N]``.

    ``sigma_f = (1/M) sum_k rho_{f(k)} (x) |k><k|`` and
    ``D_f = sum_k D_{f(k)} (x) |k><k|`` are kept implicit; every trace is
    computed from the base acceptance table ``A[i, j] = Tr(rho_i D_j)``.
    """

    base_states: tuple
    base_effects: tuple
    classical_dim: int
    functions: np.ndarray
    lambda2_base: float
    epsilon: float
    base_table: np.ndarray

    def __len__(self):
        return len(self.functions)


def blowup_cross_error(table: np.ndarray, f, g) -> float:
    """``Tr(sigma_f D_g) = (1/M) sum_k A[f(k), g(k)]``."""
    return float(table[np.asarray(f), np.asarray(g)].mean())


def agreement_bound(lambda2: float, f, g) -> float:
    """``lambda2 + |{k : f(k) = g(k)}| / M``."""
    f, g = np.asarray(f), np.asarray(g)
    return float(lambda2 + np.mean(f == g))


def blowup(base_states, base_effects, lambda2_base: float | None, M: int, epsilon: float,
           target_n: int, rng=None, attempt_budget: int | None = None) -> BlowupCode:
    """Grow an ID code on ``A (x) C^M`` from random functions, one at a time.

    A new random ``f`` is accepted when both cross errors against every kept
    function are at most ``lambda2_base + epsilon``.  With
    ``lambda2_base=None`` the measured worst second-kind error of the base
    code is used.

    Raises:
        PartialResultError: if ``attempt_budget`` (default ``50 * target_n``)
            runs out; ``.result`` holds the smaller code.
    """
    if not base_states or len(base_states) != len(base_effects):
        raise InvalidDimensionError("base code must be non-empty with one effect per state")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if M < 1 or target_n < 1:
        raise ValueError("M and target_n must be >= 1")
    rng = resolve_rng(rng)
    states = tuple(as_density(s) for s in base_states)
    effects = tuple(np.asarray(e, dtype=complex) for e in base_effects)
    table = acceptance_matrix(states, effects)
    n_base = len(states)
    if lambda2_base is None:
        off = table[~np.eye(n_base, dtype=bool)]
        lambda2_base = float(off.max()) if off.size else 0.0
    threshold = lambda2_base + epsilon + 1e-12
    budget = ATTEMPTS_PER_TARGET * target_n if attempt_budget is None else attempt_budget

    funcs = np.zeros((target_n, M), dtype=np.int64)
    n = 0
    for _ in range(budget):
        f = rng.integers(n_base, size=M)
        if n:
            kept = funcs[:n]
            forward = table[f[None, :], kept].mean(axis=1)
            backward = table[kept, f[None, :]].mean(axis=1)
            if forward.max() > threshold or backward.max() > threshold:
                continue
        funcs[n] = f
        n += 1
        if n == target_n:
            break

    code = BlowupCode(states, effects, M, funcs[:n].copy(), float(lambda2_base), float(epsilon), table)
    if n < target_n:
        raise PartialResultError(f"blow-up kept {n} of {target_n} functions after {budget} attempts", code)
    return code


def blowup_acceptance(code: BlowupCode) -> np.ndarray:
    """Full ``Tr(sigma_f D_g)`` table over the kept functions."""
    f = code.functions
    return code.base_table[f[:, None, :], f[None, :, :]].mean(axis=2)


def verify_blowup(code: BlowupCode) -> VerificationReport:
    """Exact errors of a blow-up code.

    ``lambda1`` uses the register average ``1 - (1/M) sum_k Tr(rho_f(k) D_f(k))``;
    the worst single register value is reported as ``bounds["lambda1_worst_block"]``.
    """
    a = blowup_acceptance(code)
    diag = code.base_table[code.functions, code.functions]
    worst_block = float(max(0.0, (1.0 - diag).max())) if diag.size else 0.0
    return report_from_acceptance(a, bounds={
        "lambda2_threshold": code.lambda2_base + code.epsilon,
        "lambda1_worst_block": worst_block,
        "size_guarantee_log2": code.classical_dim * (
            code.epsilon * math.log2(max(len(code.base_states), 1)) - 1.0),
    })


def blowup_state(code: BlowupCode, index: int) -> np.ndarray:
    """Explicit ``sigma_f`` on ``A (x) C^M`` (for small checks only)."""
    m = code.classical_dim
    out = 0
    for k, i in enumerate(code.functions[index]):
        proj = np.zeros((m, m))
        proj[k, k] = 1.0
        out = out + np.kron(code.base_states[i], proj) / m
    return out


def blowup_effect(code: BlowupCode, index: int) -> np.ndarray:
    """Explicit ``D_f`` on ``A (x) C^M``."""
    m = code.classical_dim
    out = 0
    for k, i in enumerate(code.functions[index]):
        proj = np.zeros((m, m))
        proj[k, k] = 1.0
        out = out + np.kron(code.base_effects[i], proj)
    return out


# --- large deviations --------------------------------------------------------


class SanovResult(NamedTuple):
    empirical: float
    bound: float
    sigma: float
    hypothesis_ok: bool
    consistent: bool


def sanov_tail(M: int, N: int, epsilon: float) -> float:
    """``log2`` of ``Pr{(1/M) sum_k X_k > eps} <= 2^(-M D(eps || 1/N))``.

    Raises:
        VacuousBoundError: when ``epsilon <= 1/N`` (the bound is trivial).
    """
    if N < 1 or M < 1:
        raise ValueError("M and N must be >= 1")
    q = 1.0 / N
    if not epsilon > q:
        raise VacuousBoundError(f"epsilon={epsilon} must exceed 1/N={q}")
    if epsilon > 1:
        raise ValueError("epsilon must be <= 1")
    return -M * binary_relative_entropy(epsilon, q)


def sanov_monte_carlo(M: int, N: int, epsilon: float, trials: int, rng=None) -> SanovResult:
    """Empirical frequency of ``(1/M) #{k : f(k) = g(k)} > eps`` for random ``f``.

    Agreement indicators are i.i.d. Bernoulli(1/N).  ``consistent`` records
    whether the frequency stays within three binomial standard errors of
    the bound.  If ``epsilon <= 1/N`` the bound is taken as 1 and
    ``hypothesis_ok`` is False.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = resolve_rng(rng)
    hypothesis_ok = epsilon > 1.0 / N
    bound = 2.0 ** sanov_tail(M, N, epsilon) if hypothesis_ok else 1.0
    counts = rng.binomial(M, 1.0 / N, size=trials)
    empirical = float(np.mean(counts > epsilon * M))
    sigma = math.sqrt(bound * (1.0 - bound) / trials)
    return SanovResult(empirical, bound, sigma, hypothesis_ok, empirical <= bound + 3 * sigma)


# --- simultaneous codes from transmission codes ------------------------------


def simultaneous_from_transmission(povm, code: ClassicalIdCode):
    """Coarse-grain a transmission POVM along the sets of ``code``.

    Returns ``(effects, partition)`` with ``D_i = sum_{k in M_i} E_k``; the
    partition lists ``M_i`` and witnesses that all tests come from one POVM.
    """
    povm = check_povm(povm)
    if len(povm) != code.ground_size:
        raise InvalidDimensionError(
            f"POVM has {len(povm)} outcomes but the code's ground set has {code.ground_size}")
    partition = [list(s) for s in code.sets]
    effects = [sum(povm[k] for k in s) for s in partition]
    return effects, partition


def concatenated_states(codewords, code: ClassicalIdCode) -> list[np.ndarray]:
    """Uniform mixtures ``(1/|M_i|) sum_{k in M_i} pi_k`` of transmission codewords."""
    if len(codewords) != code.ground_size:
        raise InvalidDimensionError("need one transmission codeword per ground element")
    rhos = [as_density(c) for c in codewords]
    return [sum(rhos[k] for k in s) / code.set_size for s in code.sets]


def is_coarse_graining(effects, povm, partition, tol: float = 1e-12) -> bool:
    """Check ``D_i = sum_{k in partition[i]} E_k`` for every ``i``."""
    return all(np.max(np.abs(d - sum(povm[k] for k in part))) <= tol
               for d, part in zip(effects, partition))
