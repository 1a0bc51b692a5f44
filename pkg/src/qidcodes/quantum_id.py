"""Quantum-message identification by random isometries.

A message state ``pi`` on ``C^S`` is encoded as ``Tr_a(V pi V^dag)`` on
``C^d`` for a Haar-random isometry ``V: C^S -> C^d (x) C^a``.  The test for
"is it ``tau``?" is the support projector of the encoding of the net point
closest to ``tau``.  Verification compares ``Tr(enc(pi) D_tau)`` with the
ideal fidelity-test probability ``|<pi|tau>|^2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateParametersError, InvalidDimensionError
from .nets import COVERAGE_SAMPLES, EpsilonNet, nearest, nearest_many, net_from_points, with_points
from .qcore import (
    SUPPORT_TOL,
    check_povm,
    haar_states,
    haar_unitary,
    partial_trace,
    random_isometry,
    resolve_rng,
    support_basis,
)

MAX_NET_PAIRS = 10 ** 6


@dataclass(frozen=True, eq=False)
class QuantumIdCode:
    S: int
    d: int
    a: int
    V: np.ndarray
    net: EpsilonNet
    decoder_bases: tuple
    support_tol: float = SUPPORT_TOL

    def __post_init__(self):
        if self.V.shape != (self.d * self.a, self.S):
            raise InvalidDimensionError(f"V has shape {self.V.shape}, expected ({self.d * self.a}, {self.S})")
        if self.net.dim != self.S:
            raise InvalidDimensionError("net dimension must equal the message dimension S")

    def padded_bases(self) -> np.ndarray:
        """Decoder bases stacked as ``(n_net, d, max_rank)`` with zero padding."""
        rank = max((q.shape[1] for q in self.decoder_bases), default=0)
        out = np.zeros((len(self.decoder_bases), self.d, rank), dtype=complex)
        for i, q in enumerate(self.decoder_bases):
            out[i, :, :q.shape[1]] = q
        return out


@dataclass
class DeviationReport:
    samples: int
    max_deviation: float
    mean_deviation: float
    lambda_target: float | None
    seed: int | None
    net_pairs: int = 0
    net_max_deviation: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def error_schedule(lam: float, d: int) -> dict:
    """Parameter schedule for error ``lam`` on ``C^d``.

    ``eta = lam/8`` is the net spacing, ``eps = (eta/2)^2`` the concentration
    threshold, ``a = floor(eps d / 2)`` the ancilla dimension and
    ``S = floor(K(lam) d^2)`` the message dimension with
    ``K(lam) = (lam/100)^4 / (4 log2(100/lam))``.
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    eta = lam / 8
    eps = (eta / 2) ** 2
    K = mixed_constant(lam)
    return {"eta": eta, "epsilon": eps, "a": int(math.floor(eps * d / 2)),
            "S": int(math.floor(K * d * d)), "K": K}


def mixed_constant(lam: float) -> float:
    """``K(lam) = (lam/100)^4 / (4 log2(100/lam))``."""
    return (lam / 100) ** 4 / (4 * math.log2(100 / lam))


def _decoder_basis(V, theta, d, a, tol):
    return support_basis((V @ theta).reshape(d, a), tol)


def build_quantum_id(S: int, d: int, a: int, net_budget: int = 1000, rng=None, *,
                     net: EpsilonNet | None = None, extra_points=None, isometry=None,
                     coverage_samples: int = COVERAGE_SAMPLES,
                     support_tol: float = SUPPORT_TOL) -> QuantumIdCode:
    """Random-isometry quantum-ID code ``C^S -> C^d``.

    The net (``net_budget`` Haar points on ``C^S`` unless ``net`` is given)
    is drawn from ``rng`` before ``V``, so codes with equal ``S`` and seed
    share their net.  ``extra_points`` are placed at the front of the net;
    their own decoders then accept them with probability 1.

    Raises:
        InvalidDimensionError: if ``S > d * a`` or any dimension is < 1.
    """
    for name, value in (("S", S), ("d", d), ("a", a)):
        if value < 1:
            raise InvalidDimensionError(f"{name} must be >= 1, got {value}")
    if S > d * a:
        raise InvalidDimensionError(f"message dimension S={S} exceeds d*a={d * a}")
    rng = resolve_rng(rng)
    if net is None:
        net = net_from_points(haar_states(S, net_budget, rng), rng=rng,
                              coverage_samples=coverage_samples)
    if extra_points is not None:
        net = with_points(net, extra_points)
    V = random_isometry(S, d * a, rng) if isometry is None else np.asarray(isometry, dtype=complex)
    bases = tuple(_decoder_basis(V, theta, d, a, support_tol) for theta in net.points)
    return QuantumIdCode(S, d, a, V, net, bases, support_tol)


def build_scheduled(lam: float, d: int, net_budget: int = 1000, rng=None) -> QuantumIdCode:
    """Code with every parameter taken from :func:`error_schedule`.

    Raises:
        DegenerateParametersError: when the schedule gives ``a = 0`` or ``S = 0``.
    """
    sched = error_schedule(lam, d)
    if sched["a"] == 0 or sched["S"] == 0:
        raise DegenerateParametersError(
            f"schedule for lambda={lam}, d={d} gives a={sched['a']}, S={sched['S']}; "
            "choose S and a explicitly")
    return build_quantum_id(sched["S"], d, sched["a"], net_budget, rng)


def identity_code(dim: int, net: EpsilonNet) -> QuantumIdCode:
    """``S = d``, ``a = 1`` and ``V = I``: the encoder does nothing."""
    return build_quantum_id(dim, dim, 1, net=net, isometry=np.eye(dim))


def _encode_factors(code: QuantumIdCode, states) -> np.ndarray:
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    if states.shape[1] != code.S:
        raise InvalidDimensionError(f"message states must have dimension {code.S}")
    return (states @ code.V.T).reshape(len(states), code.d, code.a)


def encode(code: QuantumIdCode, pi) -> np.ndarray:
    """``Tr_a(V pi V^dag)`` for a pure-state vector or density matrix on ``C^S``."""
    pi = np.asarray(pi, dtype=complex)
    if pi.ndim == 1:
        x = _encode_factors(code, pi)[0]
        return x @ x.conj().T
    if pi.shape != (code.S, code.S):
        raise InvalidDimensionError(f"message operator must be {code.S}x{code.S}")
    return partial_trace(code.V @ pi @ code.V.conj().T, code.d, code.a)


def decoder_index(code: QuantumIdCode, tau) -> int:
    return nearest(code.net, np.asarray(tau, dtype=complex))[0]


def decode_effect(code: QuantumIdCode, tau) -> np.ndarray:
    """Support projector of the encoding of the net point nearest ``tau``."""
    q = code.decoder_bases[decoder_index(code, tau)]
    return q @ q.conj().T


def _acceptance_block(q_stack: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """``out[m, j] = ||Q_j^dag X_m||_F^2`` for padded bases and encoder factors."""
    n, d, r = q_stack.shape
    qm = q_stack.conj().transpose(0, 2, 1).reshape(n * r, d)
    proj = qm @ factors  # (m, n*r, a)
    return (np.abs(proj) ** 2).reshape(len(factors), n, r, -1).sum(axis=(2, 3))


def pair_deviations(code: QuantumIdCode, pis, taus) -> np.ndarray:
    """``|<pi|tau>|^2 - Tr(enc(pi) D_tau)|`` for paired rows of ``pis`` and ``taus``."""
    pis = np.atleast_2d(np.asarray(pis, dtype=complex))
    taus = np.atleast_2d(np.asarray(taus, dtype=complex))
    if pis.shape != taus.shape:
        raise InvalidDimensionError("pis and taus must be paired row by row")
    ideal = np.abs(np.einsum("ij,ij->i", pis.conj(), taus)) ** 2
    idx, _ = nearest_many(code.net, taus)
    factors = _encode_factors(code, pis)
    got = np.empty(len(pis))
    for m, (x, j) in enumerate(zip(factors, idx)):
        q = code.decoder_bases[j]
        got[m] = np.sum(np.abs(q.conj().T @ x) ** 2)
    return np.abs(ideal - got)


def net_pair_deviations(code: QuantumIdCode, chunk: int = 256) -> np.ndarray:
    """Deviation matrix over all ordered pairs of net points (pi row, tau column)."""
    pts = code.net.points
    q_stack = code.padded_bases()
    out = np.empty((len(pts), len(pts)))
    gram = np.abs(pts.conj() @ pts.T) ** 2
    for start in range(0, len(pts), chunk):
        factors = _encode_factors(code, pts[start:start + chunk])
        got = _acceptance_block(q_stack, factors)
        out[start:start + chunk] = np.abs(gram[start:start + chunk] - got)
    return out


def verify_quantum_id(code: QuantumIdCode, sample_pairs: int = 1000, include_net_pairs: bool = True,
                      rng=None, lambda_target: float | None = None,
                      max_net_pairs: int = MAX_NET_PAIRS) -> DeviationReport:
    """Monte Carlo check of ``|Tr(pi tau) - Tr(enc(pi) D_tau)|``.

    Draws ``sample_pairs`` independent Haar pairs on ``C^S``.  With
    ``include_net_pairs`` every ordered pair of net points is also checked
    exhaustively, provided there are at most ``max_net_pairs`` of them.
    """
    if sample_pairs < 1:
        raise ValueError("sample_pairs must be >= 1")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = resolve_rng(rng)
    pis = haar_states(code.S, sample_pairs, rng)
    taus = haar_states(code.S, sample_pairs, rng)
    dev = pair_deviations(code, pis, taus)
    total, count, worst = float(dev.sum()), len(dev), float(dev.max())
    net_pairs, net_max = 0, None
    if include_net_pairs and len(code.net) ** 2 <= max_net_pairs:
        grid = net_pair_deviations(code)
        net_pairs = grid.size
        net_max = float(grid.max())
        total += float(grid.sum())
        count += grid.size
        worst = max(worst, net_max)
    return DeviationReport(
        samples=count, max_deviation=worst, mean_deviation=total / count,
        lambda_target=lambda_target, seed=None if seed is None else int(seed),
        net_pairs=net_pairs, net_max_deviation=net_max,
        extra={"sampled_max_deviation": float(dev.max()),
               "passes": None if lambda_target is None else worst <= lambda_target / 2},
    )


class ConcentrationResult(NamedTuple):
    empirical: float
    bound: float
    sigma: float
    consistent: bool
    vacuous: bool


def concentration_bound(r: int, epsilon: float) -> float:
    """``2^(-r (eps - ln(1+eps)) / ln 2)``, i.e. ``exp(-r (eps - ln(1+eps)))``."""
    return 2.0 ** (-r * (epsilon - math.log1p(epsilon)) / math.log(2))


def concentration_check(d: int, r: int, epsilon: float, trials: int, rng=None) -> ConcentrationResult:
    """Frequency of ``Tr(U psi U^dag P) >= (1 + eps) r/d`` over Haar ``U``.

    ``psi = |0><0|`` and ``P`` projects on the first ``r`` coordinates, so
    only the first column ``U|0>`` matters; it is drawn directly as a
    Haar-random unit vector.
    """
    if not 1 <= r <= d:
        raise InvalidDimensionError(f"need 1 <= r <= d, got r={r}, d={d}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = resolve_rng(rng)
    cols = haar_states(d, trials, rng)
    weight = np.sum(np.abs(cols[:, :r]) ** 2, axis=1)
    empirical = float(np.mean(weight >= (1 + epsilon) * r / d))
    bound = concentration_bound(r, epsilon)
    sigma = math.sqrt(bound * (1 - bound) / trials)
    return ConcentrationResult(empirical, bound, sigma, empirical <= bound + 3 * sigma,
                               bound > 1 - 1e-9)


def haar_first_column_weights(d: int, r: int, trials: int, rng=None) -> np.ndarray:
    """Same statistic as :func:`concentration_check`, from full Haar unitaries."""
    rng = resolve_rng(rng)
    return np.array([np.sum(np.abs(haar_unitary(d, rng)[:r, 0]) ** 2) for _ in range(trials)])


def fidelity_test_povm(code: QuantumIdCode, tau):
    """The binary test ``(D_tau, I - D_tau)`` on ``C^d``."""
    eff = decode_effect(code, tau)
    return [eff, np.eye(code.d) - eff]


def povm_simulation_deviation(povm, mapped, code: QuantumIdCode, states) -> float:
    """Worst total-variation gap ``sum_y |Tr(pi M_y) - Tr(enc(pi) M'_y)|`` over ``states``.

    Raises:
        IncompletePovmError: if either POVM does not sum to the identity.
    """
    povm = check_povm(povm)
    mapped = check_povm(mapped)
    if len(povm) != len(mapped):
        raise InvalidDimensionError("POVMs must have the same number of outcomes")
    if povm[0].shape[0] != code.S or mapped[0].shape[0] != code.d:
        raise InvalidDimensionError("POVM dimensions must match the code's S and d")
    worst = 0.0
    for pi in states:
        pi = np.asarray(pi, dtype=complex)
        rho_in = np.outer(pi, pi.conj()) if pi.ndim == 1 else pi
        rho_out = encode(code, pi)
        gap = sum(abs(np.trace(rho_in @ m).real - np.trace(rho_out @ mp).real)
                  for m, mp in zip(povm, mapped))
        worst = max(worst, float(gap))
    return worst


def two_vector_isometry(v, w) -> np.ndarray:
    """Isometry ``C^2 -> C^n`` with ``V|0> = v`` and ``V|1> ~ w - <v|w> v``."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    perp = w - np.vdot(v, w) * v
    return np.stack([v, perp / np.linalg.norm(perp)], axis=1)


def two_vector_acceptance(v, w, alpha: float, d: int, a: int, tol: float = SUPPORT_TOL) -> float:
    """Closed form of ``Tr(enc(phi) D_theta)`` for the two-vector isometry.

    With ``phi = sqrt(alpha)|0> + sqrt(1-alpha)|1>``, ``theta = |0>`` and
    ``t = ||w - <v|w> v||``, the acceptance equals
    ``alpha + (1 - alpha)/t^2 * (<w|D (x) I|w> - |<v|w>|^2)``.
    """
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    q = support_basis(v.reshape(d, a), tol)
    wm = w.reshape(d, a)
    w_in = float(np.sum(np.abs(q.conj().T @ wm) ** 2))
    vw = abs(np.vdot(v, w)) ** 2
    t2 = float(np.linalg.norm(w - np.vdot(v, w) * v) ** 2)
    return alpha + (1 - alpha) / t2 * (w_in - vw)
