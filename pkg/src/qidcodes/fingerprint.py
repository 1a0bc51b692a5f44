"""Quantum fingerprints and mixed-state ID codes built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical_id import ClassicalIdCode, ad_construct, ad_hypothesis
from .errors import DegenerateParametersError, InvalidStateError, PartialResultError
from .qcore import resolve_rng
from .quantum_id import (
    QuantumIdCode,
    build_quantum_id,
    encode,
    mixed_constant,
    net_pair_deviations,
)
from .verify import VerificationReport, acceptance_matrix, report_from_acceptance


def fingerprint_encode(dist) -> np.ndarray:
    """``sum_k sqrt(P(k)) |k>`` for a probability vector ``P``."""
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 1 or np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-12:
        raise InvalidStateError("fingerprint input must be a probability vector")
    return np.sqrt(dist).astype(complex)


@dataclass(frozen=True, eq=False)
class FingerprintCode:
    dim: int
    states: np.ndarray
    sets: ClassicalIdCode
    lambda_target: float
    max_overlap: float

    def __len__(self):
        return len(self.states)

    def overlaps(self) -> np.ndarray:
        return np.abs(self.states.conj() @ self.states.T) ** 2


def _fingerprints_of(sets: ClassicalIdCode, lam: float) -> FingerprintCode:
    states = np.array([fingerprint_encode(p) for p in sets.distributions()]).reshape(len(sets), sets.ground_size)
    ov = np.abs(states.conj() @ states.T) ** 2
    off = ov[~np.eye(len(states), dtype=bool)]
    worst = float(off.max()) if off.size else 0.0
    if worst > lam + 1e-12:
        raise AssertionError(f"fingerprint overlap {worst} exceeds lambda={lam}")
    return FingerprintCode(sets.ground_size, states, sets, lam, worst)


def build_fingerprint_code(d: int, epsilon: float, lam: float, target_n: int, rng=None,
                           enforce_hypothesis: bool = True,
                           attempt_budget: int | None = None) -> FingerprintCode:
    """Pure-state ID code on ``C^d`` from a subset code run at ``lam/2``.

    The second-kind error ``max |<psi_i|psi_j>|^2 = (|M_i & M_j| / |M_i|)^2``
    is computed for every pair and checked against ``lam``.

    Raises:
        DegenerateParametersError: if ``enforce_hypothesis`` and
            ``lam * log2(1/eps - 1) <= 4``.
        PartialResultError: propagated from the subset construction, with a
            fingerprint code for the sets that were found.
    """
    if enforce_hypothesis and not ad_hypothesis(epsilon, lam, 4.0):
        raise DegenerateParametersError(
            f"lambda*log2(1/epsilon - 1) = {lam * math.log2(1 / epsilon - 1):.3f} <= 4; "
            "pass enforce_hypothesis=False to build anyway")
    try:
        sets = ad_construct(d, epsilon, lam / 2, target_n, rng, attempt_budget)
    except PartialResultError as exc:
        raise PartialResultError(str(exc), _fingerprints_of(exc.result, lam)) from None
    return _fingerprints_of(sets, lam)


def verify_fingerprint(code: FingerprintCode) -> VerificationReport:
    """Decoders are ``|psi_i><psi_i|``: first-kind error 0, second-kind the max overlap."""
    ov = code.overlaps()
    return report_from_acceptance(ov, bounds={"lambda_target": code.lambda_target})


@dataclass(frozen=True, eq=False)
class MixedIdCode:
    inner: FingerprintCode
    embedding: QuantumIdCode
    states: np.ndarray
    effects: np.ndarray

    def __len__(self):
        return len(self.states)


def build_mixed_code(d: int, lam: float, S_override: int | None = None, target_n: int = 8,
                     rng=None, *, fingerprint_epsilon: float = 0.5, ancilla_dim: int | None = None,
                     net_budget: int = 200, allow_partial: bool = False) -> MixedIdCode:
    """Mixed-state ID code on ``C^d``: fingerprints on ``C^S`` pushed through a quantum-ID encoder.

    ``S = floor(K(lam) d^2)`` unless ``S_override`` is given.  The inner
    fingerprint code targets second-kind error ``lam/2``.  Its states are
    placed in the encoder's net, so each decoder accepts its own codeword
    with probability 1.  ``ancilla_dim`` defaults to ``ceil(S/d)``.

    Raises:
        DegenerateParametersError: if ``S`` comes out 0.
        PartialResultError: if the inner code misses ``target_n`` and
            ``allow_partial`` is False.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    S = int(math.floor(mixed_constant(lam) * d * d)) if S_override is None else int(S_override)
    if S < 1:
        raise DegenerateParametersError(
            f"K({lam}) * d^2 = {mixed_constant(lam) * d * d:.3g} < 1, so S = 0; set S_override")
    a = ancilla_dim if ancilla_dim is not None else max(1, math.ceil(S / d))
    rng = resolve_rng(rng)
    try:
        inner = build_fingerprint_code(S, fingerprint_epsilon, lam / 2, target_n, rng,
                                       enforce_hypothesis=False)
    except PartialResultError as exc:
        if not allow_partial:
            raise
        inner = exc.result
    embedding = build_quantum_id(S, d, a, net_budget, rng, extra_points=inner.states,
                                 coverage_samples=0)
    states = np.array([encode(embedding, psi) for psi in inner.states])
    effects = np.array([q @ q.conj().T for q in embedding.decoder_bases[:len(inner)]])
    return MixedIdCode(inner, embedding, states, effects)


def verify_mixed_code(code: MixedIdCode) -> VerificationReport:
    """Exact errors plus the inner overlap and embedding deviation they decompose into."""
    a = acceptance_matrix(code.states, code.effects)
    n = len(code)
    dev = net_pair_deviations(code.embedding)[:n, :n]
    return report_from_acceptance(a, bounds={
        "inner_max_overlap": code.inner.max_overlap,
        "embedding_max_deviation": float(dev.max()) if dev.size else 0.0,
        "S": code.embedding.S,
        "a": code.embedding.a,
    })
