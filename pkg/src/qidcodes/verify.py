"""Exact error-probability checks for transmission and identification codes."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import Channel, apply
from .errors import InvalidDimensionError
from .qcore import as_density, check_povm


@dataclass
class VerificationReport:
    """Measured error probabilities of a code.

    ``lambda1`` is the worst first-kind error ``max_i 1 - Tr(rho_i D_i)`` and
    ``lambda1_mean`` its average over codewords; ``lambda2`` is the worst
    second-kind error ``max_{i != j} Tr(rho_i D_j)``.
    """

    n_codewords: int
    lambda1: float
    lambda2: float
    lambda1_mean: float
    pairs_checked: int
    bounds: dict = field(default_factory=dict)
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def acceptance_matrix(states, effects, channel: Channel | None = None) -> np.ndarray:
    """``A[i, j] = Tr(T(rho_i) D_j)`` for all codeword/decoder pairs."""
    rhos = [as_density(s) for s in states]
    if channel is not None:
        rhos = [apply(channel, r) for r in rhos]
    effects = [np.asarray(e, dtype=complex) for e in effects]
    if rhos and effects and rhos[0].shape != effects[0].shape:
        raise InvalidDimensionError(f"state shape {rhos[0].shape} != effect shape {effects[0].shape}")
    r = np.stack(rhos)
    e = np.stack(effects)
    # Tr(rho E) = sum_ab rho_ab E_ba
    return np.einsum("iab,jba->ij", r, e).real


def verify_id_code(states, effects, channel: Channel | None = None, seed=None) -> VerificationReport:
    """Exhaustive first- and second-kind errors of ``{(rho_i, D_i)}``."""
    if len(states) != len(effects):
        raise InvalidDimensionError("need one decoding effect per codeword")
    a = acceptance_matrix(states, effects, channel)
    return report_from_acceptance(a, seed=seed)


def report_from_acceptance(a: np.ndarray, seed=None, bounds=None) -> VerificationReport:
    n = a.shape[0]
    miss = 1.0 - np.diag(a)
    off = a[~np.eye(n, dtype=bool)]
    return VerificationReport(
        n_codewords=n,
        lambda1=float(max(0.0, miss.max())) if n else 0.0,
        lambda2=float(off.max()) if off.size else 0.0,
        lambda1_mean=float(max(0.0, miss.mean())) if n else 0.0,
        pairs_checked=int(n * (n - 1)),
        bounds=dict(bounds or {}),
        seed=seed,
    )


def verify_transmission_code(states, povm, channel: Channel | None = None) -> float:
    """Largest decoding error ``max_i 1 - Tr(T(pi_i) D_i)`` of a transmission code.

    ``povm`` must be complete; extra effects beyond the codewords act as
    an erasure outcome.
    """
    povm = check_povm(povm)
    if len(povm) < len(states):
        raise InvalidDimensionError("transmission code needs at least one effect per codeword")
    a = acceptance_matrix(states, povm[:len(states)], channel)
    return float(max(0.0, (1.0 - np.diag(a)).max()))
