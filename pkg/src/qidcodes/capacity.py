"""Capacity formulas, converse bounds and rates of constructed codes.

All entropies and logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .channels import Channel, Ensemble, HybridAlgebra, apply, kraus_with_reference
from .errors import InvalidDimensionError, UndefinedRateError, VacuousBoundError
from .qcore import (
    ENTROPY_CLAMP,
    as_density,
    hermitian_part,
    partial_trace,
    pure_trace_distance,
    resolve_rng,
    shannon_entropy,
    trace_distance,
    von_neumann_entropy,
)

_STEPS = (0.8, 0.4, 0.2, 0.1, 0.05, 0.02, 0.01, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5)


@dataclass
class ChiResult:
    value: float
    ensemble: Ensemble
    restarts: int
    converged: bool
    input_states: np.ndarray

    def to_dict(self) -> dict:
        return {"value": self.value, "restarts": self.restarts, "converged": self.converged,
                "probs": self.ensemble.probs.tolist(),
                "input_states": {"re": self.input_states.real.tolist(),
                                 "im": self.input_states.imag.tolist()}}


def _entropy_and_log(rho):
    w, u = np.linalg.eigh(hermitian_part(rho))
    w = np.clip(w, 0.0, None)
    pos = w[w > ENTROPY_CLAMP]
    h = float(-np.sum(pos * np.log2(pos)))
    logm = (u * np.log2(np.maximum(w, ENTROPY_CLAMP))) @ u.conj().T
    return h, logm


class _ChiState:
    """Ensemble of pure inputs with cached outputs and entropies."""

    def __init__(self, channel, probs, psis):
        self.channel = channel
        self.probs = np.array(probs, dtype=float)
        self.psis = np.array(psis, dtype=complex)
        self.outs = np.array([apply(channel, p) for p in self.psis])
        self.ents = np.array([von_neumann_entropy(o) for o in self.outs])
        self.refresh()

    def refresh(self):
        self.avg = np.einsum("i,iab->ab", self.probs, self.outs)
        self.value = von_neumann_entropy(self.avg) - float(self.probs @ self.ents)

    def try_state(self, i, psi) -> float:
        out = apply(self.channel, psi)
        avg = self.avg + self.probs[i] * (out - self.outs[i])
        ent = von_neumann_entropy(out)
        value = von_neumann_entropy(avg) - float(self.probs @ self.ents) + self.probs[i] * (self.ents[i] - ent)
        return value, out, ent, avg

    def set_state(self, i, psi, out, ent, avg, value):
        self.psis[i], self.outs[i], self.ents[i] = psi, out, ent
        self.avg, self.value = avg, value

    def update_probs(self, tol, max_iter=500):
        # Exponentiated-gradient (Blahut-Arimoto) step: p_i <- p_i 2^{D(rho_i || avg)}.
        for _ in range(max_iter):
            before = self.value
            _, log_avg = _entropy_and_log(self.avg)
            div = -self.ents - np.einsum("iab,ba->i", self.outs, log_avg).real
            p = self.probs * np.exp2(div - div.max())
            self.probs = p / p.sum()
            self.refresh()
            if self.value - before < tol:
                break

    def gradient_direction(self, i):
        _, log_out = _entropy_and_log(self.outs[i])
        _, log_avg = _entropy_and_log(self.avg)
        g = self.channel.adjoint(log_out - log_avg)
        psi = self.psis[i]
        tangent = g @ psi - np.vdot(psi, g @ psi) * psi
        return g, tangent


def _optimize_restart(channel, probs, psis, tol, rng, max_sweeps):
    st = _ChiState(channel, probs, psis)
    converged = False
    scale = 0.3
    for _ in range(max_sweeps):
        start = st.value
        st.update_probs(tol / 10)
        for i in range(len(st.psis)):
            psi = st.psis[i]
            g, tangent = st.gradient_direction(i)
            candidates = []
            tangent = tangent - np.vdot(psi, tangent) * psi
            norm = np.linalg.norm(tangent)
            if norm > 1e-12 * max(1.0, np.linalg.norm(g)):
                unit = tangent / norm
                candidates += [np.cos(s) * psi + np.sin(s) * unit for s in _STEPS]
            candidates.append(np.linalg.eigh(hermitian_part(g))[1][:, -1])
            for _ in range(2):
                kick = rng.standard_normal(psi.shape) + 1j * rng.standard_normal(psi.shape)
                candidates.append(psi + scale * kick)
            best = None
            for cand in candidates:
                cand = cand / np.linalg.norm(cand)
                trial = st.try_state(i, cand)
                if trial[0] > st.value + 1e-15 and (best is None or trial[0] > best[1][0]):
                    best = (cand, trial)
            if best is not None:
                cand, (value, out, ent, avg) = best
                st.set_state(i, cand, out, ent, avg, value)
        if st.value - start < tol:
            if scale < 1e-3:
                converged = True
                break
            scale /= 4
    return st, converged


def holevo_chi(channel: Channel, ensemble_size: int | None = None, restarts: int = 16,
               tol: float = 1e-10, rng=None, warm_start=None, max_sweeps: int = 200) -> ChiResult:
    """Maximize ``H(sum_i p_i T(psi_i)) - sum_i p_i H(T(psi_i))`` over pure-state ensembles.

    Each restart alternates exponentiated-gradient updates of the
    probabilities with hill-climbing on the input states (geodesic steps
    along the entropy gradient, the gradient's top eigenvector, and random
    kicks of shrinking size).  The best restart wins; ties go to the lower
    restart index.  The value is a certified lower bound on the maximum.

    Args:
        channel: channel in Kraus form.
        ensemble_size: number of input states, default ``in_dim**2``.
        restarts: number of random starting ensembles.
        tol: a sweep improving by less than this (at the smallest kick
            size) ends a restart.
        rng: generator or seed.
        warm_start: optional ``(probs, pure_states)`` used as restart 0.
        max_sweeps: cap on sweeps per restart; hitting it clears ``converged``.
    """
    m = channel.in_dim ** 2 if ensemble_size is None else int(ensemble_size)
    if m < 2:
        raise ValueError("ensemble_size must be >= 2")
    rng = resolve_rng(rng)
    best, best_conv = None, False
    for r in range(restarts):
        if r == 0 and warm_start is not None:
            probs, psis = warm_start
            psis = np.atleast_2d(np.asarray(psis, dtype=complex))
        else:
            psis = rng.standard_normal((m, channel.in_dim)) + 1j * rng.standard_normal((m, channel.in_dim))
            psis /= np.linalg.norm(psis, axis=1, keepdims=True)
            probs = np.full(m, 1.0 / m)
        st, conv = _optimize_restart(channel, probs, psis, tol, rng, max_sweeps)
        if best is None or st.value > best.value:
            best, best_conv = st, conv
    value = max(0.0, best.value)
    ens = Ensemble(best.probs / best.probs.sum(), tuple(best.psis))
    return ChiResult(value, ens, restarts, best_conv, best.psis.copy())


def holevo_quantity(channel: Channel, probs, states) -> float:
    """``chi`` of one given ensemble (no optimization)."""
    outs = [apply(channel, s) for s in states]
    avg = sum(p * o for p, o in zip(probs, outs))
    return von_neumann_entropy(avg) - sum(p * von_neumann_entropy(o) for p, o in zip(probs, outs))


class HybridCapacity(NamedTuple):
    closed_form: float
    via_optimization: float
    argmax_p: np.ndarray


def hybrid_objective(p, dims) -> float:
    """``2 sum_i p_i log2 d_i + H(p)``."""
    p = np.asarray(p, dtype=float)
    return float(2 * p @ np.log2(np.asarray(dims, dtype=float)) + shannon_entropy(p))


def hybrid_capacity(algebra: HybridAlgebra) -> HybridCapacity:
    """Identification capacity of the hybrid memory, two ways.

    The closed form is ``log2(sum_i d_i^2)``.  The optimization value is the
    objective at ``p_i = d_i^2 / sum_j d_j^2``, where its gradient
    ``2 log2 d_i - log2 p_i`` is constant across blocks (stationarity).
    """
    dims = np.asarray(algebra.block_dims, dtype=float)
    total = float(np.sum(dims ** 2))
    closed = math.log2(total)
    p = dims ** 2 / total
    value = hybrid_objective(p, dims)
    grad = 2 * np.log2(dims) - np.log2(p)
    if np.ptp(grad) > 1e-9 or abs(value - closed) > 1e-9:
        raise ArithmeticError(f"hybrid optimum check failed: spread {np.ptp(grad)}, gap {value - closed}")
    return HybridCapacity(closed, value, p)


class DSResult(NamedTuple):
    value: float
    coherent_info: float
    holevo_term: float
    coherent_info_clamped: float


def ds_single_letter(channel: Channel, inputs) -> DSResult:
    """``2 I_c(A>BX) + I(X;B)`` for the given ensemble of bipartite pure inputs.

    ``inputs`` is a sequence of ``(p_x, phi_x)`` with ``phi_x`` a vector on
    ``C^ref (x) C^in``.  Since ``X`` is classical,
    ``I_c = sum_x p_x (H(sigma_x^B) - H(sigma_x^AB))`` and
    ``I(X;B) = H(sum_x p_x sigma_x^B) - sum_x p_x H(sigma_x^B)``.
    This is one certificate for the given ensemble, not a maximum.
    """
    probs = np.array([float(p) for p, _ in inputs])
    if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
        raise ValueError("input probabilities must form a distribution")
    ic, outs_b, ent_b = 0.0, [], []
    for p, phi in inputs:
        phi = np.asarray(phi, dtype=complex)
        if phi.ndim != 1 or phi.size % channel.in_dim:
            raise InvalidDimensionError(
                f"bipartite input of size {phi.size} does not factor as ref x {channel.in_dim}")
        ref = phi.size // channel.in_dim
        sigma_ab = apply(kraus_with_reference(channel, ref), phi)
        sigma_b = partial_trace(_swap(sigma_ab, ref, channel.out_dim), channel.out_dim, ref)
        h_b = von_neumann_entropy(sigma_b)
        ic += p * (h_b - von_neumann_entropy(sigma_ab))
        outs_b.append(sigma_b)
        ent_b.append(h_b)
    avg_b = sum(p * s for p, s in zip(probs, outs_b))
    holevo = von_neumann_entropy(avg_b) - float(probs @ np.array(ent_b))
    return DSResult(2 * ic + holevo, ic, holevo, max(0.0, ic))


def _swap(rho, d1, d2):
    """Reorder ``C^d1 (x) C^d2`` to ``C^d2 (x) C^d1``."""
    return rho.reshape(d1, d2, d1, d2).transpose(1, 0, 3, 2).reshape(d1 * d2, d1 * d2)


def converse_bound(d: int, lambda1: float, lambda2: float, pure_only: bool = False) -> float:
    """``log2`` of the largest possible ID code size on ``C^d``.

    ``2d log2(5/(1 - l1 - l2))`` for pure codewords, ``2d^2 log2(...)`` in general.

    Raises:
        VacuousBoundError: if ``lambda1 + lambda2 >= 1``.
    """
    gap = 1.0 - lambda1 - lambda2
    if gap <= 0:
        raise VacuousBoundError(f"lambda1 + lambda2 = {lambda1 + lambda2} >= 1: no bound")
    exponent = 2 * d if pure_only else 2 * d * d
    return exponent * math.log2(5.0 / gap)


class DistanceCheck(NamedTuple):
    min_pairwise: float
    required: float
    passed: bool


def pairwise_distance_check(states, lambda1: float, lambda2: float) -> DistanceCheck:
    """Check ``(1/2)||rho_i - rho_j||_1 >= 1 - l1 - l2`` for every pair.

    Pure-state vectors use the exact ``sqrt(1 - overlap)`` formula.
    """
    if lambda1 + lambda2 >= 1:
        raise VacuousBoundError("lambda1 + lambda2 must be < 1")
    required = 1.0 - lambda1 - lambda2
    states = list(states)
    pure = all(np.asarray(s).ndim == 1 for s in states)
    best = math.inf
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            if pure:
                dist = pure_trace_distance(states[i], states[j])
            else:
                dist = trace_distance(as_density(states[i]), as_density(states[j]))
            best = min(best, dist)
    return DistanceCheck(best, required, bool(best >= required - 1e-9))


RATE_KINDS = ("id-double-log", "quantum-id-log", "transmission-log")


@dataclass
class RateReport:
    n: int
    N_or_S: int
    rate: float
    kind: str

    def to_dict(self) -> dict:
        return asdict(self)


def rate_report(kind: str, n: int, size: int) -> RateReport:
    """Rate of a block-length-``n`` code of the given size.

    ``id-double-log``: ``(1/n) log2 log2 N``; ``quantum-id-log``:
    ``(1/n) log2 S``; ``transmission-log``: ``(1/n) log2 M``.
    """
    if kind not in RATE_KINDS:
        raise ValueError(f"unknown rate kind {kind!r}; choose from {RATE_KINDS}")
    if n < 1:
        raise ValueError("block length must be >= 1")
    if kind == "id-double-log":
        if size < 2:
            raise UndefinedRateError("double-log rate needs N >= 2")
        rate = math.log2(math.log2(size)) / n
    else:
        if size < 1:
            raise UndefinedRateError("rate needs size >= 1")
        rate = math.log2(size) / n
    return RateReport(n, int(size), rate, kind)
