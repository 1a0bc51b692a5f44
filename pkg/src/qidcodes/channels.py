"""Quantum channels in Kraus form, standard constructors and hybrid memories."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError, InvalidStateError, ResourceLimitError
from .qcore import as_density, check_density, STATE_TOL

DEFAULT_MEMORY_BUDGET = 2 ** 24


@dataclass(frozen=True, eq=False)
class Channel:
    """CPTP map ``rho -> sum_k K rho K^dag`` with ``out_dim x in_dim`` Kraus operators."""

    kraus_ops: tuple
    in_dim: int
    out_dim: int
    name: str = "channel"

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise InvalidDimensionError("channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (self.out_dim, self.in_dim):
                raise InvalidDimensionError(
                    f"Kraus operator shape {k.shape} != ({self.out_dim}, {self.in_dim})")
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        completeness = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(completeness - np.eye(self.in_dim))) > STATE_TOL:
            raise InvalidStateError(f"{self.name}: Kraus operators are not trace preserving")

    def __call__(self, rho):
        return apply(self, rho)

    def adjoint(self, effect) -> np.ndarray:
        """Heisenberg-picture map ``X -> sum_k K^dag X K``."""
        effect = np.asarray(effect, dtype=complex)
        return sum(k.conj().T @ effect @ k for k in self.kraus_ops)


@dataclass(frozen=True)
class HybridAlgebra:
    """Block algebra ``B(C^d_1) (+) ... (+) B(C^d_r)``."""

    block_dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims or any(d < 1 for d in dims):
            raise InvalidDimensionError(f"block dimensions must be >= 1, got {self.block_dims!r}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def total_dim(self) -> int:
        return sum(self.block_dims)

    def block_slices(self) -> list[slice]:
        edges = np.cumsum((0,) + self.block_dims)
        return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


@dataclass(frozen=True, eq=False)
class Ensemble:
    probs: np.ndarray
    states: tuple = field(default_factory=tuple)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        states = tuple(as_density(s) for s in self.states)
        if probs.ndim != 1 or len(probs) != len(states):
            raise InvalidDimensionError("ensemble needs one probability per state")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise InvalidStateError("ensemble probabilities must be a distribution")
        if len({s.shape for s in states}) > 1:
            raise InvalidDimensionError("ensemble states have mismatched dimensions")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", states)

    def average(self) -> np.ndarray:
        return sum(p * s for p, s in zip(self.probs, self.states))


def apply(channel: Channel, state) -> np.ndarray:
    """Output ``sum_k K rho K^dag``; pure state vectors are accepted."""
    rho = as_density(state)
    if rho.shape != (channel.in_dim, channel.in_dim):
        raise InvalidDimensionError(
            f"{channel.name} expects dimension {channel.in_dim}, got {rho.shape}")
    return sum(k @ rho @ k.conj().T for k in channel.kraus_ops)


def tensor_power(channel: Channel, n: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> Channel:
    """The channel acting independently on ``n`` copies.

    ``memory_budget`` caps the total number of complex entries across the
    resulting Kraus operators.

    Raises:
        ResourceLimitError: if the Kraus set would exceed ``memory_budget``.
    """
    if n < 1:
        raise InvalidDimensionError("tensor power needs n >= 1")
    if n == 1:
        return channel
    n_ops = len(channel.kraus_ops) ** n
    entries = n_ops * (channel.out_dim * channel.in_dim) ** n
    if entries > memory_budget:
        raise ResourceLimitError(
            f"tensor power n={n} needs {entries} entries, budget is {memory_budget}")
    ops = []
    for combo in itertools.product(channel.kraus_ops, repeat=n):
        k = combo[0]
        for factor in combo[1:]:
            k = np.kron(k, factor)
        ops.append(k)
    return Channel(tuple(ops), channel.in_dim ** n, channel.out_dim ** n,
                   name=f"{channel.name}^{n}")


def identity_channel(dim: int) -> Channel:
    return Channel((np.eye(dim),), dim, dim, name=f"id{dim}")


def dephasing_channel(dim: int) -> Channel:
    """Completely dephasing channel: keeps only the computational-basis diagonal."""
    ops = []
    for i in range(dim):
        k = np.zeros((dim, dim))
        k[i, i] = 1.0
        ops.append(k)
    return Channel(tuple(ops), dim, dim, name=f"dephasing{dim}")


def depolarizing_channel(dim: int, p: float) -> Channel:
    """``rho -> (1 - p) rho + p I/dim``; ``p = 1`` is the fully depolarizing channel."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing parameter must be in [0, 1], got {p}")
    ops = []
    if p < 1.0:
        ops.append(np.sqrt(1.0 - p) * np.eye(dim))
    # p I/d = (p/d) sum_{ij} |i><j| rho |j><i|
    scale = np.sqrt(p / dim)
    if scale > 0:
        for i in range(dim):
            for j in range(dim):
                k = np.zeros((dim, dim))
                k[i, j] = scale
                ops.append(k)
    return Channel(tuple(ops), dim, dim, name=f"depolarizing{dim}({p:g})")


def cq_channel(output_states) -> Channel:
    """Measure the input in the computational basis and emit ``W_x``.

    Args:
        output_states: sequence of density operators ``W_x``, one per input
            symbol (or pure-state vectors).

    The Kraus operators are ``sqrt(w_xj) |e_xj><x|`` over the eigen-
    decomposition of each ``W_x``, so ``T(|x><x|) = W_x`` exactly.
    """
    states = []
    for x, w in enumerate(output_states):
        try:
            states.append(check_density(as_density(w)))
        except InvalidStateError as exc:
            raise InvalidStateError(f"cq row {x}: {exc}") from None
    if not states:
        raise InvalidDimensionError("cq channel needs at least one output state")
    out_dim = states[0].shape[0]
    if any(s.shape != (out_dim, out_dim) for s in states):
        raise InvalidDimensionError("cq output states have mismatched dimensions")
    in_dim = len(states)
    ops = []
    for x, w_x in enumerate(states):
        vals, vecs = np.linalg.eigh(0.5 * (w_x + w_x.conj().T))
        for lam, vec in zip(vals, vecs.T):
            if lam <= 0:
                continue
            k = np.zeros((out_dim, in_dim), dtype=complex)
            k[:, x] = np.sqrt(lam) * vec
            ops.append(k)
    return Channel(tuple(ops), in_dim, out_dim, name=f"cq{in_dim}->{out_dim}")


def classical_channel(stochastic) -> Channel:
    """cq channel with diagonal outputs built from a row-stochastic matrix."""
    stochastic = np.asarray(stochastic, dtype=float)
    if stochastic.ndim != 2 or np.any(stochastic < 0) or np.max(np.abs(stochastic.sum(axis=1) - 1)) > 1e-12:
        raise InvalidStateError("rows must be probability distributions")
    return cq_channel([np.diag(row) for row in stochastic])


def hybrid_identity_channel(algebra: HybridAlgebra) -> Channel:
    """Identity on the hybrid memory: dephasing between blocks, coherent inside."""
    dim = algebra.total_dim
    ops = []
    for sl in algebra.block_slices():
        p = np.zeros((dim, dim))
        p[sl, sl] = np.eye(sl.stop - sl.start)
        ops.append(p)
    return Channel(tuple(ops), dim, dim, name=f"hybrid{list(algebra.block_dims)}")


def kraus_with_reference(channel: Channel, ref_dim: int) -> Channel:
    """``id_ref (x) T`` acting on ``C^ref (x) C^in``."""
    eye = np.eye(ref_dim)
    return Channel(tuple(np.kron(eye, k) for k in channel.kraus_ops),
                   ref_dim * channel.in_dim, ref_dim * channel.out_dim,
                   name=f"id{ref_dim}x{channel.name}")
