"""Dense linear algebra and state primitives.

States are plain numpy arrays: a pure state is a 1-D complex vector, a
density operator or POVM effect is a square 2-D complex matrix, and an
isometry ``V: C^s -> C^t`` is a ``(t, s)`` matrix.  Bipartite spaces are
ordered ``kept (x) traced``, so index ``i * a + alpha`` addresses
``|i> (x) |alpha>``.

All randomized functions take ``rng``, which may be a
:class:`numpy.random.Generator`, an integer seed, or ``None``.
"""

from __future__ import annotations

import numpy as np

from .errors import IncompletePovmError, InvalidDimensionError, InvalidStateError

STATE_TOL = 1e-9
SUPPORT_TOL = 1e-10
ENTROPY_CLAMP = 1e-15


def resolve_rng(rng=None) -> np.random.Generator:
    """Return a Generator for ``rng`` (Generator, int seed, SeedSequence or None)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def spawn_generators(seed, count: int) -> list[np.random.Generator]:
    """Independent generator streams derived from one root seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(c) for c in children]


def _check_dim(dim, name="dim"):
    if int(dim) != dim or dim < 1:
        raise InvalidDimensionError(f"{name} must be a positive integer, got {dim!r}")
    return int(dim)


def ginibre(rows: int, cols: int, rng=None) -> np.ndarray:
    """Complex Gaussian matrix with i.i.d. entries of unit variance."""
    rng = resolve_rng(rng)
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return z / np.sqrt(2.0)


def _orthonormalize(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    # Fix the column phases so that diag(R) > 0; otherwise Q is not Haar.
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return q * phases


def haar_unitary(dim: int, rng=None) -> np.ndarray:
    """Sample a ``dim x dim`` unitary from the Haar measure.

    Uses the QR decomposition of a complex Ginibre matrix with the phase
    convention that makes the triangular factor's diagonal positive.

    Raises:
        InvalidDimensionError: if ``dim < 1``.
    """
    dim = _check_dim(dim)
    return _orthonormalize(ginibre(dim, dim, rng))


def random_isometry(source_dim: int, target_dim: int, rng=None) -> np.ndarray:
    """Haar-random isometry ``C^source_dim -> C^target_dim``.

    The result is distributed as the first ``source_dim`` columns of a Haar
    unitary on ``C^target_dim``.  Only the ``target_dim x source_dim``
    Gaussian block is drawn, since the Gram-Schmidt process on the leading
    columns does not look at the rest.
    """
    source_dim = _check_dim(source_dim, "source_dim")
    target_dim = _check_dim(target_dim, "target_dim")
    if source_dim > target_dim:
        raise InvalidDimensionError(
            f"isometry needs source_dim <= target_dim, got {source_dim} > {target_dim}")
    return _orthonormalize(ginibre(target_dim, source_dim, rng))


def haar_states(dim: int, count: int, rng=None) -> np.ndarray:
    """``count`` independent Haar-random pure states as rows of an array."""
    dim = _check_dim(dim)
    z = ginibre(count, dim, rng)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_state(dim: int, rng=None) -> np.ndarray:
    return haar_states(dim, 1, rng)[0]


def basis_state(dim: int, index: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def as_density(state) -> np.ndarray:
    """Promote a pure state vector to its projector; pass matrices through."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return ket_to_dm(state)
    return state


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def eigh_hermitian(a: np.ndarray):
    """Eigendecomposition after symmetrizing ``(A + A^dag)/2``."""
    return np.linalg.eigh(hermitian_part(np.asarray(a, dtype=complex)))


def check_square(a: np.ndarray, name="matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidDimensionError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidStateError(f"{name} has non-finite entries")
    return a


def check_density(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate and return ``rho`` as a density operator.

    Raises:
        InvalidStateError: if ``rho`` is not Hermitian, not positive, or not
            of unit trace within ``tol``.
    """
    rho = check_square(rho, "density operator")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise InvalidStateError("density operator is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise InvalidStateError(f"density operator has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(hermitian_part(rho))[0] < -tol:
        raise InvalidStateError("density operator has a negative eigenvalue")
    return rho


def check_pure(psi, tol: float = STATE_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size == 0:
        raise InvalidDimensionError(f"pure state must be a non-empty vector, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise InvalidStateError(f"pure state has norm {np.linalg.norm(psi):.12g}")
    return psi


def check_effect(e, tol: float = STATE_TOL) -> np.ndarray:
    """Validate ``0 <= E <= 1``."""
    e = check_square(e, "effect")
    if np.max(np.abs(e - e.conj().T)) > tol:
        raise InvalidStateError("effect is not Hermitian")
    w = np.linalg.eigvalsh(hermitian_part(e))
    if w[0] < -tol or w[-1] > 1.0 + tol:
        raise InvalidStateError(f"effect eigenvalues outside [0, 1]: [{w[0]:.3g}, {w[-1]:.3g}]")
    return e


def check_povm(effects, tol: float = STATE_TOL) -> list[np.ndarray]:
    """Validate a list of effects summing to the identity."""
    effects = [check_effect(e, tol) for e in effects]
    if not effects:
        raise IncompletePovmError("POVM has no effects")
    dim = effects[0].shape[0]
    if any(e.shape != (dim, dim) for e in effects):
        raise InvalidDimensionError("POVM effects have mismatched dimensions")
    if np.max(np.abs(sum(effects) - np.eye(dim))) > tol:
        raise IncompletePovmError("POVM effects do not sum to the identity")
    return effects


def check_isometry(v, tol: float = 1e-10) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[1] > v.shape[0]:
        raise InvalidDimensionError(f"isometry must be a tall matrix, got shape {v.shape}")
    if np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))) > tol:
        raise InvalidStateError("matrix is not an isometry")
    return v


def partial_trace(rho, keep_dim: int, trace_dim: int) -> np.ndarray:
    """Trace out the second factor of ``C^keep_dim (x) C^trace_dim``.

    Raises:
        InvalidDimensionError: if ``rho`` is not ``keep_dim*trace_dim`` square.
    """
    keep_dim = _check_dim(keep_dim, "keep_dim")
    trace_dim = _check_dim(trace_dim, "trace_dim")
    rho = np.asarray(rho, dtype=complex)
    n = keep_dim * trace_dim
    if rho.shape != (n, n):
        raise InvalidDimensionError(
            f"expected a {n}x{n} operator for {keep_dim}x{trace_dim} factors, got {rho.shape}")
    return np.einsum("iaja->ij", rho.reshape(keep_dim, trace_dim, keep_dim, trace_dim))


def _same_shape(a, b):
    if a.shape != b.shape:
        raise InvalidDimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``.  Vectors are promoted to projectors."""
    a, b = as_density(a), as_density(b)
    _same_shape(a, b)
    w = np.linalg.eigvalsh(hermitian_part(a - b))
    return float(min(1.0, 0.5 * np.sum(np.abs(w))))


def pure_overlap(a, b) -> float:
    """``|<a|b>|^2`` for two pure states."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _same_shape(a, b)
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def pure_trace_distance(a, b) -> float:
    """Trace distance of two pure states, ``sqrt(1 - |<a|b>|^2)``."""
    return float(np.sqrt(max(0.0, 1.0 - pure_overlap(a, b))))


def fidelity(a, b) -> float:
    """Fidelity ``(Tr|sqrt(a) sqrt(b)|)^2``; reduces to the overlap for pure inputs."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.ndim == 1 and b.ndim == 1:
        return pure_overlap(a, b)
    if a.ndim == 1:
        return float(np.real(a.conj() @ b @ a))
    if b.ndim == 1:
        return float(np.real(b.conj() @ a @ b))
    _same_shape(a, b)
    w, u = eigh_hermitian(a)
    # Drop noise-level eigenvalues: sqrt turns 1e-17 into a visible 3e-9.
    w = np.where(w > 1e-14 * max(w.max(), 0), w, 0.0)
    sqrt_a = (u * np.sqrt(w)) @ u.conj().T
    m = np.linalg.eigvalsh(hermitian_part(sqrt_a @ b @ sqrt_a))
    m = np.where(m > 1e-14 * max(m.max(), 0), m, 0.0)
    return float(np.sum(np.sqrt(m)) ** 2)


def support_projector(rho, tol: float = SUPPORT_TOL) -> np.ndarray:
    """Projector onto eigenvectors of ``rho`` with eigenvalue above ``tol * max``."""
    rho = check_square(rho, "operator")
    w, u = eigh_hermitian(rho)
    keep = w > tol * max(w[-1], 0.0)
    basis = u[:, keep]
    return basis @ basis.conj().T


def support_basis(factor, tol: float = SUPPORT_TOL) -> np.ndarray:
    """Orthonormal basis of the support of ``factor @ factor^dag``.

    Same truncation rule as :func:`support_projector` (eigenvalues, i.e.
    squared singular values, above ``tol`` times the largest), without
    forming the square matrix.
    """
    u, s, _ = np.linalg.svd(np.asarray(factor, dtype=complex), full_matrices=False)
    eig = s ** 2
    return u[:, eig > tol * eig[0]] if eig.size and eig[0] > 0 else u[:, :0]


def von_neumann_entropy(rho, clamp: float = ENTROPY_CLAMP) -> float:
    """Entropy in bits; eigenvalues below ``clamp`` contribute zero."""
    w = np.linalg.eigvalsh(hermitian_part(np.asarray(rho, dtype=complex)))
    w = w[w > clamp]
    return float(-np.sum(w * np.log2(w)))


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_relative_entropy(p: float, q: float) -> float:
    """``D(p||q)`` in bits for Bernoulli distributions, with ``0 log 0 = 0``."""
    out = 0.0
    if p > 0:
        out += p * np.log2(p / q)
    if p < 1:
        out += (1 - p) * np.log2((1 - p) / (1 - q))
    return float(out)
