"""Independent reference computations used to cross-check the library.

Nothing here imports from qidcodes; each oracle takes a different route
to the same number.
"""

import itertools
import math

import numpy as np
from scipy import linalg, stats


def blahut_arimoto(W, tol=1e-13, max_iter=100000):
    """Capacity in bits of a classical channel with row-stochastic ``W``."""
    W = np.asarray(W, dtype=float)
    p = np.full(W.shape[0], 1.0 / W.shape[0])
    for _ in range(max_iter):
        q = p @ W
        with np.errstate(divide="ignore", invalid="ignore"):
            logratio = np.where(W > 0, np.log2(W / q), 0.0)
        c = np.exp2(np.sum(W * logratio, axis=1))
        lower, upper = math.log2(p @ c), math.log2(c.max())
        p = p * c / (p @ c)
        if upper - lower < tol:
            break
    return lower


def binary_kl_bits(p, q):
    """``D(p || q)`` in bits via scipy's generic relative entropy."""
    return float(stats.entropy([p, 1 - p], [q, 1 - q], base=2))


def gram_schmidt_haar(dim, rng):
    """Haar unitary by explicit Gram-Schmidt on Gaussian columns."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    cols = []
    for j in range(dim):
        v = z[:, j].copy()
        for u in cols:
            v -= np.vdot(u, v) * u
        cols.append(v / np.linalg.norm(v))
    return np.stack(cols, axis=1)


def entropy_bits(rho):
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def trace_norm_half(a, b):
    return 0.5 * float(np.sum(linalg.svdvals(np.asarray(a) - np.asarray(b))))


def max_intersection_fraction(sets):
    worst = 0.0
    for s, t in itertools.permutations([frozenset(x) for x in sets], 2):
        worst = max(worst, len(s & t) / len(s))
    return worst


def bhattacharyya_sq(p, q):
    return float(np.sum(np.sqrt(np.asarray(p) * np.asarray(q)))) ** 2
