"""Epsilon-nets over pure states with nearest-neighbour lookup.

Distances are trace distances ``sqrt(1 - |<a|b>|^2)`` between pure states.
Only qubit nets come with a proof of coverage (a geodesic triangulation of
the Bloch sphere); nets in higher dimension are Haar samples whose coverage
is measured, not guaranteed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InvalidDimensionError, UnsupportedError
from .qcore import haar_states, pure_trace_distance, resolve_rng

STRATEGIES = ("exact-qubit", "random")
COVERAGE_SAMPLES = 10_000


@dataclass(frozen=True)
class Certificate:
    kind: str  # "exact-qubit" or "empirical"
    sample_count: int | None = None
    max_observed_distance: float | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sample_count": self.sample_count,
                "max_observed_distance": self.max_observed_distance}


@dataclass(frozen=True, eq=False)
class EpsilonNet:
    dim: int
    epsilon: float
    points: np.ndarray
    certificate: Certificate

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex, ndmin=2)
        if pts.shape[1] != self.dim:
            raise InvalidDimensionError(f"net points have dimension {pts.shape[1]}, expected {self.dim}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)


def _icosahedron():
    phi = (1 + np.sqrt(5)) / 2
    verts = []
    for a in (-1, 1):
        for b in (-phi, phi):
            verts += [(0, a, b), (a, b, 0), (b, 0, a)]
    verts = np.array(verts, dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    return verts, ConvexHull(verts).simplices


def _circumradius(a, b, c) -> float:
    """Angular radius of the spherical cap through three unit vectors."""
    n = np.cross(b - a, c - a)
    n /= np.linalg.norm(n)
    if np.dot(n, a) < 0:
        n = -n
    return float(np.arccos(np.clip(np.dot(n, a), -1.0, 1.0)))


def geodesic_sphere(frequency: int):
    """Vertices of the frequency-``k`` geodesic icosphere and its covering radius.

    Every face of the icosahedron is split into ``k^2`` triangles.  Each
    small spherical triangle lies inside its circumscribed cap, so every
    point of the sphere is within the largest circumradius (an angle) of
    some vertex.
    """
    base, faces = _icosahedron()
    index = {}
    vertices = []

    def vertex(p):
        p = p / np.linalg.norm(p)
        key = tuple(np.round(p, 10))
        if key not in index:
            index[key] = len(vertices)
            vertices.append(p)
        return index[key]

    radius = 0.0
    k = frequency
    for fa, fb, fc in faces:
        a, b, c = base[fa], base[fb], base[fc]
        grid = {}
        for i in range(k + 1):
            for j in range(k + 1 - i):
                grid[i, j] = vertex((i * a + j * b + (k - i - j) * c) / k)
        for i in range(k):
            for j in range(k - i):
                tris = [(grid[i, j], grid[i + 1, j], grid[i, j + 1])]
                if i + j < k - 1:
                    tris.append((grid[i + 1, j], grid[i + 1, j + 1], grid[i, j + 1]))
                for t in tris:
                    p, q, r = (vertices[v] for v in t)
                    radius = max(radius, _circumradius(p, q, r))
    return np.array(vertices), radius


def bloch_to_ket(vectors) -> np.ndarray:
    """Pure qubit states with the given Bloch vectors (rows)."""
    vectors = np.atleast_2d(vectors)
    theta = np.arccos(np.clip(vectors[:, 2], -1.0, 1.0))
    phi = np.arctan2(vectors[:, 1], vectors[:, 0])
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)


def _exact_qubit_points(epsilon: float) -> np.ndarray:
    if epsilon >= 1.0:
        # Pure states are never more than trace distance 1 apart.
        return np.array([[1.0, 0.0]], dtype=complex)
    frequency = 1
    while True:
        vertices, radius = geodesic_sphere(frequency)
        # Bloch angle r corresponds to trace distance sin(r/2).
        if np.sin(radius / 2) <= epsilon:
            return bloch_to_ket(vertices)
        frequency += 1


def nearest_many(net: EpsilonNet, states) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`nearest` over the rows of ``states``."""
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    if len(net) == 0:
        raise ValueError("net is empty")
    if states.shape[1] != net.dim:
        raise InvalidDimensionError(f"state dimension {states.shape[1]} != net dimension {net.dim}")
    idx = np.empty(len(states), dtype=int)
    best = np.empty(len(states))
    chunk = max(1, 2_000_000 // max(1, len(net) * net.dim))
    for start in range(0, len(states), chunk):
        block = states[start:start + chunk]
        overlaps = np.abs(block.conj() @ net.points.T) ** 2
        i = np.argmax(overlaps, axis=1)
        idx[start:start + chunk] = i
        best[start:start + chunk] = overlaps[np.arange(len(block)), i]
    return idx, np.sqrt(np.clip(1.0 - best, 0.0, None))


def nearest(net: EpsilonNet, state) -> tuple[int, float]:
    """Index of the closest net point in trace distance, and that distance.

    Ties go to the lowest index.
    """
    state = np.asarray(state, dtype=complex)
    if state.ndim != 1:
        raise InvalidDimensionError("nearest expects a single pure-state vector")
    idx, _ = nearest_many(net, state[None, :])
    i = int(idx[0])
    return i, pure_trace_distance(net.points[i], state)


def measure_coverage(points, dim: int, samples: int = COVERAGE_SAMPLES, rng=None) -> float:
    """Largest nearest-point distance seen over ``samples`` Haar states."""
    probe = EpsilonNet(dim, 2.0, points, Certificate("empirical"))
    _, dist = nearest_many(probe, haar_states(dim, samples, rng))
    return float(dist.max())


def build_net(dim: int, epsilon: float, strategy: str = "random", budget: int = 1000,
              rng=None, coverage_samples: int = COVERAGE_SAMPLES) -> EpsilonNet:
    """Build a net of pure states on ``C^dim``.

    Args:
        dim: Hilbert space dimension.
        epsilon: target covering radius in trace distance.
        strategy: ``"exact-qubit"`` (``dim == 2`` only; a deterministic
            Bloch-sphere triangulation that provably covers at ``epsilon``)
            or ``"random"`` (``budget`` Haar samples with coverage measured
            on ``coverage_samples`` fresh samples).
        budget: number of points for the random strategy.
        rng: generator or seed.
        coverage_samples: probe count for the empirical certificate.

    Raises:
        UnsupportedError: for ``exact-qubit`` with ``dim != 2`` or an unknown strategy.
    """
    if dim < 1:
        raise InvalidDimensionError("dim must be >= 1")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if strategy == "exact-qubit":
        if dim != 2:
            raise UnsupportedError("exact-qubit nets exist only for dim = 2")
        return EpsilonNet(2, float(epsilon), _exact_qubit_points(epsilon), Certificate("exact-qubit"))
    if strategy != "random":
        raise UnsupportedError(f"unknown net strategy {strategy!r}; choose from {STRATEGIES}")
    rng = resolve_rng(rng)
    points = haar_states(dim, budget, rng)
    observed = measure_coverage(points, dim, coverage_samples, rng)
    return EpsilonNet(dim, float(epsilon), points,
                      Certificate("empirical", coverage_samples, observed))


def net_from_points(points, epsilon: float | None = None, rng=None,
                    coverage_samples: int = COVERAGE_SAMPLES) -> EpsilonNet:
    """Wrap explicit points as a net with a measured coverage certificate.

    ``epsilon`` defaults to the measured coverage.
    """
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    dim = points.shape[1]
    observed = measure_coverage(points, dim, coverage_samples, rng) if coverage_samples else float("nan")
    eps = observed if epsilon is None else epsilon
    return EpsilonNet(dim, float(eps), points, Certificate("empirical", coverage_samples, observed))


def with_points(net: EpsilonNet, extra) -> EpsilonNet:
    """Net with ``extra`` states placed first (they win nearest-point ties).

    Adding points can only shrink nearest distances, so the certificate
    carries over unchanged.
    """
    extra = np.atleast_2d(np.asarray(extra, dtype=complex))
    if extra.shape[1] != net.dim:
        raise InvalidDimensionError("injected states have the wrong dimension")
    return EpsilonNet(net.dim, net.epsilon, np.vstack([extra, net.points]), net.certificate)


def mixed_net_size_bound(dim: int, epsilon: float, pure: bool = False) -> float:
    """``log2`` of the net cardinality bound ``(5/eps)^(2d)`` (pure) or ``(5/eps)^(2d^2)``."""
    if not 0 < epsilon <= 2:
        raise ValueError(f"epsilon must lie in (0, 2], got {epsilon}")
    exponent = 2 * dim if pure else 2 * dim * dim
    return exponent * float(np.log2(5.0 / epsilon))
