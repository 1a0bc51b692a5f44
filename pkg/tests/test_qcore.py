import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from oracles import gram_schmidt_haar, trace_norm_half
from qidcodes.errors import InvalidDimensionError
from qidcodes.qcore import (
    basis_state,
    check_isometry,
    fidelity,
    haar_state,
    haar_unitary,
    ket_to_dm,
    partial_trace,
    pure_overlap,
    pure_trace_distance,
    random_isometry,
    spawn_generators,
    support_projector,
    trace_distance,
    von_neumann_entropy,
)


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def test_haar_unitary_small_cases():
    u = haar_unitary(1, 0)
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-12
    u = haar_unitary(4, 1)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-10)
    with pytest.raises(InvalidDimensionError):
        haar_unitary(0, 1)


def test_haar_first_moment_matches_gram_schmidt_oracle():
    rng = np.random.default_rng(11)
    n = 10_000
    ours = np.array([abs(haar_unitary(4, rng)[0, 0]) ** 2 for _ in range(n)])
    ref = np.array([abs(gram_schmidt_haar(4, rng)[0, 0]) ** 2 for _ in range(2000)])
    se = ours.std(ddof=1) / np.sqrt(n)
    assert abs(ours.mean() - 0.25) < 3 * se
    assert abs(ref.mean() - 0.25) < 4 * ref.std(ddof=1) / np.sqrt(len(ref))


def test_haar_left_invariance_ks():
    rng = np.random.default_rng(5)
    w = haar_unitary(3, 999)
    e0 = basis_state(3, 0)
    proj = np.outer(e0, e0)
    plain, rotated = [], []
    for _ in range(1000):
        u = haar_unitary(3, rng)
        plain.append(np.trace(u @ proj @ u.conj().T @ proj).real)
        v = w @ haar_unitary(3, rng)
        rotated.append(np.trace(v @ proj @ v.conj().T @ proj).real)
    assert stats.ks_2samp(plain, rotated).pvalue > 0.01


def test_same_seed_bit_identical():
    assert np.array_equal(haar_unitary(5, 42), haar_unitary(5, 42))
    a, b = spawn_generators(7, 2)
    c, d = spawn_generators(7, 2)
    assert np.array_equal(a.standard_normal(3), c.standard_normal(3))
    assert not np.array_equal(b.standard_normal(3), a.standard_normal(3))


def test_random_isometry_contract_and_moment():
    v = random_isometry(2, 8, 3)
    assert np.allclose(v.conj().T @ v, np.eye(2), atol=1e-10)
    check_isometry(v)
    assert random_isometry(1, 4, 0).shape == (4, 1)
    assert np.allclose(random_isometry(4, 4, 0) @ random_isometry(4, 4, 0).conj().T, np.eye(4))
    with pytest.raises(InvalidDimensionError):
        random_isometry(3, 2, 0)
    rng = np.random.default_rng(2)
    vals = np.array([np.sum(abs(random_isometry(2, 8, rng)[0]) ** 2) for _ in range(10_000)])
    assert abs(vals.mean() - 0.25) < 3 * vals.std(ddof=1) / np.sqrt(len(vals))


def test_partial_trace_examples():
    rng = np.random.default_rng(0)
    rho, sigma = random_density(2, rng), random_density(3, rng)
    assert np.allclose(partial_trace(np.kron(rho, sigma), 2, 3), rho)
    bell = (basis_state(4, 0) + basis_state(4, 3)) / np.sqrt(2)
    assert np.allclose(partial_trace(ket_to_dm(bell), 2, 2), np.eye(2) / 2)
    out = partial_trace(random_density(4, rng), 2, 2)
    assert abs(np.trace(out) - 1) < 1e-12 and np.linalg.eigvalsh(out).min() >= -1e-12
    with pytest.raises(InvalidDimensionError):
        partial_trace(np.eye(6) / 6, 2, 2)


def test_partial_trace_unitary_covariance_of_support():
    rng = np.random.default_rng(4)
    rho = random_density(6, rng, rank=1)
    u = haar_unitary(2, rng)
    big = np.kron(u, np.eye(3))
    lhs = support_projector(partial_trace(big @ rho @ big.conj().T, 2, 3))
    rhs = u @ support_projector(partial_trace(rho, 2, 3)) @ u.conj().T
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_trace_distance_examples():
    z = ket_to_dm(basis_state(2, 0))
    assert trace_distance(z, z) == pytest.approx(0, abs=1e-12)
    assert trace_distance(z, ket_to_dm(basis_state(2, 1))) == pytest.approx(1)
    assert trace_distance(z, np.eye(2) / 2) == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 5))
def test_trace_distance_properties(seed, dim):
    rng = np.random.default_rng(seed)
    a, b, c = (random_density(dim, rng) for _ in range(3))
    dab = trace_distance(a, b)
    assert dab == pytest.approx(trace_norm_half(a, b), abs=1e-10)
    assert dab == pytest.approx(trace_distance(b, a), abs=1e-12)
    assert dab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12
    assert 0 <= dab <= 1 + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 6))
def test_pure_distance_formula_matches_eigen_route(seed, dim):
    rng = np.random.default_rng(seed)
    a, b = haar_state(dim, rng), haar_state(dim, rng)
    assert pure_trace_distance(a, b) == pytest.approx(trace_distance(ket_to_dm(a), ket_to_dm(b)), abs=1e-9)
    assert fidelity(ket_to_dm(a), ket_to_dm(b)) == pytest.approx(pure_overlap(a, b), abs=1e-9)


def test_pure_overlap_examples():
    e0, e1 = basis_state(2, 0), basis_state(2, 1)
    assert pure_overlap(e0, e0) == pytest.approx(1)
    assert pure_overlap(e0, e1) == 0
    assert pure_overlap((e0 + e1) / np.sqrt(2), e0) == pytest.approx(0.5)


def test_support_projector_examples():
    psi = haar_state(3, 1)
    assert np.allclose(support_projector(ket_to_dm(psi)), ket_to_dm(psi), atol=1e-10)
    assert np.allclose(support_projector(np.eye(4) / 4), np.eye(4))
    u = haar_unitary(4, 2)
    rho = u @ np.diag([0.9, 0.1, 0, 0]) @ u.conj().T
    p = support_projector(rho)
    assert np.trace(p).real == pytest.approx(2, abs=1e-10)
    assert np.allclose(p @ p, p, atol=1e-10)


def test_entropy_bits():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2)
    assert von_neumann_entropy(ket_to_dm(haar_state(3, 0))) == pytest.approx(0, abs=1e-9)
