import itertools

import numpy as np
import pytest

from oracles import bhattacharyya_sq
from qidcodes.capacity import pairwise_distance_check
from qidcodes.classical_id import ClassicalIdCode
from qidcodes.errors import DegenerateParametersError, InvalidStateError, PartialResultError
from qidcodes.fingerprint import (
    _fingerprints_of,
    build_fingerprint_code,
    build_mixed_code,
    fingerprint_encode,
    verify_fingerprint,
    verify_mixed_code,
)
from qidcodes.qcore import basis_state, pure_overlap
from qidcodes.verify import acceptance_matrix


def test_encode_examples():
    assert np.allclose(fingerprint_encode([0, 0, 1, 0]), basis_state(4, 2))
    assert pure_overlap(fingerprint_encode([0.5, 0.5]), fingerprint_encode([1, 0])) == pytest.approx(0.5)
    assert pure_overlap(fingerprint_encode([0.5, 0.5, 0, 0]), fingerprint_encode([0, 0, 0.5, 0.5])) == 0
    with pytest.raises(InvalidStateError):
        fingerprint_encode([0.5, 0.6])


def test_overlap_is_bhattacharyya():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p, q = rng.dirichlet(np.ones(5)), rng.dirichlet(np.ones(5))
        assert pure_overlap(fingerprint_encode(p), fingerprint_encode(q)) == pytest.approx(bhattacharyya_sq(p, q))


def test_known_sets():
    code = _fingerprints_of(ClassicalIdCode(8, ((0, 1, 2, 3), (2, 3, 4, 5)), 4, 0.5), 0.5)
    assert code.max_overlap == pytest.approx(0.25)
    rep = verify_fingerprint(code)
    assert rep.lambda1 == pytest.approx(0, abs=1e-12) and rep.lambda2 == pytest.approx(0.25)
    disjoint = _fingerprints_of(ClassicalIdCode(8, ((0, 1), (2, 3)), 2, 0.5), 0.5)
    assert disjoint.max_overlap == 0


def test_build_and_overlap_identity():
    code = build_fingerprint_code(128, 1 / 32, 0.9, 20, 3)
    inter = code.sets.intersections()
    ov = code.overlaps()
    for i, j in itertools.permutations(range(len(code)), 2):
        assert ov[i, j] == pytest.approx((inter[i, j] / code.sets.set_size) ** 2, abs=1e-12)
    assert ov[~np.eye(len(code), dtype=bool)].max() <= 0.9
    rep = verify_fingerprint(code)
    chk = pairwise_distance_check(code.states, rep.lambda1, rep.lambda2)
    assert chk.passed and chk.min_pairwise >= np.sqrt(1 - rep.lambda2) - 1e-12


def test_hypothesis_enforced():
    with pytest.raises(DegenerateParametersError):
        build_fingerprint_code(16, 0.25, 0.5, 4, 0)
    assert len(build_fingerprint_code(16, 0.25, 0.5, 2, 0, enforce_hypothesis=False)) == 2


def test_mixed_degenerate_without_override():
    for d in (2, 100, 1024, 10_000):
        with pytest.raises(DegenerateParametersError):
            build_mixed_code(d, 0.5)


def test_mixed_spec_example_is_partial():
    with pytest.raises(PartialResultError):
        build_mixed_code(16, 0.5, S_override=4, target_n=8, rng=0)
    code = build_mixed_code(16, 0.5, S_override=4, target_n=8, rng=0, allow_partial=True)
    rep = verify_mixed_code(code)
    a = acceptance_matrix(code.states, code.effects)
    ov = code.inner.overlaps()
    dev = rep.bounds["embedding_max_deviation"]
    off = ~np.eye(len(code), dtype=bool)
    assert np.all(a[off] <= ov[off] + 2 * dev + 1e-12)
    assert rep.lambda1 <= 1e-9


def test_mixed_decomposition_with_ancilla():
    code = build_mixed_code(16, 0.9, S_override=32, target_n=5, rng=1, fingerprint_epsilon=0.25,
                            allow_partial=True)
    assert code.embedding.a == 2 and len(code) >= 3
    rep = verify_mixed_code(code)
    assert rep.lambda1 <= 1e-9
    assert rep.lambda2 <= rep.bounds["inner_max_overlap"] + 2 * rep.bounds["embedding_max_deviation"] + 1e-12


def test_mixed_identity_regime():
    code = build_mixed_code(8, 0.9, S_override=8, target_n=3, rng=2, fingerprint_epsilon=0.5,
                            allow_partial=True)
    assert code.embedding.a == 1
    a = acceptance_matrix(code.states, code.effects)
    assert np.allclose(a, code.inner.overlaps(), atol=1e-9)
