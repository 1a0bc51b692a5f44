import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import blahut_arimoto, entropy_bits
from qidcodes.capacity import (
    converse_bound,
    ds_single_letter,
    holevo_chi,
    holevo_quantity,
    hybrid_capacity,
    hybrid_objective,
    pairwise_distance_check,
    rate_report,
)
from qidcodes.channels import (
    HybridAlgebra,
    apply,
    classical_channel,
    cq_channel,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
)
from qidcodes.errors import UndefinedRateError, VacuousBoundError
from qidcodes.qcore import basis_state, haar_state, ket_to_dm


@pytest.mark.parametrize("ch,expected", [
    (identity_channel(2), 1.0),
    (dephasing_channel(2), 1.0),
    (depolarizing_channel(2, 1.0), 0.0),
])
def test_chi_regressions(ch, expected):
    res = holevo_chi(ch, restarts=16, rng=0)
    assert res.value == pytest.approx(expected, abs=1e-6)
    assert res.value <= np.log2(ch.out_dim) + 1e-12


def test_chi_cq_matches_blahut_arimoto():
    rng = np.random.default_rng(1)
    W = rng.dirichlet(np.ones(3), size=3)
    res = holevo_chi(classical_channel(W), restarts=4, rng=2)
    assert res.value == pytest.approx(blahut_arimoto(W), abs=1e-5)


def test_chi_warm_start_lower_bound():
    ch = depolarizing_channel(2, 0.5)
    psis = np.array([basis_state(2, 0), basis_state(2, 1)])
    probs = np.array([0.5, 0.5])
    start = holevo_quantity(ch, probs, psis)
    res = holevo_chi(ch, restarts=1, rng=0, warm_start=(probs, psis))
    assert res.value >= start - 1e-12


def test_chi_constant_cq_is_zero():
    w = ket_to_dm(haar_state(2, 0))
    assert holevo_chi(cq_channel([w, w]), restarts=2, rng=0).value == pytest.approx(0, abs=1e-9)


def test_holevo_quantity_matches_entropies():
    ch = depolarizing_channel(2, 0.3)
    rng = np.random.default_rng(2)
    psis = [haar_state(2, rng) for _ in range(3)]
    probs = np.array([0.2, 0.3, 0.5])
    outs = [apply(ch, p) for p in psis]
    ref = entropy_bits(sum(p * o for p, o in zip(probs, outs))) - sum(p * entropy_bits(o) for p, o in zip(probs, outs))
    assert holevo_quantity(ch, probs, psis) == pytest.approx(ref, abs=1e-12)


def test_hybrid_examples():
    assert hybrid_capacity(HybridAlgebra((2,))).closed_form == pytest.approx(2.0)
    res = hybrid_capacity(HybridAlgebra((2, 3)))
    assert res.closed_form == pytest.approx(3.70044, abs=1e-5)
    assert abs(res.closed_form - res.via_optimization) <= 1e-9
    assert hybrid_capacity(HybridAlgebra((1,))).closed_form == 0


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=6), st.integers(0, 10 ** 6))
def test_hybrid_random_dims(dims, seed):
    res = hybrid_capacity(HybridAlgebra(tuple(dims)))
    assert abs(res.closed_form - res.via_optimization) <= 1e-9
    p = np.random.default_rng(seed).dirichlet(np.ones(len(dims)))
    assert hybrid_objective(p, dims) <= res.closed_form + 1e-9


def test_ds_examples():
    bell = (basis_state(4, 0) + basis_state(4, 3)) / np.sqrt(2)
    res = ds_single_letter(identity_channel(2), [(1.0, bell)])
    assert res.coherent_info == pytest.approx(1) and res.holevo_term == pytest.approx(0, abs=1e-12)
    assert res.value == pytest.approx(2)
    res = ds_single_letter(depolarizing_channel(2, 1.0), [(0.5, bell), (0.5, np.kron(basis_state(2, 0), basis_state(2, 1)))])
    assert res.holevo_term == pytest.approx(0, abs=1e-12) and res.value <= 1e-12
    assert res.coherent_info_clamped == max(0.0, res.coherent_info)
    feed = [(0.5, np.kron(basis_state(1, 0), basis_state(2, x))) for x in range(2)]
    res = ds_single_letter(dephasing_channel(2), feed)
    assert res.coherent_info == pytest.approx(0, abs=1e-9)
    assert res.holevo_term == pytest.approx(1) and res.value == pytest.approx(1)


def test_ds_classical_feed_reduces_to_holevo():
    ch = depolarizing_channel(3, 0.4)
    rng = np.random.default_rng(3)
    psis = [haar_state(3, rng) for _ in range(4)]
    probs = rng.dirichlet(np.ones(4))
    res = ds_single_letter(ch, [(p, np.kron(basis_state(1, 0), s)) for p, s in zip(probs, psis)])
    assert res.coherent_info == pytest.approx(0, abs=1e-9)
    assert res.value == pytest.approx(holevo_quantity(ch, probs, psis), abs=1e-9)


def test_converse_examples():
    assert converse_bound(2, 0.25, 0.25, pure_only=True) == pytest.approx(13.2877, abs=1e-4)
    assert converse_bound(2, 0.25, 0.25) == pytest.approx(26.575, abs=1e-3)
    with pytest.raises(VacuousBoundError):
        converse_bound(2, 0.5, 0.5)


def test_pairwise_distance_examples():
    basis = [basis_state(3, k) for k in range(3)]
    chk = pairwise_distance_check(basis, 0, 0)
    assert chk.min_pairwise == pytest.approx(1) and chk.passed
    assert not pairwise_distance_check([basis[0], basis[0]], 0.2, 0.2).passed
    mixed = [ket_to_dm(b) for b in basis]
    assert pairwise_distance_check(mixed, 0.1, 0.1).passed


def test_rate_examples():
    assert rate_report("id-double-log", 4, 2 ** 16).rate == pytest.approx(1.0)
    assert rate_report("quantum-id-log", 5, 1024).rate == pytest.approx(2.0)
    assert rate_report("transmission-log", 2, 16).rate == pytest.approx(2.0)
    with pytest.raises(UndefinedRateError):
        rate_report("id-double-log", 1, 1)
    with pytest.raises(ValueError):
        rate_report("bogus", 1, 4)
