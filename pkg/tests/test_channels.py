import numpy as np
import pytest

from qidcodes.channels import (
    Channel,
    Ensemble,
    HybridAlgebra,
    apply,
    classical_channel,
    cq_channel,
    dephasing_channel,
    depolarizing_channel,
    hybrid_identity_channel,
    identity_channel,
    tensor_power,
)
from qidcodes.errors import InvalidDimensionError, InvalidStateError, ResourceLimitError
from qidcodes.qcore import basis_state, haar_state, ket_to_dm

STANDARD = [identity_channel(3), dephasing_channel(3), depolarizing_channel(3, 0.3),
            depolarizing_channel(2, 1.0), classical_channel([[0.7, 0.3], [0.1, 0.9]])]


def test_apply_examples():
    rho = ket_to_dm(haar_state(2, 0))
    assert np.allclose(apply(identity_channel(2), rho), rho)
    plus = ket_to_dm((basis_state(2, 0) + basis_state(2, 1)) / np.sqrt(2))
    assert np.allclose(apply(dephasing_channel(2), plus), np.eye(2) / 2)
    assert np.allclose(apply(depolarizing_channel(3, 1.0), ket_to_dm(haar_state(3, 1))), np.eye(3) / 3)
    with pytest.raises(InvalidDimensionError):
        apply(identity_channel(2), np.eye(3) / 3)


@pytest.mark.parametrize("ch", STANDARD)
def test_apply_preserves_states(ch):
    rng = np.random.default_rng(0)
    for _ in range(100):
        out = apply(ch, ket_to_dm(haar_state(ch.in_dim, rng)))
        assert abs(np.trace(out) - 1) < 1e-9
        assert np.linalg.eigvalsh(out).min() >= -1e-9


def test_non_cptp_rejected():
    with pytest.raises(InvalidStateError):
        Channel((np.eye(2) * 2,), 2, 2)


def test_tensor_power():
    ch = dephasing_channel(2)
    assert tensor_power(ch, 1) is ch or np.allclose(tensor_power(ch, 1).kraus_ops, ch.kraus_ops)
    ident = tensor_power(identity_channel(2), 3)
    rho = ket_to_dm(haar_state(8, 3))
    assert np.allclose(apply(ident, rho), rho)
    bell = ket_to_dm((basis_state(4, 0) + basis_state(4, 3)) / np.sqrt(2))
    assert np.allclose(apply(tensor_power(ch, 2), bell), np.diag([0.5, 0, 0, 0.5]))
    with pytest.raises(ResourceLimitError):
        tensor_power(identity_channel(4), 20)


def test_tensor_power_product_states():
    ch = depolarizing_channel(2, 0.4)
    rng = np.random.default_rng(1)
    a, b = ket_to_dm(haar_state(2, rng)), ket_to_dm(haar_state(2, rng))
    assert np.allclose(apply(tensor_power(ch, 2), np.kron(a, b)),
                       np.kron(apply(ch, a), apply(ch, b)), atol=1e-9)


def test_cq_channel():
    w0, w1 = ket_to_dm(basis_state(2, 0)), ket_to_dm(basis_state(2, 1))
    bit = cq_channel([w0, w1])
    assert np.allclose(apply(bit, w1), w1)
    w = ket_to_dm(haar_state(2, 0))
    const = cq_channel([w, w])
    assert np.allclose(apply(const, np.eye(2) / 2), w)
    mixed_out = [np.array([[0.8, 0.1], [0.1, 0.2]]), np.array([[0.3, 0], [0, 0.7]])]
    ch = cq_channel(mixed_out)
    assert np.allclose(apply(ch, w0), mixed_out[0], atol=1e-12)
    p = 0.35
    assert np.allclose(apply(ch, np.diag([p, 1 - p])), p * mixed_out[0] + (1 - p) * mixed_out[1])
    with pytest.raises(InvalidStateError):
        cq_channel([np.eye(2)])


def test_hybrid_and_ensemble():
    alg = HybridAlgebra((2, 3))
    assert alg.total_dim == 5
    ch = hybrid_identity_channel(alg)
    out = apply(ch, np.ones((5, 5)) / 5)
    assert np.allclose(out[:2, 2:], 0)
    with pytest.raises(ValueError):
        HybridAlgebra(())
    ens = Ensemble(np.array([0.5, 0.5]), (np.eye(2) / 2, ket_to_dm(basis_state(2, 0))))
    assert np.trace(ens.average()) == pytest.approx(1)
    with pytest.raises(ValueError):
        Ensemble(np.array([0.7, 0.7]), (np.eye(2) / 2, np.eye(2) / 2))
