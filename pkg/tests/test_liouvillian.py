import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import SIGMA_MINUS, dense_superoperator, dense_xxz
from liouvgap.liouvillian import (LindbladModel, bell_state, build_xxz_model, default_delta_e,
                                  devectorize, hermitian_part, vectorize, vectorize_density)
from liouvgap.pauli import PauliSum


def _decay():
    return LindbladModel(1, PauliSum.zero(1), ((1.0, PauliSum.lowering(1, 0)),))


def _random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_decay_superoperator_matrix():
    expected = dense_superoperator(np.zeros((2, 2)), [(1.0, SIGMA_MINUS)])
    np.testing.assert_allclose(vectorize(_decay()).to_dense(), expected, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("jump", ["lowering", "dephasing"])
def test_xxz_matches_dense_oracle(n, jump):
    h, jumps = dense_xxz(n, 0.7, 1.3, jump)
    model = build_xxz_model(n, 0.7, 1.3, jump)
    np.testing.assert_allclose(model.hamiltonian.to_dense(), h, atol=1e-14)
    np.testing.assert_allclose(vectorize(model).to_dense(), dense_superoperator(h, jumps), atol=1e-13)


def test_superoperator_generates_master_equation(rng):
    # L vec(rho) must equal vec of -i[H, rho] + sum g (L rho L^dag - 1/2 {L^dag L, rho})
    h, jumps = dense_xxz(2, 0.5, 1.0)
    liouv = vectorize(build_xxz_model(2, 0.5, 1.0))
    rho = _random_density(rng, 4)
    rhs = -1j * (h @ rho - rho @ h)
    for g, l in jumps:
        ldl = l.conj().T @ l
        rhs += g * (l @ rho @ l.conj().T - 0.5 * (ldl @ rho + rho @ ldl))
    np.testing.assert_allclose(liouv.matrix() @ rho.flatten(order="F"), rhs.flatten(order="F"),
                               atol=1e-12)


def test_sparse_and_dense_agree():
    liouv = vectorize(build_xxz_model(2, 1.0, 0.4, "dephasing"))
    np.testing.assert_allclose(liouv.matrix().toarray(), liouv.to_dense())
    np.testing.assert_allclose(liouv.adjoint_matrix().toarray(), liouv.to_dense().conj().T)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bell_is_left_zero_mode(n):
    for jump in ("lowering", "dephasing"):
        liouv = vectorize(build_xxz_model(n, 0.5, 1.0, jump))
        assert np.linalg.norm(liouv.adjoint_matrix() @ bell_state(n)) <= 1e-10


def test_bell_state_is_normalized_identity():
    b = bell_state(2)
    np.testing.assert_allclose(devectorize(b, 2), np.eye(4) / 2)
    assert np.linalg.norm(b) == pytest.approx(1)


def test_trace_preserved(rng):
    liouv = vectorize(build_xxz_model(2, 0.5, 1.0))
    for _ in range(10):
        drho = devectorize(liouv.matrix() @ _random_density(rng, 4).flatten(order="F"), 2)
        assert abs(np.trace(drho)) < 1e-12


def test_vectorize_density_round_trip(rng):
    rho = _random_density(rng, 4)
    v = vectorize_density(rho)
    assert np.linalg.norm(v) == pytest.approx(1)
    np.testing.assert_allclose(devectorize(v, 2) * np.linalg.norm(rho), rho, atol=1e-14)
    assert v[1 + 4 * 2] * np.linalg.norm(rho) == pytest.approx(rho[1, 2])


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(-2, 2))
def test_term_count_and_hermitian_part(gamma, jz):
    liouv = vectorize(build_xxz_model(2, jz, gamma))
    herm = hermitian_part(liouv)
    d = liouv.to_dense()
    np.testing.assert_allclose(herm.to_dense(), (d + d.conj().T) / 2, atol=1e-12)


def test_default_delta_e():
    liouv = vectorize(build_xxz_model(2, 1.0, 1.0, "dephasing"))
    expected = 0.5 * hermitian_part(liouv).one_norm() / 16
    assert default_delta_e(liouv) == pytest.approx(expected)
    assert default_delta_e(liouv, exponent_qubits=2) == pytest.approx(4 * expected)
    closed = vectorize(build_xxz_model(2, 1.0, 0.0))
    assert default_delta_e(closed) == 1e-3


def test_model_validation():
    with pytest.raises(ValueError):
        LindbladModel(1, PauliSum.from_label("X", 1j))
    with pytest.raises(ValueError):
        LindbladModel(1, PauliSum.zero(1), ((-1.0, PauliSum.from_label("Z")),))
    with pytest.raises(ValueError):
        LindbladModel(2, PauliSum.zero(1))
    with pytest.raises(ValueError):
        build_xxz_model(2, 1.0, 1.0, "bogus")
    with pytest.raises(ValueError):
        build_xxz_model(0, 1.0, 1.0)
