import doctest
import importlib
import pkgutil

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

import liouvgap
from liouvgap.ed import exact_gap
from liouvgap.estimators import ExactLiouvillianSpectrum, LiouvillianGapVQE
from liouvgap.liouvillian import LindbladModel, build_xxz_model, vectorize
from liouvgap.pauli import PauliSum
from liouvgap.validation import check_model, check_positive, check_statevector

DECAY = LindbladModel(1, PauliSum.zero(1), ((1.0, PauliSum.lowering(1, 0)),))


def test_params_round_trip():
    est = LiouvillianGapVQE(kappa=2.0, random_state=4)
    assert est.get_params()["kappa"] == 2.0
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    est.set_params(n_blocks=3)
    assert est.n_blocks == 3


def test_fit_decay():
    est = LiouvillianGapVQE(random_state=1).fit(DECAY)
    assert est.converged_
    assert est.gap_ == pytest.approx(0.5, abs=1e-3)
    assert est.kappa_ == float(vectorize(DECAY).n_terms ** 2)
    assert est.n_blocks_ == 2
    assert est.eigenvalue_.real == pytest.approx(-0.5, abs=1e-3)
    assert est.state().shape == (4,)


def test_fit_accepts_vectorized_form():
    est = ExactLiouvillianSpectrum().fit(vectorize(DECAY))
    np.testing.assert_allclose(est.eigenvalues_, [0, -0.5, -0.5, -1], atol=1e-9)
    assert est.degeneracy_ == 1


def test_exact_estimator_fidelity():
    model = build_xxz_model(2, 0.5, 1.0)
    est = ExactLiouvillianSpectrum().fit(model)
    assert est.gap_ == pytest.approx(exact_gap(model)[0])
    vqe = LiouvillianGapVQE(random_state=0, track_fidelity=False).fit(model)
    assert est.fidelity(vqe.state()) > 0.99


def test_not_fitted():
    with pytest.raises(NotFittedError):
        LiouvillianGapVQE().state()
    with pytest.raises(NotFittedError):
        ExactLiouvillianSpectrum().fidelity(np.ones(4))


def test_invalid_params():
    with pytest.raises(ValueError):
        LiouvillianGapVQE(grad_tol=-1).fit(DECAY)
    with pytest.raises(ValueError):
        LiouvillianGapVQE(random_state=None).fit(DECAY)
    with pytest.raises(TypeError):
        LiouvillianGapVQE().fit(np.eye(4))


def test_validation_helpers():
    assert check_model(vectorize(DECAY)) is DECAY
    with pytest.raises(ValueError):
        check_positive(0, "x")
    with pytest.raises(ValueError):
        check_statevector([1, 1], normalized=True)
    with pytest.raises(ValueError):
        check_statevector([np.nan, 1])


def test_docstring_examples():
    failures = 0
    for info in pkgutil.iter_modules(liouvgap.__path__):
        if info.name == "__main__":
            continue
        mod = importlib.import_module(f"liouvgap.{info.name}")
        failures += doctest.testmod(mod, optionflags=doctest.ELLIPSIS).failed
    assert failures == 0
