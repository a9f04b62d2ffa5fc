"""scikit-learn style wrappers around the variational and exact gap solvers."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import ed
from .cost import default_kappa
from .liouvillian import vectorize
from .optimizer import OptimizerOptions, solve_gap, solve_gap_degenerate
from .validation import check_model, check_non_negative, check_positive, check_statevector


class LiouvillianGapVQE(BaseEstimator):
    """Variational estimate of the Liouvillian gap of a Lindblad model.

    ``fit(model)`` runs the two-stage optimization (or the offset scan when
    ``degenerate=True``) and exposes ``gap_``, ``eigenvalue_``, ``theta_``,
    ``converged_``, ``n_iter_`` and the full ``result_``.

    Examples
    --------
    >>> from liouvgap import build_xxz_model
    >>> est = LiouvillianGapVQE(random_state=0).fit(build_xxz_model(2, 0.5, 1.0))
    >>> round(est.gap_, 3)
    0.5
    """

    def __init__(self, n_blocks=None, kappa=None, degenerate=False, delta_e=None,
                 max_offsets=10, max_iterations=2000, grad_tol=1e-8, cost_tol=1e-10,
                 fd_step=1e-5, theta_init_scale=0.1, gradient="adjoint",
                 track_fidelity=True, random_state=0):
        self.n_blocks = n_blocks
        self.kappa = kappa
        self.degenerate = degenerate
        self.delta_e = delta_e
        self.max_offsets = max_offsets
        self.max_iterations = max_iterations
        self.grad_tol = grad_tol
        self.cost_tol = cost_tol
        self.fd_step = fd_step
        self.theta_init_scale = theta_init_scale
        self.gradient = gradient
        self.track_fidelity = track_fidelity
        self.random_state = random_state

    def _options(self) -> OptimizerOptions:
        seed = self.random_state
        if isinstance(seed, np.random.Generator) or seed is None:
            raise ValueError("random_state must be an int for reproducible traces")
        return OptimizerOptions(
            max_iterations=int(self.max_iterations),
            grad_tol=check_positive(self.grad_tol, "grad_tol"),
            cost_tol=check_positive(self.cost_tol, "cost_tol"),
            fd_step=check_positive(self.fd_step, "fd_step"),
            seed=int(seed),
            theta_init_scale=check_positive(self.theta_init_scale, "theta_init_scale"),
            gradient=self.gradient,
        )

    def fit(self, model, y=None):
        model = check_model(model)
        opts = self._options()
        kappa = check_non_negative(self.kappa, "kappa", allow_none=True)
        if self.n_blocks is not None and int(self.n_blocks) < 1:
            raise ValueError("n_blocks must be >= 1")
        liouv = vectorize(model)
        if self.degenerate:
            result = solve_gap_degenerate(
                liouv, check_positive(self.delta_e, "delta_e", allow_none=True), opts,
                int(self.max_offsets), kappa=kappa, n_blocks=self.n_blocks,
                track_fidelity=self.track_fidelity)
        else:
            result = solve_gap(liouv, opts, kappa=kappa, n_blocks=self.n_blocks,
                               track_fidelity=self.track_fidelity)
        self.result_ = result
        self.gap_ = result.gap
        self.eigenvalue_ = result.eigenvalue
        self.theta_ = result.theta_final
        self.converged_ = result.converged
        self.n_iter_ = result.iterations
        self.kappa_ = kappa if kappa is not None else default_kappa(liouv)
        self.n_blocks_ = self.n_blocks if self.n_blocks is not None else 2 * model.n_spins
        self.model_ = model
        return self

    def state(self) -> np.ndarray:
        """Variational state at the fitted parameters."""
        check_is_fitted(self, "theta_")
        from .simulator import AnsatzSpec
        return AnsatzSpec(2 * self.model_.n_spins, self.n_blocks_).run(self.theta_)


class ExactLiouvillianSpectrum(BaseEstimator):
    """Dense exact diagonalization of the vectorized Liouvillian."""

    def __init__(self, degeneracy_tol=ed.DEGENERACY_TOL, cluster_tol=ed.CLUSTER_TOL):
        self.degeneracy_tol = degeneracy_tol
        self.cluster_tol = cluster_tol

    def fit(self, model, y=None):
        model = check_model(model)
        tol = check_positive(self.degeneracy_tol, "degeneracy_tol")
        self.liouvillian_ = vectorize(model)
        spec = ed.dense_spectrum(self.liouvillian_, tol)
        self.eigenvalues_ = spec.eigenvalues
        self.eigenvectors_ = spec.right_eigenvectors
        self.degeneracy_ = spec.zero_count
        self.gap_ = spec.gap
        return self

    def fidelity(self, psi) -> float:
        check_is_fitted(self, "eigenvalues_")
        psi = check_statevector(psi, self.liouvillian_.n_qubits)
        return ed.fidelity_to_excited(psi, self.liouvillian_, self.cluster_tol)
