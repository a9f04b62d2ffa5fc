"""Variational estimation of Liouvillian spectral gaps.

Lindblad models are vectorized into non-Hermitian Pauli sums on a doubled
register; a hardware-efficient ansatz is trained to minimize the
non-Hermitian variance, and a dense eigensolver provides exact references.
"""
from .cost import CostContext, cost_gradient, default_kappa, penalized_cost, variance_cost
from .ed import SpectralResult, dense_spectrum, exact_gap, fidelity_to_excited
from .estimators import ExactLiouvillianSpectrum, LiouvillianGapVQE
from .liouvillian import (LindbladModel, VectorizedLiouvillian, bell_state, build_xxz_model,
                          default_delta_e, devectorize, vectorize, vectorize_density)
from .optimizer import GapResult, OptimizerOptions, bfgs_minimize, solve_gap, solve_gap_degenerate
from .pauli import PauliString, PauliSum
from .simulator import AnsatzSpec, build_ansatz, run_circuit

__version__ = "0.1.0"

__all__ = [
    "AnsatzSpec", "CostContext", "ExactLiouvillianSpectrum", "GapResult", "LindbladModel",
    "LiouvillianGapVQE", "OptimizerOptions", "PauliString", "PauliSum", "SpectralResult",
    "VectorizedLiouvillian", "bell_state", "bfgs_minimize", "build_ansatz", "build_xxz_model",
    "cost_gradient", "default_delta_e", "default_kappa", "dense_spectrum", "devectorize",
    "exact_gap", "fidelity_to_excited", "penalized_cost", "run_circuit", "solve_gap",
    "solve_gap_degenerate", "variance_cost", "vectorize", "vectorize_density",
]
