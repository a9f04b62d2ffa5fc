"""Input validation helpers shared by the estimators and the CLI."""
from __future__ import annotations

import numpy as np

from .liouvillian import LindbladModel, VectorizedLiouvillian
from .pauli import DimensionError


def check_model(model) -> LindbladModel:
    """Accept a ``LindbladModel`` or its vectorized form, return the model."""
    if isinstance(model, VectorizedLiouvillian):
        return model.source
    if not isinstance(model, LindbladModel):
        raise TypeError(f"expected a LindbladModel, got {type(model).__name__}")
    return model


def check_statevector(psi, n_qubits: int | None = None, normalized: bool = False,
                      atol: float = 1e-10) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size == 0 or psi.size & (psi.size - 1):
        raise DimensionError(f"statevector length {psi.size} is not a power of two")
    if n_qubits is not None and psi.size != 1 << n_qubits:
        raise DimensionError(f"expected {1 << n_qubits} amplitudes, got {psi.size}")
    if not np.all(np.isfinite(psi)):
        raise ValueError("statevector has non-finite amplitudes")
    if normalized and abs(np.linalg.norm(psi) - 1) > atol:
        raise ValueError(f"statevector norm {np.linalg.norm(psi):.12g} is not 1")
    return psi


def check_positive(value, name: str, allow_none: bool = False):
    if value is None and allow_none:
        return None
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_non_negative(value, name: str, allow_none: bool = False):
    if value is None and allow_none:
        return None
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a non-negative finite number, got {value}")
    return value
