"""Lindblad models and their vectorized Liouvillian on a doubled register.

Register layout: qubits ``0..N-1`` carry the ket index ``m`` and qubits
``N..2N-1`` the bra index ``n``, so ``rho[m, n]`` sits at amplitude
``m + 2**N * n``.  With this layout ``vec(A rho B) = (A (x) B^T) vec(rho)`` where
``A`` acts on the ket register.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliSum

DELTA_E_FLOOR = 1e-3


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus ``(rate, jump operator)`` channels on ``n_spins`` qubits.

    ``hint`` records the builder that produced the model (e.g. ``"xxz"``) and is
    only consulted by defaults such as the penalty strength.
    """

    n_spins: int
    hamiltonian: PauliSum
    jumps: tuple[tuple[float, PauliSum], ...] = ()
    hint: str | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("a model needs at least one spin")
        if self.hamiltonian.n_qubits != self.n_spins:
            raise ValueError("Hamiltonian does not act on n_spins qubits")
        object.__setattr__(self, "jumps", tuple((float(g), op) for g, op in self.jumps))
        for g, op in self.jumps:
            if g < 0 or not np.isfinite(g):
                raise ValueError(f"jump rate must be finite and >= 0, got {g}")
            if op.n_qubits != self.n_spins:
                raise ValueError("jump operator does not act on n_spins qubits")
        if not self.hamiltonian.is_hermitian(1e-12):
            raise ValueError("Hamiltonian is not Hermitian")


@dataclass(frozen=True, eq=False)
class VectorizedLiouvillian:
    op: PauliSum
    source: LindbladModel

    @property
    def n_qubits(self) -> int:
        return self.op.n_qubits

    @property
    def n_terms(self) -> int:
        return len(self.op)

    def matrix(self):
        """Sparse CSR matrix of the operator, built once and cached."""
        m = self.__dict__.get("_matrix")
        if m is None:
            m = self.op.to_sparse()
            object.__setattr__(self, "_matrix", m)
        return m

    def adjoint_matrix(self):
        m = self.__dict__.get("_adjoint")
        if m is None:
            m = self.matrix().conj().T.tocsr()
            object.__setattr__(self, "_adjoint", m)
        return m

    def to_dense(self) -> np.ndarray:
        return self.op.to_dense()


def build_xxz_model(n_spins: int, jz: float, gamma: float, jump: str = "lowering") -> LindbladModel:
    """Open XXZ chain with a uniform jump operator on every site.

    ``jump`` is ``"lowering"`` (sigma^- = |1><0|) or ``"dephasing"`` (sigma^z).
    """
    if n_spins < 1:
        raise ValueError("n_spins must be >= 1")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    h = PauliSum.zero(n_spins)
    for j in range(n_spins - 1):
        for label, c in (("X", 1.0), ("Y", 1.0), ("Z", jz)):
            h = h + PauliSum.single(n_spins, j, label) * PauliSum.single(n_spins, j + 1, label, c)
    h = h.collect()
    if jump == "lowering":
        ops = [PauliSum.lowering(n_spins, j) for j in range(n_spins)]
    elif jump == "dephasing":
        ops = [PauliSum.single(n_spins, j, "Z") for j in range(n_spins)]
    else:
        raise ValueError(f"unknown jump kind {jump!r}")
    return LindbladModel(
        n_spins, h, tuple((gamma, op) for op in ops), hint="xxz",
        params={"N": n_spins, "Jz": jz, "gamma": gamma, "jump": jump},
    )


def vectorize(model: LindbladModel) -> VectorizedLiouvillian:
    n = model.n_spins
    eye = PauliSum.identity(n)
    h = model.hamiltonian
    terms = h.tensor(eye).scale(-1j) + eye.tensor(h.transpose()).scale(1j)
    for g, lj in model.jumps:
        ldl = lj.adjoint() * lj
        terms = terms + (
            lj.tensor(lj.conjugate())
            - ldl.tensor(eye).scale(0.5)
            - eye.tensor(lj.transpose() * lj.conjugate()).scale(0.5)
        ).scale(g)
    return VectorizedLiouvillian(terms.collect(), model)


def vectorize_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("rho must be a square matrix")
    c = np.linalg.norm(rho)
    if c == 0:
        raise ValueError("cannot vectorize the zero matrix")
    # column-major flattening puts rho[m, n] at m + d * n
    return rho.flatten(order="F") / c


def devectorize(vec, n_spins: int) -> np.ndarray:
    d = 1 << n_spins
    return np.asarray(vec, dtype=complex).reshape((d, d), order="F")


def bell_state(n_spins: int) -> np.ndarray:
    if n_spins < 1:
        raise ValueError("n_spins must be >= 1")
    d = 1 << n_spins
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    return psi


def hermitian_part(liouv: VectorizedLiouvillian) -> PauliSum:
    op = liouv.op
    return (op + op.adjoint()).scale(0.5).collect()


def default_delta_e(liouv: VectorizedLiouvillian, safety: float = 0.5,
                    exponent_qubits: int | None = None, floor: float = DELTA_E_FLOOR) -> float:
    """Offset increment for the degenerate scan: ``safety * |Re L|_1 / 2**q``.

    ``q`` defaults to the vectorized register size ``2N``.
    """
    if not 0 < safety <= 1:
        raise ValueError("safety must lie in (0, 1]")
    herm = hermitian_part(liouv)
    if len(herm) == 0:
        return floor
    q = liouv.n_qubits if exponent_qubits is None else exponent_qubits
    return safety * herm.one_norm() / 2 ** q
