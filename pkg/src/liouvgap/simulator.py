"""Statevector simulation of the layered rotation ansatz.

Every gate is ``exp(-i theta P)`` for a Pauli string ``P`` (no factor 1/2), so
``U = cos(theta) - i sin(theta) P``.  Qubit 0 is the least significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import DimensionError, PauliSum, apply


@dataclass(frozen=True)
class Gate:
    kind: str           # "rz", "rx", "rzz" or "rxx"
    qubits: tuple[int, ...]


class AnsatzSpec:
    """``n_blocks`` repetitions of Rz layer, Rx layer, Rzz chain, Rxx chain."""

    def __init__(self, n_qubits: int, n_blocks: int):
        if n_qubits < 2:
            raise ValueError("the ansatz needs at least two qubits")
        if n_blocks < 1:
            raise ValueError("the ansatz needs at least one block")
        self.n_qubits = n_qubits
        self.n_blocks = n_blocks
        block = (
            [Gate("rz", (q,)) for q in range(n_qubits)]
            + [Gate("rx", (q,)) for q in range(n_qubits)]
            + [Gate("rzz", (q, q + 1)) for q in range(n_qubits - 1)]
            + [Gate("rxx", (q, q + 1)) for q in range(n_qubits - 1)]
        )
        self.gates = tuple(block) * n_blocks
        idx = np.arange(1 << n_qubits)
        self._generators = []
        for g in self.gates:
            mask = sum(1 << q for q in g.qubits)
            if g.kind in ("rz", "rzz"):
                parity = np.zeros_like(idx)
                for q in g.qubits:
                    parity ^= (idx >> q) & 1
                self._generators.append(("diag", (1 - 2 * parity).astype(float)))
            else:
                self._generators.append(("flip", idx ^ mask))

    @property
    def parameter_count(self) -> int:
        return len(self.gates)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def __repr__(self):
        return f"AnsatzSpec(n_qubits={self.n_qubits}, n_blocks={self.n_blocks})"

    def _check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.parameter_count,):
            raise ValueError(
                f"expected {self.parameter_count} parameters, got shape {theta.shape}")
        return theta

    @staticmethod
    def _generator(gen, psi):
        kind, data = gen
        return data * psi if kind == "diag" else psi[data]

    @staticmethod
    def _rotate(gen, psi, theta):
        kind, data = gen
        if kind == "diag":
            return np.exp(-1j * theta * data) * psi
        return np.cos(theta) * psi - 1j * np.sin(theta) * psi[data]

    def run(self, theta) -> np.ndarray:
        theta = self._check_theta(theta)
        psi = np.zeros(self.dim, dtype=complex)
        psi[0] = 1.0
        for gen, t in zip(self._generators, theta):
            psi = self._rotate(gen, psi, t)
        return psi

    def adjoint_gradient(self, theta, psi, m_psi) -> np.ndarray:
        """Gradient of ``<psi|M|psi>`` in ``theta`` for Hermitian ``M``.

        ``psi`` must be ``run(theta)`` and ``m_psi`` must be ``M @ psi``.  One
        backward sweep; each parameter costs three gate-sized operations.
        """
        theta = self._check_theta(theta)
        grad = np.empty(self.parameter_count)
        psi = psi.copy()
        lam = np.asarray(m_psi, dtype=complex).copy()
        for k in range(self.parameter_count - 1, -1, -1):
            gen = self._generators[k]
            grad[k] = 2 * np.vdot(lam, self._generator(gen, psi)).imag
            psi = self._rotate(gen, psi, -theta[k])
            lam = self._rotate(gen, lam, -theta[k])
        return grad


def build_ansatz(n_qubits: int, n_blocks: int) -> AnsatzSpec:
    return AnsatzSpec(n_qubits, n_blocks)


def run_circuit(ansatz: AnsatzSpec, theta) -> np.ndarray:
    return ansatz.run(theta)


def apply_operator(op: PauliSum, psi) -> np.ndarray:
    return apply(op, psi)


def _as_state(psi, n_qubits=None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size & (psi.size - 1) or psi.size == 0:
        raise DimensionError(f"statevector length {psi.size} is not a power of two")
    if n_qubits is not None and psi.size != 1 << n_qubits:
        raise DimensionError(f"statevector of length {psi.size} on {n_qubits} qubits")
    return psi


def expectation(op: PauliSum, psi) -> complex:
    psi = _as_state(psi, op.n_qubits)
    return complex(np.vdot(psi, apply(op, psi)))


def overlap(phi, psi) -> complex:
    phi, psi = _as_state(phi), _as_state(psi)
    if phi.shape != psi.shape:
        raise DimensionError(f"{phi.size} vs {psi.size} amplitudes")
    return complex(np.vdot(phi, psi))


def fidelity(phi, psi) -> float:
    phi, psi = _as_state(phi), _as_state(psi)
    return abs(overlap(phi, psi)) ** 2 / (np.vdot(phi, phi).real * np.vdot(psi, psi).real)
