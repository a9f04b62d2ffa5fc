"""Non-Hermitian variance cost, its Bell-penalized form, and gradients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liouvillian import VectorizedLiouvillian, bell_state
from .pauli import PauliSum, sum_multiply
from .simulator import AnsatzSpec


@dataclass(frozen=True, eq=False)
class CostContext:
    liouvillian: VectorizedLiouvillian
    bell: np.ndarray
    kappa: float
    ansatz: AnsatzSpec

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.bell.shape != (1 << self.liouvillian.n_qubits,):
            raise ValueError("Bell state does not match the Liouvillian register")
        if self.ansatz.n_qubits != self.liouvillian.n_qubits:
            raise ValueError("ansatz does not match the Liouvillian register")

    @classmethod
    def create(cls, liouv: VectorizedLiouvillian, kappa: float | None = None,
               n_blocks: int | None = None) -> "CostContext":
        """Context with default Bell state, penalty strength and block count."""
        n = liouv.source.n_spins
        if kappa is None:
            kappa = default_kappa(liouv)
        if n_blocks is None:
            n_blocks = 2 * n
        return cls(liouv, bell_state(n), float(kappa), AnsatzSpec(liouv.n_qubits, n_blocks))

    def residual(self, energy: complex, psi: np.ndarray) -> np.ndarray:
        """``|f> = (L - E)|psi>``."""
        return self.liouvillian.matrix() @ psi - energy * psi


def variance_cost(ctx: CostContext, energy: complex, psi) -> float:
    f = ctx.residual(energy, psi)
    return float(np.vdot(f, f).real)


def penalized_cost(ctx: CostContext, energy: complex, psi) -> float:
    return variance_cost(ctx, energy, psi) + ctx.kappa * abs(np.vdot(psi, ctx.bell)) ** 2


def default_kappa(liouv: VectorizedLiouvillian, model_hint: str | None = None) -> float:
    """Penalty strength: ``N**2`` for XXZ chains, else the squared term count."""
    hint = model_hint if model_hint is not None else liouv.source.hint
    if hint == "xxz":
        return float(liouv.source.n_spins ** 2)
    return float(liouv.n_terms ** 2)


def variance_operator(liouv: VectorizedLiouvillian, energy: complex) -> PauliSum:
    """``(L^dag - E^*)(L - E)`` expanded into Pauli strings.

    Roughly quadratic in the term count of ``L``; used to cross-check the
    direct residual evaluation.
    """
    shifted = (liouv.op - PauliSum.identity(liouv.n_qubits, energy)).collect()
    return sum_multiply(shifted.adjoint(), shifted)


def evaluate(ctx: CostContext, theta, e_r: float, e_i: float, penalized: bool):
    """Cost and full gradient in ``(theta, E_r, E_i)`` with an adjoint sweep."""
    psi = ctx.ansatz.run(theta)
    energy = complex(e_r, e_i)
    mat = ctx.liouvillian.matrix()
    f = mat @ psi - energy * psi
    cost = np.vdot(f, f).real
    m_psi = ctx.liouvillian.adjoint_matrix() @ f - np.conj(energy) * f
    if penalized:
        b = np.vdot(ctx.bell, psi)
        cost += ctx.kappa * abs(b) ** 2
        m_psi = m_psi + ctx.kappa * b * ctx.bell
    grad_theta = ctx.ansatz.adjoint_gradient(theta, psi, m_psi)
    pf = np.vdot(psi, f)
    return float(cost), grad_theta, -2 * pf.real, -2 * pf.imag, psi


def cost_gradient(ctx: CostContext, energy: complex, theta, penalized: bool,
                  method: str = "fd", fd_step: float = 1e-5) -> np.ndarray:
    """Gradient w.r.t. ``(theta..., E_r, E_i)``.

    The energy components are analytic (the cost is quadratic in E).  The
    theta block uses central differences (``method="fd"``) or the adjoint
    sweep (``method="adjoint"``).
    """
    theta = np.asarray(theta, dtype=float)
    cost_fn = penalized_cost if penalized else variance_cost
    if method == "adjoint":
        _, g_theta, g_r, g_i, _ = evaluate(ctx, theta, energy.real, energy.imag, penalized)
    elif method == "fd":
        g_theta = np.empty_like(theta)
        for k in range(theta.size):
            tp, tm = theta.copy(), theta.copy()
            tp[k] += fd_step
            tm[k] -= fd_step
            g_theta[k] = (cost_fn(ctx, energy, ctx.ansatz.run(tp))
                          - cost_fn(ctx, energy, ctx.ansatz.run(tm))) / (2 * fd_step)
        psi = ctx.ansatz.run(theta)
        pf = np.vdot(psi, ctx.residual(energy, psi))
        g_r, g_i = -2 * pf.real, -2 * pf.imag
    else:
        raise ValueError(f"unknown gradient method {method!r}")
    return np.concatenate([g_theta, [g_r, g_i]])
