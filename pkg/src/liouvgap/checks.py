"""Self-check suite: algebraic, vectorization, spectral and cost invariants.

Every check returns ``(passed, detail)``; :func:`run_checks` times them and
collects a report.  Checks are deterministic (fixed seeds).
"""
from __future__ import annotations

import time
from functools import lru_cache
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cost import CostContext, cost_gradient, default_kappa, variance_cost, variance_operator
from .ed import dense_spectrum
from .liouvillian import (LindbladModel, bell_state, build_xxz_model, vectorize,
                          vectorize_density)
from .pauli import PauliString, PauliSum, sum_multiply
from .simulator import expectation


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def random_pauli_sum(rng, n_qubits, n_terms=6) -> PauliSum:
    terms = []
    for _ in range(n_terms):
        x = int(rng.integers(0, 1 << n_qubits))
        z = int(rng.integers(0, 1 << n_qubits))
        terms.append((complex(rng.normal(), rng.normal()), PauliString(n_qubits, x, z)))
    return PauliSum(n_qubits, terms)


def random_state(rng, n_qubits) -> np.ndarray:
    psi = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return psi / np.linalg.norm(psi)


def random_density(rng, dim) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_model(rng, n_spins=1, n_jumps=2) -> LindbladModel:
    h = random_pauli_sum(rng, n_spins, 4)
    h = ((h + h.adjoint()).scale(0.5)).collect()
    jumps = tuple((float(rng.uniform(0.1, 2.0)), random_pauli_sum(rng, n_spins, 3))
                  for _ in range(n_jumps))
    return LindbladModel(n_spins, h, jumps, hint="random")


def decay_model(gamma: float = 1.0) -> LindbladModel:
    return LindbladModel(1, PauliSum.zero(1), ((gamma, PauliSum.lowering(1, 0)),), hint="decay")


def reference_superoperator(model: LindbladModel) -> np.ndarray:
    """Liouvillian assembled directly from Kronecker products of dense matrices."""
    h = model.hamiltonian.to_dense()
    d = h.shape[0]
    eye = np.eye(d)
    # vec is column-major, so vec(A rho B) = kron(B.T, A) vec(rho)
    sup = -1j * np.kron(eye, h) + 1j * np.kron(h.T, eye)
    for g, op in model.jumps:
        lj = op.to_dense()
        ldl = lj.conj().T @ lj
        sup += g * (np.kron(lj.conj(), lj) - 0.5 * np.kron(eye, ldl) - 0.5 * np.kron(ldl.T, eye))
    return sup


def standard_models() -> list[LindbladModel]:
    models = [decay_model()]
    for n in (1, 2, 3, 4):
        models.append(build_xxz_model(n, 0.5, 1.0, "lowering"))
        models.append(build_xxz_model(n, 1.0, 1.0, "dephasing"))
    return models


@lru_cache(maxsize=1)
def _standard_liouvillians():
    return tuple(vectorize(m) for m in standard_models())


def _liouvillians(models):
    return [vectorize(m) for m in models] if models else _standard_liouvillians()


def check_algebra(seed=0, tol=1e-10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(20):
        n = 2 + trial % 2
        a, b, c = (random_pauli_sum(rng, n) for _ in range(3))
        da, db, dc = a.to_dense(), b.to_dense(), c.to_dense()
        worst = max(
            worst,
            np.abs(sum_multiply(a, b).to_dense() - da @ db).max(),
            np.abs(sum_multiply(sum_multiply(a, b), c).to_dense()
                   - sum_multiply(a, sum_multiply(b, c)).to_dense()).max(),
            np.abs(sum_multiply(a, b).adjoint().to_dense()
                   - sum_multiply(b.adjoint(), a.adjoint()).to_dense()).max(),
            np.abs(a.transpose().conjugate().to_dense() - a.adjoint().to_dense()).max(),
            np.abs(a.transpose().to_dense() - da.T).max(),
            np.abs(a.collect().to_dense() - da).max(),
        )
    return worst <= tol, f"max deviation {worst:.2e}"


def check_vec_identity(seed=1, n=100, tol=1e-10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        a, b = random_pauli_sum(rng, 1, 4), random_pauli_sum(rng, 1, 4)
        rho = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        lhs = (a.to_dense() @ rho @ b.to_dense()).flatten(order="F")
        rhs = a.tensor(b.transpose()).to_dense() @ rho.flatten(order="F")
        worst = max(worst, np.abs(lhs - rhs).max())
    return worst <= tol, f"max deviation {worst:.2e} over {n} instances"


def check_bell_annihilation(models=None, bell_fn: Callable[[int], np.ndarray] = bell_state,
                            tol=1e-10):
    worst = 0.0
    for liouv in _liouvillians(models):
        bell = bell_fn(liouv.source.n_spins)
        worst = max(worst, np.linalg.norm(liouv.adjoint_matrix() @ bell))
    return worst <= tol, f"max |L^dag B| = {worst:.2e}"


def check_trace_annihilation(seed=2, n=50, tol=1e-10):
    rng = np.random.default_rng(seed)
    liouv = vectorize(build_xxz_model(2, 0.5, 1.0))
    bra = bell_state(2).conj() @ liouv.matrix()
    worst = max(abs(bra @ vectorize_density(random_density(rng, 4))) for _ in range(n))
    return worst <= tol, f"max |<B|L|rho>| = {worst:.2e}"


def check_kronecker_consistency(seed=3, n=10, tol=1e-8):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        m = random_model(rng)
        ours = dense_spectrum(vectorize(m)).eigenvalues
        ref = np.linalg.eigvals(reference_superoperator(m))
        worst = max(worst, max(np.abs(ref - lam).min() for lam in ours))
        worst = max(worst, np.abs(vectorize(m).to_dense() - reference_superoperator(m)).max())
    return worst <= tol, f"max deviation {worst:.2e}"


def check_spectrum_sanity(models=None, tol=1e-9):
    worst_re, worst_zero = -np.inf, 0.0
    for liouv in _liouvillians(models):
        vals = dense_spectrum(liouv).eigenvalues
        worst_re = max(worst_re, vals.real.max())
        worst_zero = max(worst_zero, np.abs(vals).min())
    ok = worst_re <= tol and worst_zero <= tol
    return ok, f"max Re = {worst_re:.2e}, max min|lambda| = {worst_zero:.2e}"


def check_excited_bell_orthogonality(models=None, tol=1e-8):
    worst = 0.0
    for liouv in _liouvillians(models):
        spec = dense_spectrum(liouv)
        bell = bell_state(liouv.source.n_spins)
        nz = np.abs(spec.eigenvalues) > spec.tol
        worst = max(worst, np.abs(bell.conj() @ spec.right_eigenvectors[:, nz]).max())
    return worst <= tol, f"max |<B|rho_k>| = {worst:.2e}"


def check_variance_nonnegative(seed=4, n=1000):
    rng = np.random.default_rng(seed)
    ctx = CostContext.create(vectorize(build_xxz_model(2, 0.5, 1.0)))
    worst = min(
        variance_cost(ctx, complex(*rng.normal(scale=3, size=2)), random_state(rng, 4))
        for _ in range(n)
    )
    return worst >= -1e-12, f"min cost {worst:.3e} over {n} samples"


def check_expansion_equivalence(seed=5, n=20, tol=1e-10):
    rng = np.random.default_rng(seed)
    liouv = vectorize(build_xxz_model(2, 0.5, 1.0))
    ctx = CostContext.create(liouv)
    worst = 0.0
    for _ in range(n):
        e = complex(*rng.normal(size=2))
        psi = random_state(rng, 4)
        direct = variance_cost(ctx, e, psi)
        expanded = expectation(variance_operator(liouv, e), psi)
        worst = max(worst, abs(direct - expanded))
    return worst <= tol, f"max |direct - expanded| = {worst:.2e}"


def check_energy_gradient(seed=6, n=20, tol=1e-6, h=1e-6):
    rng = np.random.default_rng(seed)
    ctx = CostContext.create(vectorize(build_xxz_model(2, 0.5, 1.0)))
    worst = 0.0
    for _ in range(n):
        theta = rng.uniform(-np.pi, np.pi, ctx.ansatz.parameter_count)
        e = complex(*rng.normal(size=2))
        psi = ctx.ansatz.run(theta)
        g = cost_gradient(ctx, e, theta, penalized=True, method="adjoint")
        fd_r = (variance_cost(ctx, e + h, psi) - variance_cost(ctx, e - h, psi)) / (2 * h)
        fd_i = (variance_cost(ctx, e + 1j * h, psi) - variance_cost(ctx, e - 1j * h, psi)) / (2 * h)
        worst = max(worst, abs(g[-2] - fd_r), abs(g[-1] - fd_i))
    return worst <= tol, f"max |analytic - FD| = {worst:.2e}"


def check_theta_gradient(seed=7, n=3, tol=1e-6):
    rng = np.random.default_rng(seed)
    ctx = CostContext.create(vectorize(build_xxz_model(2, 0.5, 1.0)))
    worst = 0.0
    for _ in range(n):
        theta = rng.uniform(-np.pi, np.pi, ctx.ansatz.parameter_count)
        e = complex(*rng.normal(size=2))
        ga = cost_gradient(ctx, e, theta, penalized=True, method="adjoint")
        gf = cost_gradient(ctx, e, theta, penalized=True, method="fd")
        worst = max(worst, np.abs(ga - gf).max())
    return worst <= tol, f"max |adjoint - FD| = {worst:.2e}"


def check_default_kappa():
    liouv = vectorize(build_xxz_model(2, 0.5, 1.0))
    k = default_kappa(liouv)
    return k == 4.0, f"kappa(XXZ, N=2) = {k}"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "pauli_algebra_identities": check_algebra,
    "vec_identity_AρB": check_vec_identity,
    "bell_annihilation": check_bell_annihilation,
    "trace_annihilation": check_trace_annihilation,
    "kronecker_consistency": check_kronecker_consistency,
    "spectrum_sanity": check_spectrum_sanity,
    "excited_bell_orthogonality": check_excited_bell_orthogonality,
    "variance_nonnegative": check_variance_nonnegative,
    "expansion_equivalence": check_expansion_equivalence,
    "energy_gradient_vs_fd": check_energy_gradient,
    "theta_gradient_vs_fd": check_theta_gradient,
    "default_kappa": check_default_kappa,
}


def run_checks(checks: dict | None = None) -> list[CheckResult]:
    results = []
    for name, fn in (checks or CHECKS).items():
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  status  seconds  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  "
                     f"{r.seconds:7.3f}  {r.detail}")
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} checks passed")
    return "\n".join(lines)
