"""BFGS minimizer and the two-stage gap drivers (plain and degenerate scan)."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .cost import CostContext, evaluate
from .liouvillian import LindbladModel, VectorizedLiouvillian, default_delta_e, vectorize
from .pauli import CapacityError

logger = logging.getLogger(__name__)

NONZERO_THRESHOLD = 1e-3
RESTART_COST = 1e-4


class OptimizationError(FloatingPointError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class OptimizerOptions:
    max_iterations: int = 2000
    grad_tol: float = 1e-8
    cost_tol: float = 1e-10
    fd_step: float = 1e-5
    seed: int = 0
    theta_init_scale: float = 0.1
    gradient: str = "adjoint"
    restart_cost: float = RESTART_COST

    def __post_init__(self):
        for name in ("grad_tol", "cost_tol", "fd_step", "theta_init_scale", "restart_cost"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.gradient not in ("adjoint", "fd"):
            raise ValueError("gradient must be 'adjoint' or 'fd'")


@dataclass
class IterationRecord:
    stage: str
    step: int
    cost: float
    E_r: float
    E_i: float
    grad_norm: float
    fidelity: float | None = None
    offset_m: int = 0


@dataclass
class GapResult:
    E_r_final: float
    E_i_final: float
    theta_final: np.ndarray
    gap: float
    converged: bool
    stage_traces: list[IterationRecord] = field(default_factory=list)
    offsets_tried: list[float] = field(default_factory=list)
    final_cost: float = float("nan")
    pretrain_cost: float = float("nan")
    iterations: int = 0
    attempts: int = 1
    kappa: float = float("nan")
    delta_e: float | None = None

    @property
    def eigenvalue(self) -> complex:
        return complex(self.E_r_final, self.E_i_final)


@dataclass
class BFGSTrace:
    step: int
    f: float
    grad_norm: float
    x: np.ndarray


def bfgs_minimize(objective: Callable[[np.ndarray], tuple[float, np.ndarray]], x0,
                  opts: OptimizerOptions = OptimizerOptions(),
                  callback: Callable[[BFGSTrace], None] | None = None):
    """Minimize ``objective(x) -> (f, grad)`` with BFGS and Armijo backtracking.

    Returns ``(x_star, f_star, trace)``; ``trace[0]`` is the starting point.
    Stops on ``|grad| < grad_tol``, ``|df| < cost_tol`` or ``max_iterations``.
    """
    c1, shrink, max_halvings = 1e-4, 0.5, 60
    x = np.array(x0, dtype=float)
    f, g = objective(x)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise OptimizationError("non-finite objective at the starting point", x.copy())
    n = x.size
    hinv = np.eye(n)
    first = True
    trace = [BFGSTrace(0, float(f), float(np.linalg.norm(g)), x.copy())]
    if callback:
        callback(trace[-1])
    for it in range(1, opts.max_iterations + 1):
        gnorm = np.linalg.norm(g)
        if gnorm < opts.grad_tol:
            break
        p = -hinv @ g
        slope = g @ p
        if slope >= 0:
            hinv = np.eye(n)
            p, slope = -g, -gnorm ** 2
        alpha = min(1.0, 1.0 / gnorm) if first else 1.0
        for _ in range(max_halvings):
            x_new = x + alpha * p
            f_new, g_new = objective(x_new)
            if not np.isfinite(f_new):
                raise OptimizationError("non-finite objective during line search", x_new)
            if f_new <= f + c1 * alpha * slope:
                break
            alpha *= shrink
        else:
            if not first and np.any(hinv != np.eye(n)):
                # stale curvature; retry from steepest descent once
                hinv = np.eye(n)
                first = True
                continue
            logger.debug("line search failed at iteration %d", it)
            break
        s, y = x_new - x, g_new - g
        sy = s @ y
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if first:
                hinv = np.eye(n) * (sy / (y @ y))
            rho = 1.0 / sy
            hy = hinv @ y
            hinv = (hinv - rho * (np.outer(s, hy) + np.outer(hy, s))
                    + (rho ** 2 * (y @ hy) + rho) * np.outer(s, s))
            first = False
        df = f - f_new
        x, f, g = x_new, f_new, g_new
        trace.append(BFGSTrace(it, float(f), float(np.linalg.norm(g)), x.copy()))
        if callback:
            callback(trace[-1])
        if abs(df) < opts.cost_tol:
            break
    return x, float(f), trace


def _pretrain(ctx, theta0, e_r0, e_i0, opts, fidelity, offset_m):
    n_theta = theta0.size
    records = []

    def objective(x):
        cost, g_theta, _, g_i, _ = evaluate(ctx, x[:n_theta], e_r0, x[n_theta], penalized=True)
        if opts.gradient == "fd":
            g_theta = _fd_theta(ctx, x[:n_theta], complex(e_r0, x[n_theta]), True, opts.fd_step)
        return cost, np.append(g_theta, g_i)

    def record(t: BFGSTrace):
        fid = fidelity(ctx.ansatz.run(t.x[:n_theta])) if fidelity else None
        records.append(IterationRecord("pretrain", t.step, t.f, e_r0, float(t.x[n_theta]),
                                       t.grad_norm, fid, offset_m))

    x, f, _ = bfgs_minimize(objective, np.append(theta0, e_i0), opts, record)
    return x[:n_theta], float(x[n_theta]), f, records


def _main_train(ctx, theta0, e_r0, e_i0, opts, fidelity, offset_m):
    n_theta = theta0.size
    records = []

    def objective(x):
        cost, g_theta, g_r, g_i, _ = evaluate(ctx, x[:n_theta], x[n_theta], x[n_theta + 1],
                                              penalized=False)
        if opts.gradient == "fd":
            g_theta = _fd_theta(ctx, x[:n_theta], complex(x[n_theta], x[n_theta + 1]), False,
                                opts.fd_step)
        return cost, np.concatenate([g_theta, [g_r, g_i]])

    def record(t: BFGSTrace):
        fid = fidelity(ctx.ansatz.run(t.x[:n_theta])) if fidelity else None
        records.append(IterationRecord("main", t.step, t.f, float(t.x[n_theta]),
                                       float(t.x[n_theta + 1]), t.grad_norm, fid, offset_m))

    x, f, _ = bfgs_minimize(objective, np.concatenate([theta0, [e_r0, e_i0]]), opts, record)
    return x[:n_theta], float(x[n_theta]), float(x[n_theta + 1]), f, records


def _fd_theta(ctx, theta, energy, penalized, h):
    from .cost import cost_gradient
    return cost_gradient(ctx, energy, theta, penalized, method="fd", fd_step=h)[:-2]


def _fidelity_fn(liouv: VectorizedLiouvillian, track: bool):
    if not track:
        return None
    from .ed import excited_basis
    try:
        q = excited_basis(liouv)
    except CapacityError:
        return None
    qh = q.conj().T

    def fid(psi):
        proj = qh @ psi
        return float(np.vdot(proj, proj).real)
    return fid


def two_stage(ctx: CostContext, e_r0: float, opts: OptimizerOptions, rng: np.random.Generator,
              fidelity=None, offset_m: int = 0) -> GapResult:
    """One pre-training plus main-training pass from a fresh random start."""
    theta0 = rng.uniform(-opts.theta_init_scale, opts.theta_init_scale,
                         ctx.ansatz.parameter_count)
    theta1, e_i1, c1, rec1 = _pretrain(ctx, theta0, e_r0, 0.0, opts, fidelity, offset_m)
    theta2, e_r, e_i, c2, rec2 = _main_train(ctx, theta1, e_r0, e_i1, opts, fidelity, offset_m)
    converged = bool(c2 <= opts.restart_cost)
    return GapResult(
        E_r_final=e_r, E_i_final=e_i, theta_final=theta2, gap=abs(e_r), converged=converged,
        stage_traces=rec1 + rec2, offsets_tried=[e_r0], final_cost=c2, pretrain_cost=c1,
        iterations=len(rec1) + len(rec2) - 2, kappa=ctx.kappa,
    )


def _context(model, kappa, n_blocks) -> CostContext:
    liouv = model if isinstance(model, VectorizedLiouvillian) else vectorize(model)
    return CostContext.create(liouv, kappa=kappa, n_blocks=n_blocks)


def _solve(ctx, opts, e_r0, offset_m, rng, fidelity) -> GapResult:
    result = two_stage(ctx, e_r0, opts, rng, fidelity, offset_m)
    if not result.converged:
        logger.info("final cost %.3g above %.1g, restarting once", result.final_cost,
                    opts.restart_cost)
        retry = two_stage(ctx, e_r0, opts, rng, fidelity, offset_m)
        retry.attempts = 2
        if retry.converged or retry.final_cost < result.final_cost:
            result = retry
        else:
            result.attempts = 2
    return result


def solve_gap(model: LindbladModel, opts: OptimizerOptions = OptimizerOptions(), *,
              kappa: float | None = None, n_blocks: int | None = None,
              track_fidelity: bool = True) -> GapResult:
    """Pre-train at frozen ``E_r = 0`` with the Bell penalty, then train freely.

    A run whose final variance exceeds ``opts.restart_cost`` is retried once
    from a fresh random start.
    """
    ctx = _context(model, kappa, n_blocks)
    fidelity = _fidelity_fn(ctx.liouvillian, track_fidelity)
    return _solve(ctx, opts, 0.0, 0, np.random.default_rng(opts.seed), fidelity)


def solve_gap_degenerate(model: LindbladModel, delta_e: float | None = None,
                         opts: OptimizerOptions = OptimizerOptions(), max_offsets: int = 10, *,
                         kappa: float | None = None, n_blocks: int | None = None,
                         track_fidelity: bool = True,
                         threshold: float = NONZERO_THRESHOLD) -> GapResult:
    """Scan ``E_r0 = -m * delta_e`` for ``m = 0, 1, ...`` until ``|E_r| > threshold``.

    Each offset starts from fresh random angles.  ``max_offsets`` bounds the
    number of offsets tried.
    """
    ctx = _context(model, kappa, n_blocks)
    if delta_e is None:
        delta_e = default_delta_e(ctx.liouvillian)
    if not delta_e > 0:
        raise ValueError("delta_e must be > 0")
    if max_offsets < 1:
        raise ValueError("max_offsets must be >= 1")
    fidelity = _fidelity_fn(ctx.liouvillian, track_fidelity)
    traces, offsets, total = [], [], 0
    for m in range(max_offsets):
        e_r0 = -m * delta_e
        result = _solve(ctx, opts, e_r0, m, np.random.default_rng([opts.seed, m]), fidelity)
        traces.extend(result.stage_traces)
        offsets.append(e_r0)
        total += result.iterations
        logger.info("offset %d (E_r0=%.4g): E_r=%.6g cost=%.3g", m, e_r0, result.E_r_final,
                    result.final_cost)
        if result.converged and abs(result.E_r_final) > threshold:
            break
    else:
        result = replace(result, converged=False)
    return replace(result, stage_traces=traces, offsets_tried=offsets, iterations=total,
                   delta_e=delta_e)
