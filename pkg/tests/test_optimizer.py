import numpy as np
import pytest

from liouvgap.cost import CostContext, penalized_cost, variance_cost
from liouvgap.ed import exact_gap
from liouvgap.liouvillian import LindbladModel, build_xxz_model, vectorize
from liouvgap.optimizer import (OptimizationError, OptimizerOptions, bfgs_minimize, solve_gap,
                                solve_gap_degenerate)
from liouvgap.pauli import PauliSum

DECAY = LindbladModel(1, PauliSum.zero(1), ((1.0, PauliSum.lowering(1, 0)),))
XXZ2 = build_xxz_model(2, 0.5, 1.0)


def test_bfgs_quadratic(rng):
    a = rng.normal(size=6)
    x, f, trace = bfgs_minimize(lambda x: ((x - a) @ (x - a), 2 * (x - a)), rng.normal(size=6))
    np.testing.assert_allclose(x, a, atol=1e-8)
    assert len(trace) - 1 <= 20


def test_bfgs_rosenbrock():
    def rosen(v):
        x, y = v
        f = (1 - x) ** 2 + 100 * (y - x * x) ** 2
        return f, np.array([-2 * (1 - x) - 400 * x * (y - x * x), 200 * (y - x * x)])

    x, _, trace = bfgs_minimize(rosen, [-1.2, 1.0], OptimizerOptions(cost_tol=1e-16))
    np.testing.assert_allclose(x, [1, 1], atol=1e-6)
    costs = [t.f for t in trace]
    assert all(b <= a for a, b in zip(costs, costs[1:]))


def test_bfgs_non_finite():
    with pytest.raises(OptimizationError) as err:
        bfgs_minimize(lambda x: (np.nan, x), np.ones(2))
    np.testing.assert_array_equal(err.value.point, np.ones(2))


def test_options_validation():
    with pytest.raises(ValueError):
        OptimizerOptions(grad_tol=0)
    with pytest.raises(ValueError):
        OptimizerOptions(gradient="newton")


def test_decay_gap():
    r = solve_gap(DECAY)
    assert r.converged
    assert r.gap == pytest.approx(0.5, abs=1e-3)
    assert r.final_cost < 1e-6


@pytest.fixture(scope="module")
def xxz_run():
    return solve_gap(XXZ2, OptimizerOptions(seed=3))


def test_xxz_gap_matches_ed(xxz_run):
    ed_gap, _ = exact_gap(XXZ2)
    assert xxz_run.converged
    assert abs(xxz_run.gap - ed_gap) / ed_gap <= 1e-2
    assert xxz_run.gap == abs(xxz_run.E_r_final)


def test_stage_one_freezes_real_part(xxz_run):
    pre = [r for r in xxz_run.stage_traces if r.stage == "pretrain"]
    assert pre and all(r.E_r == 0.0 for r in pre)


def test_costs_non_increasing_within_stage(xxz_run):
    for stage in ("pretrain", "main"):
        costs = [r.cost for r in xxz_run.stage_traces if r.stage == stage]
        assert all(b <= a for a, b in zip(costs, costs[1:]))


def test_warm_start(xxz_run):
    pre = [r for r in xxz_run.stage_traces if r.stage == "pretrain"]
    main = [r for r in xxz_run.stage_traces if r.stage == "main"]
    ctx = CostContext.create(vectorize(XXZ2))
    rng = np.random.default_rng(3)
    theta0 = rng.uniform(-0.1, 0.1, ctx.ansatz.parameter_count)
    assert pre[0].cost == pytest.approx(penalized_cost(ctx, 0j, ctx.ansatz.run(theta0)), rel=1e-12)
    # stage 2 starts at the stage 1 optimum with the penalty removed
    assert main[0].step == 0 and main[0].E_i == pre[-1].E_i and main[0].E_r == 0.0
    assert main[0].cost <= pre[-1].cost + 1e-10


def test_warm_start_drops_exactly_the_penalty():
    from liouvgap.optimizer import _main_train, _pretrain
    ctx = CostContext.create(vectorize(XXZ2))
    opts = OptimizerOptions(max_iterations=30)
    theta0 = np.random.default_rng(0).uniform(-0.1, 0.1, ctx.ansatz.parameter_count)
    theta1, e_i1, c1, _ = _pretrain(ctx, theta0, 0.0, 0.0, opts, None, 0)
    psi = ctx.ansatz.run(theta1)
    penalty = c1 - variance_cost(ctx, complex(0, e_i1), psi)
    *_, rec2 = _main_train(ctx, theta1, 0.0, e_i1, opts, None, 0)
    assert rec2[0].cost == pytest.approx(c1 - penalty, abs=1e-10)


def test_deterministic_traces():
    a = solve_gap(DECAY, OptimizerOptions(seed=5))
    b = solve_gap(DECAY, OptimizerOptions(seed=5))
    assert a.stage_traces == b.stage_traces
    np.testing.assert_array_equal(a.theta_final, b.theta_final)


def test_fd_gradient_path_agrees():
    r = solve_gap(DECAY, OptimizerOptions(gradient="fd"), track_fidelity=False)
    assert r.gap == pytest.approx(0.5, abs=1e-3)


def test_fidelity_recorded(xxz_run):
    assert xxz_run.stage_traces[-1].fidelity > 0.99


def test_degenerate_driver_unique_steady_state():
    r = solve_gap_degenerate(DECAY, delta_e=0.3)
    assert r.offsets_tried == [0.0]
    assert r.gap == pytest.approx(solve_gap(DECAY).gap, abs=1e-6)


def test_degenerate_driver_gives_up():
    deph = build_xxz_model(2, 1.0, 1.0, "dephasing")
    r = solve_gap_degenerate(deph, delta_e=0.3, max_offsets=2, track_fidelity=False)
    assert r.offsets_tried == [0.0, -0.3]
    assert not r.converged
    assert r.gap <= 1e-3
    assert {t.offset_m for t in r.stage_traces} == {0, 1}


def test_degenerate_driver_rejects_bad_step():
    with pytest.raises(ValueError):
        solve_gap_degenerate(DECAY, delta_e=-1)
