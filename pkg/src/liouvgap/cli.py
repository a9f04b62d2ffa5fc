"""Command line experiment runner.

Subcommands: ``gap``, ``gap-degenerate``, ``sweep``, ``ed`` and ``check``.
Outputs are CSV files whose leading ``#`` lines hold the resolved config.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import checks
from .config import ConfigError, RunConfig, load_config
from .cost import default_kappa
from .ed import ED_DIM_LIMIT, dense_spectrum
from .liouvillian import default_delta_e, vectorize
from .optimizer import GapResult, solve_gap, solve_gap_degenerate

logger = logging.getLogger("liouvgap")

TRACE_COLUMNS = ["stage", "step", "cost", "E_r", "E_i", "grad_norm", "fidelity"]
RESULT_COLUMNS = ["gap", "E_r_final", "E_i_final", "final_cost", "pretrain_cost", "converged",
                  "iterations", "attempts", "kappa", "ed_gap"]
DEGENERATE_EXTRA = ["delta_e", "offsets_tried"]
SWEEP_COLUMNS = ["value", "gap_vqa", "gap_ed", "rel_error", "iterations", "converged", "status"]
ED_COLUMNS = ["k", "re", "im"]

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED = 0, 1, 2


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_fmt(x) for x in v)
    return str(v)


def _header(cfg: dict) -> str:
    lines = []
    for key, value in cfg.items():
        if isinstance(value, dict):
            for k2, v2 in value.items():
                lines.append(f"# {key}.{k2} = {_fmt(v2) if not isinstance(v2, list) else v2}")
        else:
            lines.append(f"# {key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def write_csv(path, columns, rows, meta: dict):
    buf = io.StringIO()
    buf.write(_header(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def resolved(cfg: RunConfig, degenerate: bool = False) -> dict:
    """Config with the model-dependent defaults materialized."""
    model = cfg.build_model()
    liouv = vectorize(model)
    out = cfg.as_dict()
    out["block_count"] = cfg.block_count or 2 * model.n_spins
    out["kappa"] = cfg.kappa if cfg.kappa is not None else default_kappa(liouv)
    if degenerate:
        out["delta_e"] = cfg.delta_e if cfg.delta_e is not None else default_delta_e(liouv)
    else:
        out.pop("delta_e")
        out.pop("max_offsets")
    return out


def _ed_gap(model):
    liouv = vectorize(model)
    if (1 << liouv.n_qubits) > ED_DIM_LIMIT:
        return None
    return dense_spectrum(liouv).gap


def _trace_rows(result: GapResult):
    for r in result.stage_traces:
        yield {"stage": r.stage, "step": r.step, "cost": r.cost, "E_r": r.E_r, "E_i": r.E_i,
               "grad_norm": r.grad_norm, "fidelity": r.fidelity, "offset_m": r.offset_m}


def _result_row(result: GapResult, ed_gap):
    return {"gap": result.gap, "E_r_final": result.E_r_final, "E_i_final": result.E_i_final,
            "final_cost": result.final_cost, "pretrain_cost": result.pretrain_cost,
            "converged": result.converged, "iterations": result.iterations,
            "attempts": result.attempts, "kappa": result.kappa, "ed_gap": ed_gap,
            "delta_e": result.delta_e, "offsets_tried": result.offsets_tried}


def run_gap(cfg: RunConfig, out_dir: str, degenerate: bool = False) -> int:
    meta = resolved(cfg, degenerate)
    model = cfg.build_model()
    common = dict(kappa=meta["kappa"], n_blocks=meta["block_count"],
                  track_fidelity=cfg.track_fidelity)
    if degenerate:
        result = solve_gap_degenerate(model, meta["delta_e"], cfg.options(), cfg.max_offsets,
                                      **common)
        trace_cols = TRACE_COLUMNS + ["offset_m"]
        result_cols = RESULT_COLUMNS + DEGENERATE_EXTRA
    else:
        result = solve_gap(model, cfg.options(), **common)
        trace_cols, result_cols = TRACE_COLUMNS, RESULT_COLUMNS
    os.makedirs(out_dir, exist_ok=True)
    write_csv(os.path.join(out_dir, "trace.csv"), trace_cols, _trace_rows(result), meta)
    write_csv(os.path.join(out_dir, "result.csv"), result_cols,
              [_result_row(result, _ed_gap(model))], meta)
    print(f"gap = {result.gap!r}  converged = {result.converged}  "
          f"final cost = {result.final_cost:.3e}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _sweep_point(args):
    cfg, axis, value = args
    model_block = dict(cfg.model)
    model_block["N" if axis == "N" else "gamma"] = int(value) if axis == "N" else float(value)
    point = replace(cfg, model=model_block)
    try:
        model = point.build_model()
        result = solve_gap(model, point.options(), kappa=point.kappa,
                           n_blocks=point.block_count, track_fidelity=False)
        ed_gap = _ed_gap(model)
        rel = abs(result.gap - ed_gap) / ed_gap if ed_gap else None
        status = "ok" if result.converged else "failed"
        return {"value": value, "gap_vqa": result.gap, "gap_ed": ed_gap, "rel_error": rel,
                "iterations": result.iterations, "converged": result.converged,
                "status": status}
    except Exception as exc:  # one bad point must not sink the sweep
        logger.error("sweep point %s=%s failed: %s", axis, value, exc)
        return {"value": value, "status": "failed"}


def run_sweep(cfg: RunConfig, axis: str, values: list, out_dir: str) -> int:
    if axis not in ("gamma", "N"):
        raise ConfigError("must be 'gamma' or 'N'", "axis")
    if not values:
        raise ConfigError("at least one value is required", "values")
    if cfg.model.get("kind") != "xxz" and axis == "gamma":
        raise ConfigError("gamma sweeps need an xxz model", "axis")
    jobs = [(cfg, axis, v) for v in values]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(jobs))) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    meta = cfg.as_dict()
    meta.update({"axis": axis, "values": list(values)})
    meta.pop("delta_e")
    meta.pop("max_offsets")
    os.makedirs(out_dir, exist_ok=True)
    write_csv(os.path.join(out_dir, "sweep.csv"), SWEEP_COLUMNS, rows, meta)
    for r in rows:
        print(f"{axis}={r['value']}: gap={r.get('gap_vqa')} ed={r.get('gap_ed')} "
              f"rel_err={r.get('rel_error')} status={r['status']}")
    return EXIT_OK if all(r["status"] == "ok" for r in rows) else EXIT_NOT_CONVERGED


def run_ed(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    model = cfg.build_model()
    spec = dense_spectrum(vectorize(model))
    stream.write(f"# gap = {spec.gap!r}\n# degeneracy = {spec.zero_count}\n")
    stream.write(f"# defective = {spec.n_defective}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(ED_COLUMNS)
    for k, lam in enumerate(spec.eigenvalues):
        w.writerow([k, repr(float(lam.real)), repr(float(lam.imag))])
    return EXIT_OK


def run_check(stream=None) -> int:
    stream = stream or sys.stdout
    results = checks.run_checks()
    stream.write(checks.format_report(results) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_NOT_CONVERGED


def _values(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as a comma separated list", "values") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="liouvgap", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def run_flags(sp):
        sp.add_argument("--config", required=True, help="YAML run configuration")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", default=".", help="output directory (default: .)")
        sp.add_argument("--workers", type=int, help="worker processes for sweeps")

    run_flags(sub.add_parser("gap", help="two-stage variational gap solve"))
    deg = sub.add_parser("gap-degenerate", help="offset scan for degenerate steady states")
    run_flags(deg)
    deg.add_argument("--delta-e", type=float, dest="delta_e", help="offset increment")
    sw = sub.add_parser("sweep", help="sweep gamma or N, comparing with ED")
    run_flags(sw)
    sw.add_argument("--axis", required=True, choices=["gamma", "N"])
    sw.add_argument("--values", required=True, help="comma separated values, e.g. 0.5,1,1.5")
    ed_p = sub.add_parser("ed", help="print the exact spectrum and gap as CSV")
    ed_p.add_argument("--config", required=True)
    sub.add_parser("check", help="run the invariant self-check suite")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "check":
            return run_check()
        overrides = {k: getattr(args, k, None) for k in ("seed", "workers", "delta_e")}
        cfg = load_config(args.config, overrides)
        if args.command == "ed":
            return run_ed(cfg)
        if args.command == "sweep":
            return run_sweep(cfg, args.axis, _values(args.values), args.out)
        return run_gap(cfg, args.out, degenerate=args.command == "gap-degenerate")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
