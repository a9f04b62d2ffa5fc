"""Run configuration files.

A config is a YAML mapping.  The ``model`` block is the only nested section;
everything else is a flat ``key: value`` pair::

    model:
      kind: xxz          # xxz | custom
      N: 2
      Jz: 0.5
      gamma: 1.0
      jump: lowering     # lowering | dephasing
    seed: 0
    block_count: 4       # default 2N
    kappa: 4.0           # default N^2 (xxz) or s^2
    delta_e: 0.3         # degenerate scan only; default from the Hermitian part
    max_offsets: 10
    max_iterations: 2000
    grad_tol: 1.0e-8
    cost_tol: 1.0e-10
    fd_step: 1.0e-5
    theta_init_scale: 0.1
    gradient: adjoint    # adjoint | fd
    track_fidelity: true
    workers: 1

A custom model gives ``N``, a ``hamiltonian`` in the textual Pauli notation
(``(re,im) LABEL`` terms separated by newlines or ``;``) and a list of
``jumps`` entries, each ``{rate: <float>, op: <text>}``.
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

import yaml

from .liouvillian import LindbladModel, build_xxz_model
from .optimizer import OptimizerOptions
from .pauli import PauliSum


class ConfigError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


_MODEL_KEYS = {"kind", "N", "Jz", "gamma", "jump", "hamiltonian", "jumps"}
_RUN_KEYS = {
    "seed", "block_count", "kappa", "delta_e", "max_offsets", "max_iterations", "grad_tol",
    "cost_tol", "fd_step", "theta_init_scale", "gradient", "track_fidelity", "workers",
}


@dataclass
class RunConfig:
    model: dict
    seed: int = 0
    block_count: int | None = None
    kappa: float | None = None
    delta_e: float | None = None
    max_offsets: int = 10
    max_iterations: int = 2000
    grad_tol: float = 1e-8
    cost_tol: float = 1e-10
    fd_step: float = 1e-5
    theta_init_scale: float = 0.1
    gradient: str = "adjoint"
    track_fidelity: bool = True
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)

    def build_model(self) -> LindbladModel:
        return build_model(self.model)

    def options(self) -> OptimizerOptions:
        return OptimizerOptions(
            max_iterations=self.max_iterations, grad_tol=self.grad_tol, cost_tol=self.cost_tol,
            fd_step=self.fd_step, seed=self.seed, theta_init_scale=self.theta_init_scale,
            gradient=self.gradient,
        )

    def as_dict(self) -> dict:
        return asdict(self)


def _num(value, name, kind=float, minimum=None, strict=False):
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}", name)
    try:
        out = kind(value) if kind is int else float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {value!r}", name) from None
    if kind is int and out != float(value):
        raise ConfigError(f"expected an integer, got {value!r}", name)
    if minimum is not None and (out <= minimum if strict else out < minimum):
        op = ">" if strict else ">="
        raise ConfigError(f"must be {op} {minimum}, got {value!r}", name)
    return out


def _check_model_block(block) -> dict:
    if not isinstance(block, dict):
        raise ConfigError("must be a mapping", "model")
    unknown = set(block) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)}", "model")
    kind = block.get("kind", "xxz")
    out = {"kind": kind}
    if "N" not in block:
        raise ConfigError("missing", "model.N")
    out["N"] = _num(block["N"], "model.N", int, 1)
    if kind == "xxz":
        out["Jz"] = _num(block.get("Jz", 1.0), "model.Jz")
        out["gamma"] = _num(block.get("gamma", 1.0), "model.gamma", float, 0)
        out["jump"] = block.get("jump", "lowering")
        if out["jump"] not in ("lowering", "dephasing"):
            raise ConfigError(f"must be 'lowering' or 'dephasing', got {out['jump']!r}",
                              "model.jump")
    elif kind == "custom":
        out["hamiltonian"] = str(block.get("hamiltonian", ""))
        jumps = block.get("jumps", [])
        if not isinstance(jumps, list):
            raise ConfigError("must be a list", "model.jumps")
        out["jumps"] = []
        for k, j in enumerate(jumps):
            if not isinstance(j, dict) or "op" not in j:
                raise ConfigError("each entry needs 'rate' and 'op'", f"model.jumps[{k}]")
            rate = _num(j.get("rate", 1.0), f"model.jumps[{k}].rate", float, 0)
            out["jumps"].append({"rate": rate, "op": str(j["op"])})
    else:
        raise ConfigError(f"must be 'xxz' or 'custom', got {kind!r}", "model.kind")
    try:
        build_model(out)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), "model") from None
    return out


def build_model(block: dict) -> LindbladModel:
    if block["kind"] == "xxz":
        return build_xxz_model(block["N"], block["Jz"], block["gamma"], block["jump"])
    n = block["N"]
    h = PauliSum.from_text(block.get("hamiltonian", ""), n_qubits=n)
    jumps = tuple((j["rate"], PauliSum.from_text(j["op"], n_qubits=n)) for j in block["jumps"])
    return LindbladModel(n, h.collect(), jumps, hint="custom")


def parse_config(data: dict, overrides: dict | None = None) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    data = dict(data)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "model" not in data:
        raise ConfigError("missing", "model")
    unknown = set(data) - _RUN_KEYS - {"model"}
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)}")
    kw = {"model": _check_model_block(data["model"])}
    if "seed" in data:
        kw["seed"] = _num(data["seed"], "seed", int, 0)
    for name in ("block_count", "max_offsets", "max_iterations", "workers"):
        if name in data and data[name] is not None:
            kw[name] = _num(data[name], name, int, 1)
    for name in ("grad_tol", "cost_tol", "fd_step", "theta_init_scale", "delta_e"):
        if name in data and data[name] is not None:
            kw[name] = _num(data[name], name, float, 0, strict=True)
    if data.get("kappa") is not None:
        kw["kappa"] = _num(data["kappa"], "kappa", float, 0)
    if "gradient" in data:
        if data["gradient"] not in ("adjoint", "fd"):
            raise ConfigError("must be 'adjoint' or 'fd'", "gradient")
        kw["gradient"] = data["gradient"]
    if "track_fidelity" in data:
        if not isinstance(data["track_fidelity"], bool):
            raise ConfigError("must be true or false", "track_fidelity")
        kw["track_fidelity"] = data["track_fidelity"]
    return RunConfig(**kw)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"invalid YAML: {getattr(exc, 'problem', exc)}", line=line) from None
    if data is None:
        data = {}
    return parse_config(data, overrides)
