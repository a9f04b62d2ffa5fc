import numpy as np
import pytest

from liouvgap.config import ConfigError, RunConfig, build_model, load_config, parse_config
from liouvgap.liouvillian import build_xxz_model, vectorize


def _write(tmp_path, text):
    p = tmp_path / "run.yaml"
    p.write_text(text)
    return p


def test_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, "model:\n  N: 2\n  Jz: 0.5\n"))
    assert cfg.seed == 0 and cfg.block_count is None and cfg.gradient == "adjoint"
    assert cfg.model == {"kind": "xxz", "N": 2, "Jz": 0.5, "gamma": 1.0, "jump": "lowering"}
    assert cfg.options().max_iterations == 2000


def test_overrides_win(tmp_path):
    cfg = load_config(_write(tmp_path, "model: {N: 1}\nseed: 3\n"), {"seed": 9, "workers": None})
    assert cfg.seed == 9


def test_custom_model_matches_builder():
    block = {"kind": "custom", "N": 2,
             "hamiltonian": "(1,0) XX; (1,0) YY; (0.5,0) ZZ",
             "jumps": [{"rate": 1.0, "op": "(0.5,0) XI; (0,-0.5) YI"},
                       {"rate": 1.0, "op": "(0.5,0) IX; (0,-0.5) IY"}]}
    cfg = parse_config({"model": block})
    ours = vectorize(cfg.build_model()).to_dense()
    np.testing.assert_allclose(ours, vectorize(build_xxz_model(2, 0.5, 1.0)).to_dense(), atol=1e-14)
    assert build_model(cfg.model).hint == "custom"


@pytest.mark.parametrize("data,field", [
    ({}, "model"),
    ({"model": {"Jz": 1}}, "model.N"),
    ({"model": {"N": 0}}, "model.N"),
    ({"model": {"N": 2, "gamma": -1}}, "model.gamma"),
    ({"model": {"N": 2, "jump": "raising"}}, "model.jump"),
    ({"model": {"N": 2, "kind": "ising"}}, "model.kind"),
    ({"model": {"N": 2}, "grad_tol": 0}, "grad_tol"),
    ({"model": {"N": 2}, "block_count": 1.5}, "block_count"),
    ({"model": {"N": 2}, "gradient": "exact"}, "gradient"),
    ({"model": {"N": 2}, "track_fidelity": "yes"}, "track_fidelity"),
    ({"model": {"N": 1, "kind": "custom", "hamiltonian": "(0,1) X"}}, "model"),
])
def test_field_diagnostics(data, field):
    with pytest.raises(ConfigError) as err:
        parse_config(data)
    assert err.value.field == field
    assert field in str(err.value)


def test_unknown_key():
    with pytest.raises(ConfigError, match="unknown"):
        parse_config({"model": {"N": 1}, "learning_rate": 0.1})


def test_yaml_error_has_line(tmp_path):
    with pytest.raises(ConfigError) as err:
        load_config(_write(tmp_path, "model:\n  N: 2\n  Jz: [1, 2\nseed: 0\n"))
    assert err.value.line is not None and "line" in str(err.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_as_dict_round_trip():
    cfg = parse_config({"model": {"N": 2}, "kappa": 2.0, "workers": 1})
    assert RunConfig(**cfg.as_dict()) == cfg
