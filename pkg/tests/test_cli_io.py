import json
import math

import numpy as np
import pytest

from twofluid.cli import EXIT_BLOWUP, EXIT_CONFIG, EXIT_OK, main
from twofluid.config import ConfigError, RunConfig, config_from_dict, parse_config
from twofluid.diagnostics import COLUMNS_2D, divergence_residual
from twofluid.dynamics import NsmState, PhysicalParams
from twofluid.io import SnapshotError, read_series, read_snapshot, write_series, write_snapshot, write_summary
from twofluid.scenarios import SCENARIOS, plane_wave, scenario, scenario_names, taylor_green
from twofluid.spectral import Grid
from twofluid.thresholds import compute_constants, initial_data_norms, smallness_threshold

MINIMAL = {"dimension": 2, "N": 64, "dt": 1e-3, "t_end": 1.0, "scenario": "taylor-green"}


def write_toml(path, text):
    path.write_text(text)
    return path


# config


def test_minimal_config_defaults():
    cfg = config_from_dict(MINIMAL)
    assert cfg.L == pytest.approx(2 * math.pi) and cfg.c == 1.0 and cfg.s1 == 0.5 and cfg.cadence == 10
    assert cfg.formulation == "physical" and cfg.scheme == "rk4-integrating-factor"
    assert cfg.physical_params() == PhysicalParams()


def test_config_rejections():
    with pytest.raises(ConfigError, match="N must be even"):
        config_from_dict({**MINIMAL, "N": 63})
    with pytest.raises(ConfigError, match="unknown key"):
        config_from_dict({**MINIMAL, "grid_size": 3})
    with pytest.raises(ConfigError, match="params.gamma"):
        config_from_dict({**MINIMAL, "params": {"gamma": 1.0}})
    with pytest.raises(ConfigError, match="missing required"):
        config_from_dict({"dimension": 2})
    with pytest.raises(ConfigError, match="must be an integer"):
        config_from_dict({**MINIMAL, "N": 64.0})
    with pytest.raises(ConfigError, match="scenario"):
        config_from_dict({**MINIMAL, "scenario": "nope"})
    with pytest.raises(ConfigError, match="k_max"):
        config_from_dict({**MINIMAL, "formulation": "truncated"})
    with pytest.raises(ConfigError, match="params"):
        config_from_dict({**MINIMAL, "params": {"n": -1.0}})


def test_cfl_rejection_names_limit():
    limit = 0.5 * (2 * math.pi / 64) * math.sqrt(0.25)
    with pytest.raises(ConfigError, match=f"{limit:.6g}"):
        config_from_dict({**MINIMAL, "dt": 0.03, "params": {"eps0": 0.5, "mu0": 0.5}})


def test_parse_config_file(tmp_path):
    path = write_toml(tmp_path / "run.toml", """
dimension = 2
N = 32
dt = 0.001
t_end = 0.01
scenario = "3d-weak"
seed = 4
[params]
alpha = 0.5
""")
    cfg = parse_config(path)
    p = cfg.physical_params()
    assert p.alpha == 0.5 and p.nu_minus == 0.1 and cfg.seed == 4
    with pytest.raises(ConfigError, match="malformed"):
        parse_config(write_toml(tmp_path / "bad.toml", "dimension = = 2"))
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "missing.toml")


# scenarios


@pytest.mark.parametrize("name", scenario_names())
def test_scenarios_are_admissible(name):
    d = 2 if name in ("2d-gwp", "maxwell-wave", "heat-decay", "taylor-green", "bulk-current-equivalence") else 3
    grid = Grid(d, 16 if d == 2 else 8)
    a = scenario(name, grid, seed=1).state
    b = scenario(name, grid, seed=1).state
    assert max(divergence_residual(a).values()) < 1e-13
    assert all(np.array_equal(f.coeffs, g.coeffs) for f, g in zip(a.slots, b.slots))
    assert scenario(name, grid).overrides == SCENARIOS[name][1]


def test_scenario_closed_forms():
    grid = Grid(2, 16)
    mw = scenario("maxwell-wave", grid).state
    E, B = plane_wave(grid)
    assert (mw.E - E).norm() == 0 and (mw.B - B).norm() == 0 and mw.v_plus.norm() == 0
    tg = scenario("taylor-green", grid).state
    assert (tg.v_minus - taylor_green(grid)).norm() == 0 and (tg.v_plus - taylor_green(grid)).norm() == 0
    with pytest.raises(ValueError):
        scenario("2d-gwp", Grid(3, 8))
    with pytest.raises(ValueError):
        scenario("unknown", grid)


def test_small_data_scenario_scaling():
    grid = Grid(3, 8)
    s = scenario("3d-small", grid, seed=2).state
    threshold = smallness_threshold(compute_constants(PhysicalParams())[2])
    assert initial_data_norms(s).combined == pytest.approx(0.9 * threshold, rel=1e-12)
    with pytest.raises(ValueError):
        scenario("3d-small", grid, params=PhysicalParams(alpha=0.0))


# io


def test_header_only_csv(tmp_path):
    path = write_series(tmp_path / "s.csv", COLUMNS_2D, [])
    header, rows = read_series(path)
    assert header == list(COLUMNS_2D) and rows == []


def test_series_round_trip(tmp_path):
    rows = [{"a": 0.1, "b": 1 / 3}, {"a": 2.0, "b": math.inf}]
    header, back = read_series(write_series(tmp_path / "s.csv", ["a", "b"], rows))
    assert back == rows


def test_snapshot_round_trip(tmp_path):
    grid = Grid(3, 8)
    s = scenario("3d-weak", grid, seed=3).state
    s = NsmState(0.125, *s.slots)
    back = read_snapshot(write_snapshot(tmp_path / "x.snap", s))
    assert back.t == 0.125 and back.grid == grid
    assert all(np.array_equal(f.coeffs, g.coeffs) for f, g in zip(back.slots, s.slots))
    raw = (tmp_path / "x.snap").read_bytes()
    (tmp_path / "cut.snap").write_bytes(raw[:-16])
    with pytest.raises(SnapshotError, match="payload"):
        read_snapshot(tmp_path / "cut.snap")
    (tmp_path / "junk.snap").write_bytes(b"hello\nEND\n")
    with pytest.raises(SnapshotError):
        read_snapshot(tmp_path / "junk.snap")


def test_summary_serializes_non_finite(tmp_path):
    path = write_summary(tmp_path / "s.json", {"C": math.inf, "x": np.float64(1.5), "ok": np.bool_(True)})
    assert json.loads(path.read_text()) == {"C": "inf", "x": 1.5, "ok": True}


def test_write_to_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        write_series(tmp_path / "missing" / "s.csv", ["a"], [])


# cli


def small_run(tmp_path, name="run", **extra):
    lines = [
        'dimension = 2', 'N = 16', 'dt = 0.001', 't_end = 0.02', 'scenario = "2d-gwp"', 'cadence = 5',
        f'output_dir = "{tmp_path / name}"',
    ]
    lines += [f"{k} = {v!r}".replace("'", '"') for k, v in extra.items()]
    return write_toml(tmp_path / f"{name}.toml", "\n".join(lines) + "\n")


def test_cli_run_outputs_and_determinism(tmp_path, capsys):
    assert main(["run", str(small_run(tmp_path, "a"))]) == EXIT_OK
    assert main(["run", str(small_run(tmp_path, "b"))]) == EXIT_OK
    a, b = tmp_path / "a", tmp_path / "b"
    for name in ("series.csv", "initial.snap", "final.snap", "summary.json"):
        assert (a / name).exists()
    assert (a / "series.csv").read_bytes() == (b / "series.csv").read_bytes()
    header, rows = read_series(a / "series.csv")
    assert header == list(COLUMNS_2D) and len(rows) == 5
    summary = json.loads((a / "summary.json").read_text())
    assert summary["steps"] == 20 and summary["reason"] == "t_end reached"
    assert "t_end reached" in capsys.readouterr().out


def test_cli_summary_has_threshold_report(tmp_path):
    cfg = write_toml(tmp_path / "t.toml", f"""
dimension = 3
N = 8
dt = 0.001
t_end = 0.002
scenario = "3d-small"
output_dir = "{tmp_path / 'out'}"
""")
    assert main(["run", str(cfg)]) == EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    rep = summary["thresholds"]
    assert rep["case"] == "4C>=1" and rep["threshold"] == pytest.approx(0.125)
    assert rep["data_norm"] == pytest.approx(0.9 * 0.125)


def test_cli_exit_codes(tmp_path, capsys):
    bad = write_toml(tmp_path / "bad.toml", "dimension = 2\nN = 15\n")
    assert main(["run", str(bad)]) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err
    blow = write_toml(tmp_path / "blow.toml", f"""
dimension = 2
N = 16
dt = 0.001
t_end = 1.0
scenario = "heat-decay"
scheme = "rk4-plain"
output_dir = "{tmp_path / 'blow'}"
[params]
nu_minus = 1e6
nu_plus = 1e6
""")
    with np.errstate(all="ignore"):
        assert main(["run", str(blow)]) == EXIT_BLOWUP


def test_cli_listing_thresholds_and_probe(tmp_path, capsys):
    assert main(["scenarios"]) == EXIT_OK
    out = capsys.readouterr().out
    assert all(name in out for name in scenario_names())
    cfg = write_toml(tmp_path / "thr.toml", 'dimension = 3\nN = 8\ndt = 0.001\nt_end = 0.0\nscenario = "3d-small"\n')
    assert main(["thresholds", str(cfg)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["C"] == 1.0
    probe_cfg = write_toml(tmp_path / "probe.toml", f"""
dimension = 2
N = 16
dt = 0.002
t_end = 1.0
scenario = "maxwell-wave"
output_dir = "{tmp_path / 'probe'}"
""")
    assert main(["probe", "product-sobolev", str(probe_cfg)]) == EXIT_OK
    text = (tmp_path / "probe" / "probe_product-sobolev.csv").read_text().splitlines()
    assert text[0] == "study,tag,sample,lhs,rhs,ratio" and len(text) == 21
    assert "max ratio" in capsys.readouterr().out


def test_run_config_as_dict_round_trip():
    cfg = config_from_dict(MINIMAL)
    assert RunConfig(**cfg.as_dict()) == cfg
