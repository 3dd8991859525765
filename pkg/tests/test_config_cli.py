import csv
import json

import numpy as np
import pytest

from contact_triple import config as C
from contact_triple.cli import main
from contact_triple.errors import ConfigError
from contact_triple.scenarios import build_section, builtin_scenarios, get_scenario

DAMPED = {
    "bundle": {"kind": "trivial", "dim": 1},
    "hamiltonian": {"builtin": "damped-free", "params": {"m": 1.0, "lam": 0.5}},
    "initial": {"chart": "R", "x": [0.0], "p": [1.0], "z": 0.0},
    "integrator": {"method": "rk45"},
    "duration": 2.0,
}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return path


# ------------------------------------------------------------------ parsing


def test_parse_damped():
    cfg = C.parse_config(DAMPED)
    assert cfg.side == "hamiltonian" and cfg.chart == "R" and cfg.dim == 1
    assert cfg.duration == 2.0
    np.testing.assert_array_equal(cfg.state, [0.0, 1.0, 0.0])


def test_scenario_defaults():
    cfg = C.parse_config({"scenario": "moebius-hyperregular"})
    assert cfg.side == "lagrangian" and cfg.chart == "O"
    np.testing.assert_array_equal(cfg.state, [1.0, 1.0, 0.0])
    cfg = C.parse_config({"scenario": "damped-free", "duration": 3})
    assert cfg.duration == 3.0


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"duration": -1.0}, "duration"),
        ({"duration": "ten"}, "duration"),
        ({"colour": 1}, "colour"),
        ({"integrator": {"method": "rk45", "atol": 1e-9}}, "integrator.atol"),
        ({"integrator": {"method": "euler"}}, "integrator.method"),
        ({"integrator": {"method": "rk4"}}, "integrator.step"),
        ({"initial": {"chart": "R", "x": [0.0, 1.0], "p": [1.0], "z": 0.0}}, "initial.x"),
        ({"initial": {"chart": "Q", "x": [0.0], "p": [1.0], "z": 0.0}}, "initial.chart"),
        ({"hamiltonian": {"builtin": "damped-free", "params": {"mu": 1.0}}}, "hamiltonian.params.mu"),
        ({"hamiltonian": {"expr": "p1^2 +", "params": {}}}, "hamiltonian.expr"),
        ({"hamiltonian": {"expr": "p1^2 + q"}}, "hamiltonian.expr"),
        ({"hamiltonian": {"builtin": "quadratic-riemannian"}}, "hamiltonian.builtin"),
        ({"output": {"format": "xml"}}, "output.format"),
    ],
)
def test_schema_violations_name_the_field(patch, field):
    with pytest.raises(ConfigError) as info:
        C.parse_config({**DAMPED, **patch})
    assert info.value.field == field
    assert field in str(info.value)


def test_two_sides_rejected():
    with pytest.raises(ConfigError) as info:
        C.parse_config({**DAMPED, "lagrangian": {"builtin": "quadratic-riemannian"}})
    assert info.value.field == "side"


def test_expression_needs_trivial_bundle():
    doc = {
        "bundle": {"kind": "moebius"},
        "lagrangian": {"expr": "xd1^2/2 + t^2/2"},
        "initial": {"x": [1.0], "xd": [1.0], "t": 0.0},
        "duration": 1,
    }
    with pytest.raises(ConfigError) as info:
        C.parse_config(doc)
    assert info.value.field == "bundle.kind"


def test_expression_section_integrates():
    doc = {
        "herglotz": {"expr": "m*xd1^2/2 - lam*z", "params": {"m": 1, "lam": 0.5}},
        "initial": {"x": [0.0], "xd": [1.0], "z": 0.0},
        "duration": 1.0,
    }
    traj = C.integrate(C.parse_config(doc))
    ref = C.integrate(C.parse_config({"scenario": "damped-herglotz", "duration": 1.0}))
    np.testing.assert_allclose(traj.final[2], ref.final[2], atol=1e-12)


def test_moebius_home_chart_inferred():
    cfg = C.parse_config({"scenario": "moebius-hyperregular", "initial": {"x": [2.0], "xd": [1.0], "t": 0.0}})
    assert cfg.chart in ("O", "U")
    with pytest.raises(ConfigError):
        C.parse_config({"scenario": "moebius-hyperregular", "initial": {"chart": "O", "x": [4.0], "xd": [1.0], "t": 0.0}})


def test_bad_json_reports_line(tmp_path):
    path = write(tmp_path, '{\n  "duration": 1,\n  oops\n}')
    with pytest.raises(ConfigError) as info:
        C.load_config(path)
    assert info.value.field == "line 3"


def test_missing_file():
    with pytest.raises(ConfigError):
        C.load_config("/nonexistent/cfg.json")


# ------------------------------------------------------------------ catalog


def test_catalog():
    cat = builtin_scenarios()
    assert [s.name for s in cat] == ["quadratic-riemannian", "damped-free", "damped-herglotz", "moebius-hyperregular"]
    assert get_scenario("damped-free").params == {"m": 1.0, "lam": 0.5}
    m = get_scenario("moebius-hyperregular")
    assert m.initial == {"chart": "O", "x": [1.0], "xd": [1.0], "t": 0.0}
    with pytest.raises(ConfigError):
        get_scenario("nope")


def test_build_section_metric_params():
    h = build_section("quadratic-hamiltonian", 2, {"g11": 2.0, "g22": 4.0})
    assert h.value("R", [0, 0, 2.0, 2.0, 0]) == pytest.approx(0.5 * (4 / 2 + 4 / 4))
    with pytest.raises(ConfigError):
        build_section("moebius-hyperregular", 2)


# ------------------------------------------------------------------ CLI


def test_run_writes_csv(tmp_path, capsys):
    cfg = write(tmp_path, DAMPED)
    out = tmp_path / "traj.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    with out.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["s", "chart", "x1", "p1", "z"]
    s = [float(r[0]) for r in rows[1:]]
    assert s[0] == 0.0 and s[-1] == 2.0 and all(b > a for a, b in zip(s, s[1:]))
    assert (tmp_path / "traj.events.csv").exists()
    assert "wrote" in capsys.readouterr().out


def test_run_json(tmp_path):
    cfg = write(tmp_path, {**DAMPED, "output": {"path": str(tmp_path / "o.csv")}})
    out = tmp_path / "traj.json"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--format", "json"]) == 0
    doc = json.loads(out.read_text())
    assert set(doc) >= {"samples", "events"}
    assert isinstance(doc["samples"], list) and isinstance(doc["events"], list)


def test_run_uses_output_section(tmp_path):
    target = tmp_path / "here.json"
    cfg = write(tmp_path, {**DAMPED, "output": {"path": str(target), "format": "json"}})
    assert main(["run", "--config", str(cfg)]) == 0
    assert target.exists()


def test_run_config_error_exit_1(tmp_path, capsys):
    cfg = write(tmp_path, {**DAMPED, "duration": -1})
    assert main(["run", "--config", str(cfg)]) == 1
    assert "duration" in capsys.readouterr().err


def test_run_numerical_failure_exit_2(tmp_path, capsys):
    doc = {
        "lagrangian": {"expr": "xd1^2/2"},
        "initial": {"x": [0.0], "xd": [1.0], "t": 0.0},
        "duration": 1.0,
    }
    cfg = write(tmp_path, doc)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    assert "SingularHessian" in capsys.readouterr().err


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    for name in ("quadratic-riemannian", "damped-free", "damped-herglotz", "moebius-hyperregular"):
        assert name in out
    assert "m=1, lam=0.5" in out


def test_verify_exit_codes(capsys):
    assert main(["verify", "diagrams"]) == 0
    assert main(["verify", "diagrams", "--flip-mu-sign"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "R o alpha0 = beta0" in out


def test_verify_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        main(["verify", "everything"])


def test_legendre_quadratic_table(tmp_path, capsys):
    table = tmp_path / "tab.csv"
    doc = {
        "lagrangian": {"builtin": "quadratic-riemannian"},
        "region": {"chart": "R", "lower": [-1, -1, -1], "upper": [1, 1, 1]},
        "samples": 27,
        "table": {"path": str(table), "points_per_axis": 3},
    }
    assert main(["legendre", "--config", str(write(tmp_path, doc))]) == 0
    diag = json.loads(capsys.readouterr().out.split("wrote")[0])
    assert diag["verdict"] == "hyperregular-on-samples"
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 27
    for r in rows:
        # h(lambda_l(v)) = l(v) for the quadratic pair
        assert float(r["transform_value"]) == pytest.approx(float(r["source_value"]), abs=1e-12)


def test_legendre_damped_is_degenerate(tmp_path, capsys):
    doc = {"hamiltonian": {"builtin": "damped-free"}}
    assert main(["legendre", "--config", str(write(tmp_path, doc))]) == 1
    assert json.loads(capsys.readouterr().out)["verdict"] == "degenerate"


def test_legendre_config_errors(tmp_path):
    with pytest.raises(ConfigError) as info:
        C.parse_legendre_config({"lagrangian": {"builtin": "quadratic-riemannian"}, "region": {"chart": "R", "lower": [0, 0], "upper": [1, 1]}})
    assert info.value.field == "region.lower"
    with pytest.raises(ConfigError):
        C.parse_legendre_config({"herglotz": {"builtin": "damped-herglotz"}})


def test_shipped_configs_parse():
    from pathlib import Path

    root = Path(__file__).resolve().parent.parent / "configs"
    for path in sorted(root.glob("*.json")):
        if path.stem.startswith("legendre"):
            C.load_legendre_config(path)
        else:
            C.load_config(path)
