import copy
import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from latwave import Field, LatticeSpec, random_field
from latwave.cli import main
from latwave.config import (
    ConfigError,
    load_document,
    p_label,
    parse_config,
    parse_growth_sweep,
    parse_kernel_sweep,
    parse_potential,
)
from latwave.experiments import load_field, save_field

INF = math.inf


def base_doc():
    return {
        "schema_version": 1,
        "model": "dnls",
        "lattice": {"d": 1, "N": 16, "h": 1.0},
        "params": {"sigma": 1.0, "lambda": 1,
                   "potential": {"kind": "zero"}},
        "initial": {"kind": "random", "seed": 5, "amplitude": 1.0},
        "integrator": {"kind": "strang", "tau": 0.01},
        "T": 0.2,
        "diagnostics": {"p_list": [1, 2, "inf"], "cadence": 0.05},
    }


def mutate(**paths):
    doc = base_doc()
    for dotted, value in paths.items():
        keys = dotted.split("__")
        node = doc
        for k in keys[:-1]:
            node = node[k]
        if value is ...:
            del node[keys[-1]]
        else:
            node[keys[-1]] = value
    return doc


# ---------------------------------------------------------------------------
# full-run config parsing


def test_parse_config_valid_document():
    cfg = parse_config(base_doc())
    assert cfg.model == "dnls"
    assert cfg.lattice == LatticeSpec(1, 16, 1.0)
    assert cfg.lam == 1 and cfg.sigma == 1.0
    assert cfg.integrator == "strang" and cfg.tau == 0.01
    assert cfg.p_list == (1.0, 2.0, INF)
    assert cfg.cadence == 0.05
    assert cfg.velocity is None
    assert cfg.echo == base_doc()


def test_parse_config_rejects_unknown_keys_everywhere():
    bad_docs = [
        {**base_doc(), "comment": "hi"},
        mutate(lattice__spacing=1.0),
        mutate(params__mass=1.0),
        mutate(params__potential__scale=2.0),
        mutate(initial__phase=0.0),
        mutate(integrator__dt=0.1),
        mutate(diagnostics__verbose=True),
    ]
    for doc in bad_docs:
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(doc)


def test_parse_config_schema_version():
    with pytest.raises(ConfigError, match="schema_version"):
        parse_config(mutate(schema_version=2))
    with pytest.raises(ConfigError, match="schema_version"):
        parse_config(mutate(schema_version=...))


def test_model_integrator_compatibility():
    with pytest.raises(ConfigError, match="incompatible"):
        parse_config(mutate(model="dkg", integrator={"kind": "strang", "tau": 0.01}))
    with pytest.raises(ConfigError, match="incompatible"):
        parse_config(mutate(integrator={"kind": "verlet"}))
    cfg = parse_config(mutate(model="dkg", params__lambda=-1,
                              integrator={"kind": "verlet"}))
    assert cfg.integrator == "verlet" and cfg.tau is None
    cfg = parse_config(mutate(model="linear-schrodinger", params__lambda=0,
                              integrator={"kind": "picard"}))
    assert cfg.integrator == "picard"


def test_linear_models_require_lambda_zero():
    with pytest.raises(ConfigError, match="lambda"):
        parse_config(mutate(model="linear-schrodinger",
                            integrator={"kind": "picard"}))
    with pytest.raises(ConfigError, match="lambda"):
        parse_config(mutate(params__lambda=0))  # dnls is the nonlinear model
    with pytest.raises(ConfigError, match="sigma"):
        parse_config(mutate(params__sigma=0.0))


def test_integrator_tau_and_tol_rules():
    with pytest.raises(ConfigError, match="tau"):
        parse_config(mutate(integrator={"kind": "picard", "tau": 0.1}))
    with pytest.raises(ConfigError, match="tau"):
        parse_config(mutate(integrator={"kind": "strang"}))
    with pytest.raises(ConfigError, match="tol"):
        parse_config(mutate(integrator={"kind": "strang", "tau": 0.01,
                                        "tol": 1e-10}))
    cfg = parse_config(mutate(integrator={"kind": "picard", "tol": 1e-10}))
    assert cfg.tol == 1e-10


def test_velocity_block_rules():
    with pytest.raises(ConfigError, match="velocity"):
        parse_config(mutate(initial={"kind": "delta", "amplitude": 1.0,
                                     "velocity": {"kind": "zero"}}))
    cfg = parse_config(mutate(
        model="dkg", params__lambda=-1, integrator={"kind": "verlet"},
        initial={"kind": "gaussian", "width": 4.0, "amplitude": 1.0,
                 "velocity": {"kind": "random", "seed": 3, "amplitude": 0.1}}))
    assert cfg.velocity == {"kind": "random", "seed": 3, "amplitude": 0.1}


def test_negative_energy_seed_constraints():
    good = mutate(model="dkg", params__lambda=-1,
                  params__potential={"kind": "constant", "c": 1.0},
                  integrator={"kind": "verlet"},
                  initial={"kind": "negative_energy_seed"})
    assert parse_config(good).initial == {"kind": "negative_energy_seed"}
    with pytest.raises(ConfigError, match="negative_energy_seed"):
        parse_config(mutate(initial={"kind": "negative_energy_seed"}))
    bad = copy.deepcopy(good)
    bad["params"]["lambda"] = 1
    with pytest.raises(ConfigError, match="negative_energy_seed"):
        parse_config(bad)
    bad = copy.deepcopy(good)
    bad["initial"]["velocity"] = {"kind": "zero"}
    with pytest.raises(ConfigError, match="velocity"):
        parse_config(bad)


def test_initial_block_validation():
    with pytest.raises(ConfigError, match="kind"):
        parse_config(mutate(initial={"kind": "soliton"}))
    with pytest.raises(ConfigError, match="width"):
        parse_config(mutate(initial={"kind": "gaussian", "width": -1.0,
                                     "amplitude": 1.0}))
    with pytest.raises(ConfigError, match="seed"):
        parse_config(mutate(initial={"kind": "random", "amplitude": 1.0}))


def test_cadence_must_fit_horizon():
    with pytest.raises(ConfigError, match="cadence"):
        parse_config(mutate(diagnostics__cadence=0.5))  # T = 0.2


def test_p_list_parsing_and_labels():
    cfg = parse_config(mutate(diagnostics__p_list=[1, 1.5, "inf"]))
    assert cfg.p_list == (1.0, 1.5, INF)
    with pytest.raises(ConfigError, match="p must be"):
        parse_config(mutate(diagnostics__p_list=[0.5]))
    with pytest.raises(ConfigError, match="nonempty"):
        parse_config(mutate(diagnostics__p_list=[]))
    assert p_label(INF) == "inf"
    assert p_label(2.0) == "2"
    assert p_label(1.5) == "1.5"


def test_parse_potential_errors():
    with pytest.raises(ConfigError, match="unknown kind"):
        parse_potential({"kind": "harmonic"})
    with pytest.raises(ConfigError, match="requires 'c'"):
        parse_potential({"kind": "constant"})
    with pytest.raises(ConfigError, match="pattern"):
        parse_potential({"kind": "periodic", "pattern": []})
    with pytest.raises(ConfigError, match="seed"):
        parse_potential({"kind": "iid_uniform", "lo": 0.0, "hi": 1.0})
    with pytest.raises(ConfigError, match="frequency"):
        parse_potential({"kind": "quasiperiodic", "amplitude": 1.0,
                         "frequency": 0.5})
    spec = parse_potential({"kind": "quasiperiodic", "amplitude": 1.0})
    assert spec.kind == "quasiperiodic"


# ---------------------------------------------------------------------------
# sweep configs


def growth_doc():
    return {"schema_version": 1, "model": "schrodinger", "d": 1, "N": 16,
            "h_list": [1.0, 0.5], "p_list": [1, "inf"],
            "t_grid": [0.0, 0.5], "trials": 2, "seed": 1}


def test_parse_growth_sweep():
    cfg = parse_growth_sweep(growth_doc())
    assert cfg.model == "schrodinger" and cfg.trials == 2
    assert cfg.h_list == (1.0, 0.5) and cfg.t_grid == (0.0, 0.5)
    with pytest.raises(ConfigError, match="model"):
        parse_growth_sweep({**growth_doc(), "model": "dnls"})
    with pytest.raises(ConfigError, match="trials"):
        parse_growth_sweep({**growth_doc(), "trials": 0})
    with pytest.raises(ConfigError, match="t_grid"):
        parse_growth_sweep({**growth_doc(), "t_grid": [-1.0, 0.5]})
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_growth_sweep({**growth_doc(), "tau": 0.1})


def kernel_doc():
    return {"schema_version": 1, "alpha": 1.0, "d_list": [1],
            "h_list": [1.0, 0.5]}


def test_parse_kernel_sweep():
    cfg = parse_kernel_sweep(kernel_doc())
    assert cfg.alpha == 1.0 and cfg.radius is None and cfg.points is None
    assert parse_kernel_sweep({**kernel_doc(), "radius": 8}).radius == 8
    for alpha in (0.0, -0.5, 1.5):
        with pytest.raises(ConfigError, match="alpha"):
            parse_kernel_sweep({**kernel_doc(), "alpha": alpha})
    with pytest.raises(ConfigError, match="decreasing"):
        parse_kernel_sweep({**kernel_doc(), "h_list": [0.5, 1.0]})
    with pytest.raises(ConfigError, match="decreasing"):
        parse_kernel_sweep({**kernel_doc(), "h_list": [1.0, 1.0]})
    with pytest.raises(ConfigError, match="radius"):
        parse_kernel_sweep({**kernel_doc(), "radius": 0})


def test_load_document_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_document(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_document(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="top level"):
        load_document(arr)


# ---------------------------------------------------------------------------
# field file round trip


def test_save_load_field_roundtrip(tmp_path):
    lat = LatticeSpec(2, 6, 0.5)
    f = random_field(lat, seed=9)
    path = tmp_path / "f.csv"
    save_field(path, f)
    g = load_field(path)
    assert g.spec == lat
    np.testing.assert_array_equal(g.values, f.values)  # 17 digits round-trip


def test_load_field_malformed(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("re,im\n1,0\n")
    with pytest.raises(ConfigError, match="header"):
        load_field(p)
    p.write_text("# field d=1 N=4 h=1\nre,im\n1,0\n")
    with pytest.raises(ConfigError, match="expected 4 rows"):
        load_field(p)
    p.write_text("# field d=1 N=2 h=1\nre,im\n1,0\nbroken\n")
    with pytest.raises(ConfigError, match="bad row"):
        load_field(p)


# ---------------------------------------------------------------------------
# CLI end to end


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def _artifact_bytes(out_dir, skip=("run_metadata.json",)):
    return {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())
            if p.name not in skip}


def test_cli_simulate_and_rerun_determinism(tmp_path):
    runner = CliRunner()
    cfg = _write(tmp_path / "run.json", base_doc())
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        res = runner.invoke(main, ["simulate", "--config", cfg, "--out", str(out)])
        assert res.exit_code == 0, res.output
        outs.append(out)
    assert "PASS" in res.output and "artifacts in" in res.output
    for out in outs:
        for fname in ("trajectory.csv", "reports.json", "run_metadata.json"):
            assert (out / fname).exists()
    # reruns are bitwise identical apart from the wall-time metadata
    assert _artifact_bytes(outs[0]) == _artifact_bytes(outs[1])
    reports = json.loads((outs[0] / "reports.json").read_text())
    assert {r["claim"] for r in reports} >= {"mass-conservation",
                                             "apriori-lp-envelope"}


def test_cli_seed_override(tmp_path):
    runner = CliRunner()
    cfg = _write(tmp_path / "run.json", base_doc())
    res_a = runner.invoke(main, ["simulate", "--config", cfg,
                                 "--out", str(tmp_path / "a"), "--seed", "7"])
    res_b = runner.invoke(main, ["simulate", "--config", cfg,
                                 "--out", str(tmp_path / "b")])
    assert res_a.exit_code == 0 and res_b.exit_code == 0
    assert (tmp_path / "a" / "trajectory.csv").read_bytes() != \
        (tmp_path / "b" / "trajectory.csv").read_bytes()
    meta = json.loads((tmp_path / "a" / "run_metadata.json").read_text())
    assert meta["seeds"]["initial"] == 7
    # an override makes no sense without a seeded initial field
    cfg2 = _write(tmp_path / "run2.json",
                  mutate(initial={"kind": "delta", "amplitude": 1.0}))
    res = runner.invoke(main, ["simulate", "--config", cfg2,
                               "--out", str(tmp_path / "c"), "--seed", "7"])
    assert res.exit_code == 2


def test_cli_invalid_config_reports_json_error(tmp_path):
    runner = CliRunner()
    cfg = _write(tmp_path / "bad.json", mutate(model="heat"))
    res = runner.invoke(main, ["simulate", "--config", cfg,
                               "--out", str(tmp_path / "out")])
    assert res.exit_code == 2
    err = json.loads(res.stderr)
    assert err["error"] == "validation"
    assert "model" in err["reason"]
    assert not (tmp_path / "out").exists()


def test_cli_growth_sweep_jobs_invariance(tmp_path):
    runner = CliRunner()
    cfg = _write(tmp_path / "sweep.json", growth_doc())
    for name, jobs in (("j1", "1"), ("j2", "2")):
        res = runner.invoke(main, ["growth-sweep", "--config", cfg,
                                   "--out", str(tmp_path / name),
                                   "--jobs", jobs])
        assert res.exit_code == 0, res.output
    assert _artifact_bytes(tmp_path / "j1") == _artifact_bytes(tmp_path / "j2")
    assert (tmp_path / "j1" / "growth_sweep.csv").exists()


def test_cli_kernel_sweep_smoke(tmp_path):
    runner = CliRunner()
    cfg = _write(tmp_path / "kernel.json", kernel_doc())
    res = runner.invoke(main, ["kernel-sweep", "--config", cfg,
                               "--out", str(tmp_path / "out")])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "out" / "kernel_sweep.json").exists()
    assert (tmp_path / "out" / "kernel_d1_h1.csv").exists()
    assert (tmp_path / "out" / "kernel_d1_h0.5.csv").exists()


def blowup_doc():
    return {
        "schema_version": 1,
        "model": "dkg",
        "lattice": {"d": 1, "N": 64, "h": 1.0},
        "params": {"sigma": 1.0, "lambda": -1,
                   "potential": {"kind": "constant", "c": 1.0}},
        "initial": {"kind": "negative_energy_seed"},
        "integrator": {"kind": "verlet"},
        "T": 2.0,
        "diagnostics": {"p_list": [2, "inf"], "cadence": 0.002},
    }


def test_cli_blowup_smoke(tmp_path):
    runner = CliRunner()
    cfg = _write(tmp_path / "blowup.json", blowup_doc())
    res = runner.invoke(main, ["blowup", "--config", cfg,
                               "--out", str(tmp_path / "out")])
    assert res.exit_code == 0, res.output
    for fname in ("trajectory.csv", "control_trajectory.csv", "reports.json"):
        assert (tmp_path / "out" / fname).exists()
    reports = json.loads((tmp_path / "out" / "reports.json").read_text())
    claims = {r.get("claim", "blowup") for r in reports}
    assert "defocusing-control" in claims


def test_cli_plot_and_missing_artifacts(tmp_path):
    runner = CliRunner()
    cfg = _write(tmp_path / "run.json", base_doc())
    out = tmp_path / "run"
    assert runner.invoke(main, ["simulate", "--config", cfg,
                                "--out", str(out)]).exit_code == 0
    res = runner.invoke(main, ["plot", "--config", str(out)])
    assert res.exit_code == 0, res.output
    assert (out / "plots" / "norms.svg").exists()
    # pointing at an empty directory is an artifact error, not a crash
    empty = tmp_path / "empty"
    empty.mkdir()
    res = runner.invoke(main, ["plot", "--config", str(empty)])
    assert res.exit_code == 2
    assert json.loads(res.stderr)["error"] == "artifact"


def test_cli_help_lists_verbs():
    res = CliRunner().invoke(main, ["--help"])
    assert res.exit_code == 0
    for verb in ("simulate", "growth-sweep", "kernel-sweep", "blowup", "plot"):
        assert verb in res.output
