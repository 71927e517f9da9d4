import json
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chowla import cli
from chowla.cli import main
from chowla.config import LabConfig
from chowla.density import predicted_constants
from chowla.errors import AcceptanceError, ConfigError
from chowla.export import atomic_write_text, csv_text, dumps, parse_csv, parse_edgelist
from chowla.report import CLAIMS, FAIL, NOT_RUN, PASS, emit_report
from chowla.runner import COMMANDS, ExperimentConfig, manifest_path, run


def exit_code(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    return e.value.code


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("CHOWLA_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path


def pairs_document(constants, **overrides):
    """A synthetic pairs result matching the predicted constants exactly."""
    sign_zero = constants["pair_sign_zero"]
    cells = {
        "0,0": {"count": 0, "frequency": constants["pair_zero_zero"]},
        "+1,0": {"count": 0, "frequency": sign_zero},
        "-1,0": {"count": 0, "frequency": sign_zero},
        "0,+1": {"count": 0, "frequency": sign_zero},
        "0,-1": {"count": 0, "frequency": sign_zero},
    }
    result = {
        "N": 10_000_000,
        "mobius": {"N": 10_000_000, "cells": cells},
        "squarefree_density": constants["inv_zeta2"],
        "squarefree_pair_density": constants["c"],
        "symmetry_gaps": {"plus_minus": 0.0001, "plus_plus": 0.0002},
        "agreement": 0.33,
    }
    result.update(overrides)
    return {"command": "pairs", "params": {"n": 10_000_000}, "seed": None, "result": result}


# --- Experiment configuration ---


@st.composite
def configs(draw):
    command = draw(st.sampled_from(["pairs", "pattern", "graph", "triples", "constants"]))
    if command == "pairs":
        params = {"n": draw(st.integers(2, 10**8))}
    elif command == "pattern":
        params = {"expr": draw(st.sampled_from(["^+", "^++-", "+*^-"])), "fn": "lambda"}
    elif command == "graph":
        params = {"x": draw(st.integers(1, 5000)), "trials": draw(st.integers(1, 1000))}
    elif command == "triples":
        X = draw(st.integers(2, 5000))
        params = {"x": X, "m": draw(st.integers(-X, X).filter(lambda m: m % 2))}
    else:
        params = {}
    seed = draw(st.integers(0, 2**64 - 1)) if command == "graph" else draw(st.none() | st.integers(0, 2**64 - 1))
    scales = draw(st.none() | st.lists(st.integers(1, 10**9), min_size=1, max_size=6, unique=True).map(sorted))
    return ExperimentConfig.from_dict(
        {
            "command": command,
            "params": params,
            "seed": seed,
            "scales": scales,
            "output": draw(st.none() | st.sampled_from(["out.json", "results/run.csv"])),
            "format": draw(st.sampled_from(["json", "csv"])),
            "workers": draw(st.integers(1, 16)),
        }
    )


@settings(max_examples=50, deadline=None)
@given(configs())
def test_config_round_trips(config):
    assert ExperimentConfig.parse(config.serialize()) == config


def test_config_fills_defaults():
    config = ExperimentConfig.from_dict({"command": "triples", "params": {"x": 100}})
    assert config.params == {"x": 100, "m": 1, "shift": 0, "w": 1, "k": 1, "a1": 0, "a2": 0, "cutoff": 100_000}


@pytest.mark.parametrize(
    "data,field",
    [
        ({"command": "bogus"}, "command"),
        ({"command": "pairs"}, "params.n"),
        ({"command": "pairs", "params": {"n": "many"}}, "params.n"),
        ({"command": "pairs", "params": {"n": 1}}, "params.n"),
        ({"command": "pairs", "params": {"n": 10, "bogus": 1}}, "params.bogus"),
        ({"command": "pairs", "params": {"n": 10}, "scales": [10, 10]}, "scales"),
        ({"command": "pairs", "params": {"n": 10}, "scales": [5, 0]}, "scales[1]"),
        ({"command": "pairs", "params": {"n": 10}, "format": "edgelist"}, "format"),
        ({"command": "pairs", "params": {"n": 10}, "workers": 0}, "workers"),
        ({"command": "pairs", "params": {"n": 10}, "extra": 1}, "extra"),
        ({"command": "graph", "params": {"x": 10, "trials": 5}}, "seed"),
        ({"command": "graph", "params": {"x": 10, "trials": 5}, "seed": -1}, "seed"),
        ({"command": "graph", "params": {"x": 10, "trials": 5, "mode": "lattice"}, "seed": 1}, "params.mode"),
        ({"command": "interval", "params": {"n": 100, "eps": 2}}, "params.eps"),
    ],
)
def test_config_errors_carry_field_path(data, field):
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_dict(data)
    assert e.value.field == field


def test_invalid_json_is_a_config_error():
    with pytest.raises(ConfigError):
        ExperimentConfig.parse("{not json")


# --- Running experiments ---


def test_pairs_run_writes_table_and_manifest(tmp_path, lab_config):
    out = tmp_path / "pairs.json"
    config = ExperimentConfig.from_dict({"command": "pairs", "params": {"n": 5000}, "output": str(out)})
    manifest = run(config, lab_config)

    doc = json.loads(out.read_text())
    assert doc["command"] == "pairs"
    cells = doc["result"]["mobius"]["cells"]
    assert len(cells) == 9
    assert sum(c["count"] for c in cells.values()) == 4999
    assert 0.55 < doc["result"]["squarefree_density"] < 0.66

    saved = json.loads(manifest_path(out).read_text())
    assert saved["config"] == config.to_dict()
    assert saved["version"] == manifest.version
    assert set(saved["timings"]) == {"pattern_density"}
    assert list(saved["outputs"].values()) == list(manifest.outputs.values())
    assert ExperimentConfig.from_dict(saved["config"]) == config


def test_sieve_run_records_cache_checksum(tmp_path, lab_config):
    config = ExperimentConfig.from_dict({"command": "sieve", "params": {"start": 1, "len": 1000, "w": 7}})
    first = run(config, lab_config)
    second = run(config, lab_config)
    assert first.checksums and first.checksums == second.checksums
    assert first.outcome.payload == second.outcome.payload
    assert first.outcome.payload["mu_zero"] == 1000 - 608


@pytest.mark.parametrize("command,params", [
    ("graph", {"x": 30, "trials": 6, "w": 10}),
    ("ensemble", {"k": 3, "imin": 3, "imax": 40, "trials": 3, "walks": 4, "w": 5}),
])
def test_stochastic_outputs_are_byte_identical_across_workers(tmp_path, lab_config, command, params):
    bodies = []
    for workers in (1, 4):
        out = tmp_path / f"{command}-{workers}.json"
        config = ExperimentConfig.from_dict(
            {"command": command, "params": params, "seed": 99, "output": str(out), "workers": workers}
        )
        run(config, lab_config)
        bodies.append(out.read_bytes())
    assert bodies[0] == bodies[1]


def test_ensemble_defaults_come_from_lab_config():
    lab = LabConfig(ensemble_k=1, ensemble_imin=3, ensemble_imax=40, ensemble_walks=2, exact_weight_limit=5)
    config = ExperimentConfig.from_dict({"command": "ensemble", "params": {"trials": 3, "w": 5}, "seed": 1})
    payload = run(config, lab).outcome.payload
    assert (payload["summary"]["k"], payload["summary"]["imin"], payload["summary"]["imax"]) == (1, 3, 37)
    assert all(r["walks"] == 2 for r in payload["trials"])
    assert payload["summary"]["conditioned"] == sum(r["start_is_vertex"] for r in payload["trials"])


def test_graph_edgelist_output(tmp_path, lab_config):
    out = tmp_path / "graphs.txt"
    config = ExperimentConfig.from_dict(
        {"command": "graph", "params": {"x": 20, "trials": 3}, "seed": 5, "output": str(out), "format": "edgelist"}
    )
    run(config, lab_config)
    graphs = parse_edgelist(out.read_text())
    assert sorted(graphs) == [0, 1, 2]
    for edges in graphs.values():
        assert all(0 <= a < b <= 40 and (b - a) % q == 0 for a, b, q in edges)


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**32))
def test_csv_and_json_encodings_agree(seed):
    config = ExperimentConfig.from_dict({"command": "graph", "params": {"x": 15, "trials": 4, "w": 7}, "seed": seed})
    rows = run(config, LabConfig()).outcome.rows
    assert parse_csv(csv_text(rows)) == json.loads(dumps(rows))


def test_pairs_csv_matches_json(tmp_path, lab_config):
    paths = {}
    for fmt in ("json", "csv"):
        paths[fmt] = tmp_path / f"pairs.{fmt}"
        run(ExperimentConfig.from_dict(
            {"command": "pairs", "params": {"n": 2000}, "output": str(paths[fmt]), "format": fmt}
        ), lab_config)
    cells = json.loads(paths["json"].read_text())["result"]["mobius"]["cells"]
    rows = [r for r in parse_csv(paths["csv"].read_text()) if r["table"] == "mobius"]
    assert len(rows) == 9
    for r in rows:
        key = f"{'0' if r['a'] == 0 else format(r['a'], '+d')},{'0' if r['b'] == 0 else format(r['b'], '+d')}"
        assert cells[key] == {"count": r["count"], "frequency": r["frequency"]}


def test_failed_run_leaves_no_output(tmp_path, lab_config):
    out = tmp_path / "triples.json"
    config = ExperimentConfig.from_dict({"command": "triples", "params": {"x": 50, "m": 2}, "output": str(out)})
    with pytest.raises(ValueError):
        run(config, lab_config)
    assert not out.exists()
    assert not manifest_path(out).exists()


def test_interrupted_write_leaves_no_partial_file(tmp_path, monkeypatch):
    target = tmp_path / "result.json"

    def boom(src, dst):
        raise KeyboardInterrupt

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(KeyboardInterrupt):
        atomic_write_text(target, "{}")
    assert list(tmp_path.iterdir()) == []


# --- Report ---


def test_empty_report_is_all_not_run():
    report = emit_report([], LabConfig(constants_cutoff=10_000))
    assert report.rows
    assert all(r.verdict == NOT_RUN for r in report.rows)
    assert not report.failed
    assert "not run" in report.markdown
    report.check()


def test_pairs_row_passes_at_predicted_values():
    lab = LabConfig(constants_cutoff=10_000)
    constants = predicted_constants(10_000)
    report = emit_report([pairs_document(constants)], lab)
    pair_rows = {r.quantity: r for r in report.rows if r.group.startswith("Squarefree")}
    assert all(r.verdict == PASS for r in pair_rows.values())
    assert pair_rows["μ pair (0,0)"].expected == f"{constants['pair_zero_zero']:.4f}"
    assert "| μ pair (0,0) |" in report.markdown


def test_mixed_verdicts_fail_the_report():
    lab = LabConfig(constants_cutoff=10_000)
    doc = pairs_document(predicted_constants(10_000), squarefree_density=0.5)
    report = emit_report([doc], lab)
    verdicts = {r.quantity: r.verdict for r in report.rows}
    assert verdicts["frequency of μ²(n) = 1"] == FAIL
    assert verdicts["μ pair (0,0)"] == PASS
    assert report.failed
    with pytest.raises(AcceptanceError):
        report.check()


def test_report_groups_run_and_interval_results():
    docs = [
        {"command": "rundensity", "params": {}, "seed": None,
         "result": {"a": a, "N": 1000, "frequency": f}}
        for a, f in [(1.0, 0.5), (2.0, 0.12), (3.0, 0.03), (5.0, 0.002), (8.0, 0.0001)]
    ]
    docs += [
        {"command": "interval", "params": {}, "seed": None,
         "result": {"function": "lambda", "twist": "none", "h": h, "window": [1, 1000], "mean_abs": m}}
        for h, m in [(10, 0.25), (1000, 0.04)]
    ]
    rows = {r.quantity: r.verdict for r in emit_report(docs, LabConfig(constants_cutoff=10_000)).rows}
    assert rows["p_a strictly decreasing over a = 1, 2, 3, 5, 8"] == PASS
    assert rows["λ: mean |S|/h at h = 1000 below h = 10"] == PASS
    assert rows["λ: mean |S|/h at h = 1000"] == PASS
    assert rows["λχ₃: mean |S|/h at h = 1000"] == NOT_RUN


def test_report_rows_cite_their_claim():
    lab = LabConfig(constants_cutoff=10_000, citations={"pairs": "notes, section 2"})
    report = emit_report([pairs_document(predicted_constants(10_000))], lab)
    assert all(r.claim for r in report.rows)
    assert {r.group for r in report.rows} == {title for title, _ in CLAIMS.values()}
    pair_rows = [r for r in report.rows if r.group == CLAIMS["pairs"][0]]
    assert all(r.source == "notes, section 2" for r in pair_rows)
    assert all(r.source == "" for r in report.rows if r.group != CLAIMS["pairs"][0])
    assert "| pass | notes, section 2 |" in report.markdown
    assert f"Claim: {CLAIMS['ensemble'][1]}." in report.markdown
    assert report.to_dict()["rows"][0]["source"] == "notes, section 2"


def ensemble_document(**summary):
    values = {"k": 3, "imin": 101, "imax": 2999, "trials": 1000, "conditioned": 610,
              "mean_s1": 1.05, "mean_expected_s1": 1.01, "mean_collision": 0.6, "mean_s1_squared": 2.4}
    values.update(summary)
    return {"command": "ensemble", "params": {}, "seed": 0, "result": {"summary": values, "trials": []}}


def test_ensemble_rows_check_realised_and_expected_means():
    lab = LabConfig(constants_cutoff=10_000)
    rows = {r.quantity: r.verdict for r in emit_report([ensemble_document()], lab).rows}
    assert rows["mean S₁ at k = 3, start a vertex"] == PASS
    assert rows["mean E[S₁ | V] at k = 3, start a vertex"] == PASS
    assert rows["mean Σ W_m² below mean S₁²"] == PASS

    # a mean diluted by trials whose start is not a vertex falls below the bracket
    diluted = emit_report([ensemble_document(mean_s1=0.61)], lab)
    rows = {r.quantity: r.verdict for r in diluted.rows}
    assert rows["mean S₁ at k = 3, start a vertex"] == FAIL
    assert rows["mean E[S₁ | V] at k = 3, start a vertex"] == PASS
    with pytest.raises(AcceptanceError):
        diluted.check()


def test_failing_report_run_carries_its_report(workdir):
    bad = workdir / "bad.json"
    bad.write_text(json.dumps(ensemble_document(mean_s1=0.61)))
    manifest = run(ExperimentConfig("report", {"in": [str(bad)]}, output="report.json"),
                   LabConfig(constants_cutoff=10_000))
    assert manifest.outcome.report is not None
    assert manifest.outcome.report.failed
    assert json.loads((workdir / "report.json").read_text())["result"]["failed"] == 1
    with pytest.raises(AcceptanceError):
        manifest.outcome.report.check()


# --- Command line ---


def test_help_lists_every_command(capsys):
    assert cli.__doc__.startswith("CLI entry points")
    assert exit_code(["--help"]) == 0
    out = capsys.readouterr().out
    for command in COMMANDS:
        assert command in out


def test_unknown_command_is_a_usage_error(workdir):
    assert exit_code(["bogus"]) == 2
    assert exit_code([]) == 2


def test_missing_parameter_is_a_usage_error(workdir):
    assert exit_code(["pairs"]) == 2
    assert exit_code(["graph", "--x", "10", "--trials", "2"]) == 2


def test_cli_pairs_run(workdir):
    out = workdir / "pairs.json"
    assert exit_code(["--output", str(out), "pairs", "--n", "1000"]) == 0
    assert json.loads(out.read_text())["result"]["N"] == 1000
    assert manifest_path(out).exists()


def test_cli_flags_override_experiment_file(workdir):
    experiment = workdir / "exp.json"
    experiment.write_text(json.dumps({"command": "pairs", "params": {"n": 1000}, "output": "a.json"}))
    assert exit_code(["--experiment", str(experiment)]) == 0
    assert json.loads((workdir / "a.json").read_text())["result"]["N"] == 1000
    assert exit_code(["--experiment", str(experiment), "--output", "b.json", "pairs", "--n", "500"]) == 0
    assert json.loads((workdir / "b.json").read_text())["result"]["N"] == 500


def test_cli_prints_to_stdout_without_output(workdir, capsys):
    assert exit_code(["constants", "--cutoff", "1000"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["cutoff"] == 1000


def test_cli_report_exit_status(workdir):
    (workdir / "config.yaml").write_text("constants_cutoff: 10000\n")
    good = workdir / "good.json"
    bad = workdir / "bad.json"
    constants = predicted_constants(10_000)
    good.write_text(json.dumps(pairs_document(constants)))
    bad.write_text(json.dumps(pairs_document(constants, agreement=0.1, N=20_000_000)))

    assert exit_code(["--output", "report.md", "report", "--in", str(good)]) == 0
    assert "| pass |" in (workdir / "report.md").read_text()
    assert exit_code(["--output", "report2.md", "report", "--in", str(good), str(bad)]) == 3
    assert "| fail |" in (workdir / "report2.md").read_text()
    assert exit_code(["report", "--in", str(workdir / "missing.json")]) == 2
