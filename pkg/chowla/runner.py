"""Experiment configuration, dispatch to the owning module, and the run manifest.

An experiment is a JSON document::

    {"command": "pairs", "params": {"n": 10000000}, "seed": null,
     "scales": null, "output": "pairs.json", "format": "json", "workers": 4}

``params`` are validated against COMMANDS, missing entries take the listed
defaults, and validation failures raise ConfigError with the dotted path of
the offending field. The result file holds only deterministic content; wall
times and checksums go to the manifest written beside it.
"""

import hashlib
import json
import logging
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

from chowla import __version__
from chowla.circle import TripleSpec, count_triples, count_triples_in_classes, main_term_prediction
from chowla.config import LabConfig
from chowla.density import (
    SignPattern,
    liouville_pair_table,
    mobius_pair_table,
    pattern_density,
    predicted_constants,
    run_density,
)
from chowla.density.patterns import SOURCES
from chowla.errors import ConfigError
from chowla.export import FORMATS, atomic_write_text, csv_text, dumps, edgelist_text, write_json
from chowla.graph import PathEnsembleParams, build_graph, connectivity_trials, ensemble_trials
from chowla.graph.profinite import MODES, draw_sample
from chowla.intervals import FUNCTIONS, TWIST_KINDS, TwistSpec, chi3_endgame, interval_profile, mu_chi_coincidence
from chowla.report import Report, emit_report, load_results
from chowla.sieve.cache import cache_dir, load_or_sieve
from chowla.sieve.segment import sieve_range

logger = logging.getLogger(__name__)

REQUIRED = object()
SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class Param:
    kind: str  # int | float | str | bool | paths
    default: Any = REQUIRED
    choices: tuple = ()
    minimum: float | None = None


COMMANDS: dict[str, dict[str, Param]] = {
    "sieve": {
        "start": Param("int", 1, minimum=1),
        "len": Param("int", minimum=1),
        "w": Param("int", None, minimum=1),
        "cache": Param("bool", True),
    },
    "pattern": {
        "expr": Param("str"),
        "fn": Param("str", "lambda", SOURCES),
        "N": Param("int", None, minimum=1),
        "w": Param("int", None, minimum=1),
    },
    "pairs": {
        "n": Param("int", minimum=2),
    },
    "interval": {
        "fn": Param("str", "lambda", FUNCTIONS),
        "twist": Param("str", "none", TWIST_KINDS),
        "eps": Param("int", 1, (-1, 1)),
        "h": Param("int", 10, minimum=1),
        "lo": Param("int", 1, minimum=1),
        "n": Param("int", minimum=1),
        "mode": Param("str", "profile", ("profile", "coincidence", "endgame")),
        "k": Param("int", 1, minimum=1),
    },
    "rundensity": {
        "a": Param("float", minimum=0),
        "n": Param("int", minimum=1),
    },
    "graph": {
        "mode": Param("str", "profinite", MODES),
        "x": Param("int", minimum=1),
        "w": Param("int", 50, minimum=1),
        "p": Param("int", None, minimum=2),
        "trials": Param("int", minimum=1),
        "base": Param("int", None, minimum=1),
    },
    "ensemble": {
        # None falls back to the ensemble_* keys of the lab config
        "k": Param("int", None, minimum=1),
        "imin": Param("int", None, minimum=3),
        "imax": Param("int", None, minimum=3),
        "trials": Param("int", minimum=1),
        "w": Param("int", 50, minimum=1),
        "walks": Param("int", None, minimum=0),
        "start": Param("int", 0),
    },
    "triples": {
        "x": Param("int", minimum=2),
        "m": Param("int", 1),
        "shift": Param("int", 0),
        "w": Param("int", 1, minimum=1),
        "k": Param("int", 1, minimum=1),
        "a1": Param("int", 0),
        "a2": Param("int", 0),
        "cutoff": Param("int", 100_000, minimum=100),
    },
    "report": {
        "in": Param("paths", ()),
    },
    "constants": {
        "cutoff": Param("int", 1_000_000, minimum=3),
    },
}

STOCHASTIC = ("graph", "ensemble")

MODULES = {
    "sieve": "sieve_core",
    "pattern": "pattern_density",
    "pairs": "pattern_density",
    "rundensity": "pattern_density",
    "constants": "pattern_density",
    "interval": "short_interval",
    "graph": "random_graph",
    "ensemble": "random_graph",
    "triples": "circle_method",
    "report": "cli_io",
}


# --- Configuration ---


def _coerce(path: str, value: Any, spec: Param) -> Any:
    if value is None:
        if spec.default is None:
            return None
        raise ConfigError(path, "must not be null")
    if spec.kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
    elif spec.kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        value = float(value)
    elif spec.kind == "str":
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
    elif spec.kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected true or false, got {value!r}")
    elif spec.kind == "paths":
        if isinstance(value, str):
            value = [value]
        if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
            raise ConfigError(path, "expected a list of file paths")
        value = list(value)
    if spec.choices and value not in spec.choices:
        raise ConfigError(path, f"must be one of {list(spec.choices)}, got {value!r}")
    if spec.minimum is not None and value < spec.minimum:
        raise ConfigError(path, f"must be >= {spec.minimum}, got {value!r}")
    if spec.kind == "float" and not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    return value


def validate_params(command: str, raw: dict) -> dict:
    """Fill defaults and type-check ``raw`` against the schema of ``command``."""
    schema = COMMANDS[command]
    if not isinstance(raw, dict):
        raise ConfigError("params", "expected an object")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"params.{unknown[0]}", f"unknown parameter for {command!r}")
    params = {}
    for name, spec in schema.items():
        if name not in raw:
            if spec.default is REQUIRED:
                raise ConfigError(f"params.{name}", f"required by {command!r}")
            params[name] = list(spec.default) if spec.kind == "paths" else spec.default
            continue
        params[name] = _coerce(f"params.{name}", raw[name], spec)
    return params


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    scales: list[int] | None = None
    output: str | None = None
    format: str = "json"
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("experiment", "experiment must be a JSON object")
        unknown = sorted(set(data) - {f for f in cls.__dataclass_fields__})
        if unknown:
            raise ConfigError(unknown[0], "unknown field")

        command = data.get("command")
        if command not in COMMANDS:
            raise ConfigError("command", f"must be one of {sorted(COMMANDS)}, got {command!r}")
        params = validate_params(command, data.get("params") or {})

        seed = data.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < SEED_LIMIT):
            raise ConfigError("seed", f"must be an integer in [0, 2^64), got {seed!r}")
        if seed is None and command in STOCHASTIC:
            raise ConfigError("seed", f"required by the stochastic command {command!r}")

        scales = data.get("scales")
        if scales is not None:
            if not isinstance(scales, list) or not scales:
                raise ConfigError("scales", "expected a non-empty list of window ends")
            for i, s in enumerate(scales):
                if isinstance(s, bool) or not isinstance(s, int) or s < 1:
                    raise ConfigError(f"scales[{i}]", f"expected a positive integer, got {s!r}")
            if any(b <= a for a, b in zip(scales, scales[1:])):
                raise ConfigError("scales", "must be strictly increasing")
            scales = list(scales)

        output = data.get("output")
        if output is not None and not isinstance(output, str):
            raise ConfigError("output", "expected a file path")
        fmt = data.get("format", "json")
        if fmt not in FORMATS:
            raise ConfigError("format", f"must be one of {list(FORMATS)}, got {fmt!r}")
        if fmt == "edgelist" and command != "graph":
            raise ConfigError("format", "edge lists are only produced by the graph command")
        workers = data.get("workers", 1)
        if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
            raise ConfigError("workers", f"must be a positive integer, got {workers!r}")

        return cls(command, params, seed, scales, output, fmt, workers)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": dict(self.params),
            "seed": self.seed,
            "scales": list(self.scales) if self.scales is not None else None,
            "output": self.output,
            "format": self.format,
            "workers": self.workers,
        }

    @classmethod
    def parse(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("experiment", f"invalid JSON: {e}") from e
        return cls.from_dict(data)

    def serialize(self) -> str:
        return dumps(self.to_dict())


def load_experiment(path: str | Path) -> dict:
    """Read an experiment file; flags are merged over the returned dict before validation."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("experiment", f"cannot read {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("experiment", f"invalid JSON in {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("experiment", "expected a JSON object")
    return data


# --- Dispatch ---


@dataclass
class Outcome:
    payload: dict
    rows: list[dict]
    graphs: list[tuple[int, list[tuple[int, int, int]]]] | None = None
    checksums: dict[str, str] = field(default_factory=dict)
    text: str | None = None
    report: Report | None = None


def _sieve(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    p = cfg.params
    checksums = {}
    if p["cache"]:
        directory = cache_dir(lab.cache_dir)
        segment, checksum = load_or_sieve(p["start"], p["len"], p["w"], directory=directory, workers=cfg.workers)
        checksums[f"seg_{p['start']}_{p['len']}_w{p['w'] or 0}"] = checksum
    else:
        segment = sieve_range(p["start"], p["len"], p["w"], workers=cfg.workers)
    summary = segment.summary()
    return Outcome(summary, [summary], checksums=checksums)


def _pattern(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    p = cfg.params
    pattern = SignPattern.parse(p["expr"], max_length=lab.max_pattern_length)
    scales = [(1, s) for s in cfg.scales] if cfg.scales else None
    if scales is None and p["N"] is None:
        raise ConfigError("params.N", "required when no scales are given")
    w = p["w"] if p["w"] is not None else (lab.default_w if p["fn"] == "mu2w" else None)
    report = pattern_density(
        pattern, scales, N=p["N"], which=p["fn"], w=w, depth=lab.scale_depth, workers=cfg.workers
    )
    return Outcome(report.to_dict(), report.rows())


def _pairs(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    N = cfg.params["n"]
    mobius = mobius_pair_table(N, workers=cfg.workers)
    liouville = liouville_pair_table(N, workers=cfg.workers)
    payload = {
        "N": N,
        "mobius": mobius.to_dict(),
        "liouville": liouville.to_dict(),
        "squarefree_density": sum(mobius.frequency(a, b) for a in (-1, 1) for b in (-1, 0, 1)),
        "squarefree_pair_density": mobius.squarefree_pair_frequency(),
        "symmetry_gaps": mobius.symmetry_gaps(),
        "agreement": liouville.frequency(1, 1) + liouville.frequency(-1, -1),
    }
    rows = [{"table": "mobius", **r} for r in mobius.rows()]
    rows += [{"table": "liouville", **r} for r in liouville.rows()]
    return Outcome(payload, rows)


def _interval(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    p = cfg.params
    if p["mode"] == "coincidence":
        payload = mu_chi_coincidence(p["n"], p["eps"], lo=p["lo"], workers=cfg.workers).to_dict()
    elif p["mode"] == "endgame":
        payload = chi3_endgame(p["k"], p["n"], p["fn"], workers=cfg.workers)
    else:
        twist = TwistSpec(p["twist"], p["eps"])
        payload = interval_profile(
            p["fn"],
            p["h"],
            (p["lo"], p["n"]),
            twist,
            quantiles=tuple(lab.interval_quantiles),
            eps_grid=tuple(lab.interval_eps),
            workers=cfg.workers,
        ).to_dict()
    return Outcome(payload, [payload])


def _rundensity(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    a, N = cfg.params["a"], cfg.params["n"]
    if a <= 0:
        raise ConfigError("params.a", "must be positive")
    estimate = run_density(a, N, workers=cfg.workers)
    payload = {"a": a, "N": N, "h": math.ceil(a) - 1, **estimate.to_dict()}
    return Outcome(payload, [payload])


def _graph(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    p = cfg.params
    X, w = p["x"], p["w"]
    P = p["p"] or max(2 * X, w, 2)
    if p["mode"] == "integer" and p["base"] is None:
        raise ConfigError("params.base", "required in integer mode")
    report = connectivity_trials(
        X, w, p["trials"], cfg.seed, mode=p["mode"], base=p["base"], P=P, workers=cfg.workers
    )
    graphs = None
    if cfg.format == "edgelist":
        graphs = [
            (t, build_graph(draw_sample(p["mode"], P, w, cfg.seed, t, base=p["base"]), (0, 2 * X)).edge_list())
            for t in range(p["trials"])
        ]
    return Outcome({"summary": report.to_dict(), "trials": report.records}, report.records, graphs)


def _ensemble(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    p = cfg.params
    params = PathEnsembleParams.from_interval(
        p["k"] or lab.ensemble_k, p["imin"] or lab.ensemble_imin, p["imax"] or lab.ensemble_imax
    )
    walks = lab.ensemble_walks if p["walks"] is None else p["walks"]
    summary = ensemble_trials(
        params,
        p["trials"],
        cfg.seed,
        w=p["w"],
        start=p["start"],
        walks=walks,
        exact=len(params.primes) <= lab.exact_weight_limit,
        workers=cfg.workers,
    )
    return Outcome({"summary": summary.to_dict(), "trials": summary.records}, summary.records)


def _triples(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    p = cfg.params
    spec = TripleSpec(p["x"], p["m"], p["shift"], p["w"], p["k"], p["a1"], p["a2"])
    if spec.k == 1:
        count = count_triples(spec, workers=cfg.workers)
    else:
        count = count_triples_in_classes(spec, workers=cfg.workers)
    term = main_term_prediction(spec, cutoff=p["cutoff"])
    payload = {
        **term.to_dict(),
        "count": count,
        "normalized": count / (spec.X**2 / math.log(spec.X) ** 3),
        "ratio": count / term.prediction if term.prediction else None,
    }
    return Outcome(payload, [payload])


def _constants(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    payload = predicted_constants(cfg.params["cutoff"])
    return Outcome(payload, [payload])


def _report(cfg: ExperimentConfig, lab: LabConfig) -> Outcome:
    report = emit_report(load_results(cfg.params["in"]), lab)
    return Outcome(report.to_dict(), report.rows_as_dicts(), text=report.markdown, report=report)


HANDLERS: dict[str, Callable[[ExperimentConfig, LabConfig], Outcome]] = {
    "sieve": _sieve,
    "pattern": _pattern,
    "pairs": _pairs,
    "interval": _interval,
    "rundensity": _rundensity,
    "graph": _graph,
    "ensemble": _ensemble,
    "triples": _triples,
    "constants": _constants,
    "report": _report,
}


# --- Manifest ---


@dataclass
class RunManifest:
    config: dict
    version: str
    started: str
    wall_time: float
    timings: dict[str, float]
    checksums: dict[str, str]
    outputs: dict[str, str]
    outcome: Outcome | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "started": self.started,
            "wall_time": self.wall_time,
            "timings": self.timings,
            "checksums": self.checksums,
            "outputs": self.outputs,
        }


def manifest_path(output: str | Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def result_document(cfg: ExperimentConfig, outcome: Outcome) -> dict:
    return {"command": cfg.command, "params": cfg.params, "seed": cfg.seed, "result": outcome.payload}


def render_output(cfg: ExperimentConfig, outcome: Outcome) -> str:
    """The result file body; depends only on the config and the computed values."""
    if outcome.text is not None and str(cfg.output or "").endswith(".md"):
        return outcome.text
    if cfg.format == "csv":
        return csv_text(outcome.rows)
    if cfg.format == "edgelist":
        return edgelist_text(outcome.graphs or [])
    return dumps(result_document(cfg, outcome)) + "\n"


def run(config: ExperimentConfig, lab: LabConfig | None = None) -> RunManifest:
    """Dispatch ``config`` to its module and write the result and manifest files atomically.

    Nothing is written when the computation raises.
    """
    lab = lab or LabConfig()
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    logger.info("Running %s with %s", config.command, config.params)

    outcome = HANDLERS[config.command](config, lab)
    elapsed = time.perf_counter() - t0

    manifest = RunManifest(
        config=config.to_dict(),
        version=__version__,
        started=started,
        wall_time=elapsed,
        timings={MODULES[config.command]: elapsed},
        checksums=outcome.checksums,
        outputs={},
        outcome=outcome,
    )
    if config.output:
        body = render_output(config, outcome)
        out = atomic_write_text(config.output, body)
        manifest.outputs[str(out)] = hashlib.sha256(body.encode("utf-8")).hexdigest()
        manifest.wall_time = time.perf_counter() - t0
        write_json(manifest_path(out), manifest.to_dict())
        logger.info("Wrote %s (%s)", out, config.format)
    return manifest
