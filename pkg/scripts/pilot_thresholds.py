"""Run the pilot sweeps that fix the acceptance brackets and print a config.yaml snippet.

Pilots use seeds disjoint from the acceptance runs (which use seed 0), and
every bracket is widened around the observed spread, never narrowed below
the shipped defaults.

Run from project root:
    uv run python scripts/pilot_thresholds.py [--quick] [--workers 4]
"""

import argparse
import logging
import math
import sys
from pathlib import Path

import yaml

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from chowla.circle import TripleSpec, count_triples, count_triples_in_classes, main_term_prediction
from chowla.config import LabConfig
from chowla.density import maximal_pilot
from chowla.graph import PathEnsembleParams, connectivity_trials, ensemble_trials

logger = logging.getLogger("pilot")

PILOT_SEED = 1


def _round_down(x: float, step: float = 0.05) -> float:
    return math.floor(x / step) * step


def _widen(values: list[float], default: list[float], factor: float = 1.5) -> list[float]:
    lo = min(min(values) / factor, default[0])
    hi = max(max(values) * factor, default[1])
    return [round(lo, 4), round(hi, 4)]


def pilot_triples(scales: list[int], workers: int, defaults: LabConfig) -> dict[str, list[float]]:
    normalized, ratios, class_ratios = [], [], []
    for X in scales:
        for m in (1, -3, 5, -7):
            spec = TripleSpec(X, m)
            count = count_triples(spec, workers=workers)
            normalized.append(count / (X**2 / math.log(X) ** 3))
            ratios.append(count / main_term_prediction(spec).prediction)
        for a1, a2 in ((1, 1), (2, 4), (4, 7)):
            spec = TripleSpec(X, 1, k=3, a1=a1, a2=a2)
            term = main_term_prediction(spec)
            if term.prediction:
                class_ratios.append(count_triples_in_classes(spec, workers=workers) / term.prediction)
        logger.info("Triples pilot X=%d done", X)
    return {
        "triples": _widen(normalized, list(defaults.bracket("triples"))),
        "main_term": _widen(ratios, list(defaults.bracket("main_term"))),
        "classes": _widen(class_ratios, list(defaults.bracket("classes"))),
    }


def pilot_ensemble(trials: int, workers: int, defaults: LabConfig) -> list[float]:
    params = PathEnsembleParams.from_interval(defaults.ensemble_k, defaults.ensemble_imin, defaults.ensemble_imax)
    summary = ensemble_trials(params, trials, PILOT_SEED, workers=workers)
    values = [r["s1"] for r in summary.conditioned]
    mean = math.fsum(values) / len(values)
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / max(len(values) - 1, 1))
    spread = 4 * sd / math.sqrt(len(values))
    logger.info("Ensemble pilot: mean S1 given a vertex start %.4f ± %.4f", mean, spread)
    lo, hi = defaults.bracket("ensemble")
    return [round(min(lo, mean - spread), 4), round(max(hi, mean + spread), 4)]


def pilot_connectivity(scales: list[int], trials: int, workers: int) -> float:
    fractions = []
    for X in scales:
        report = connectivity_trials(X, 50, trials, PILOT_SEED, workers=workers)
        if report.fraction is not None:
            fractions.append(report.fraction)
        logger.info("Connectivity pilot X=%d: %s", X, report.fraction)
    return _round_down(0.8 * min(fractions)) if fractions else 0.0


def main():
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    parser = argparse.ArgumentParser(description="Pilot sweeps for the acceptance thresholds")
    parser.add_argument("--quick", action="store_true", help="Smaller scales and fewer trials")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    defaults = LabConfig()
    trials = 100 if args.quick else 500
    triple_scales = [300, 600] if args.quick else [500, 1000, 2000]
    graph_scales = [100, 250] if args.quick else [250, 500, 1000]

    brackets = pilot_triples(triple_scales, args.workers, defaults)
    brackets["ensemble"] = pilot_ensemble(trials, args.workers, defaults)
    maximal = maximal_pilot(512, trials, PILOT_SEED, workers=args.workers)

    snippet = {
        "connectivity_threshold": pilot_connectivity(graph_scales, trials, args.workers),
        "maximal_ratio_bound": round(maximal["bound"], 3),
        "brackets": brackets,
    }
    print(yaml.safe_dump(snippet, sort_keys=False), end="")


if __name__ == "__main__":
    main()
