"""Lab-wide configuration loading."""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

logger = logging.getLogger(__name__)

DEFAULTS = {
    "cache_dir": "./chowla-cache",
    "segment_length": 1 << 20,
    "workers": 1,
    "default_w": 50,
    "scale_depth": 6,
    "max_pattern_length": 8,
    "constants_cutoff": 1_000_000,
    "singular_cutoff": 100_000,
    "ensemble_k": 3,
    "ensemble_imin": 100,
    "ensemble_imax": 3000,
    "exact_weight_limit": 2000,
    "ensemble_walks": 64,
    "maximal_normalization": "radius",
}


def _default_brackets() -> dict[str, list[float]]:
    # Pilot-derived (scripts/pilot_thresholds.py); not constants from the literature.
    return {
        "triples": [0.3, 3.0],
        "classes": [1 / 3, 3.0],
        "main_term": [0.5, 2.0],
        "ensemble": [0.8, 1.2],
    }


def _default_tolerances() -> dict[str, float]:
    return {
        "squarefree_density": 0.002,
        "pair_constant": 0.003,
        "mu_pair": 0.003,
        "pair_symmetry": 0.005,
        "sign_balance": 0.01,
        "pattern_floor": 0.05,
        "agreement_floor": 0.3,
        "short_interval_ceiling": 0.1,
        "vertex_density": 0.02,
        "coincidence": 0.02,
        "connectivity_slack": 0.05,
    }


@dataclass
class LabConfig:
    cache_dir: str = DEFAULTS["cache_dir"]
    segment_length: int = DEFAULTS["segment_length"]
    workers: int = DEFAULTS["workers"]
    default_w: int = DEFAULTS["default_w"]
    scale_depth: int = DEFAULTS["scale_depth"]
    max_pattern_length: int = DEFAULTS["max_pattern_length"]
    constants_cutoff: int = DEFAULTS["constants_cutoff"]
    singular_cutoff: int = DEFAULTS["singular_cutoff"]
    ensemble_k: int = DEFAULTS["ensemble_k"]
    ensemble_imin: int = DEFAULTS["ensemble_imin"]
    ensemble_imax: int = DEFAULTS["ensemble_imax"]
    exact_weight_limit: int = DEFAULTS["exact_weight_limit"]
    ensemble_walks: int = DEFAULTS["ensemble_walks"]
    maximal_normalization: str = DEFAULTS["maximal_normalization"]
    maximal_ratio_bound: float = 5.0
    connectivity_threshold: float = 0.4
    interval_quantiles: list[int] = field(default_factory=lambda: [50, 90, 99])
    interval_eps: list[float] = field(default_factory=lambda: [0.05, 0.1, 0.2])
    brackets: dict[str, list[float]] = field(default_factory=_default_brackets)
    tolerances: dict[str, float] = field(default_factory=_default_tolerances)
    citations: dict[str, str] = field(default_factory=dict)

    @property
    def cache_path(self) -> Path:
        return Path(self.cache_dir).resolve()

    def bracket(self, name: str) -> tuple[float, float]:
        lo, hi = self.brackets[name]
        return float(lo), float(hi)

    def tolerance(self, name: str) -> float:
        return float(self.tolerances[name])


def load_config(config_path: str | Path = "config.yaml") -> LabConfig:
    """Load configuration from a YAML file, falling back to defaults."""
    path = Path(config_path)
    data: dict = {}

    if path.exists():
        logger.info("Loading config from %s", path)
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    else:
        logger.info("No config file found at %s, using defaults", path)

    # Only pass known fields to the dataclass
    known_fields = {f.name for f in LabConfig.__dataclass_fields__.values()}
    filtered = {k: v for k, v in data.items() if k in known_fields}

    # Partial bracket/tolerance maps extend the defaults rather than replace them
    if "brackets" in filtered:
        filtered["brackets"] = {**_default_brackets(), **filtered["brackets"]}
    if "tolerances" in filtered:
        filtered["tolerances"] = {**_default_tolerances(), **filtered["tolerances"]}

    config = LabConfig(**filtered)

    if os.environ.get("CHOWLA_CACHE_DIR"):
        config.cache_dir = os.environ["CHOWLA_CACHE_DIR"]

    return config
