"""Acceptance report: measured values from result files against the predicted constants."""

import itertools
import json
import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path

from jinja2 import Environment, PackageLoader

from chowla.config import LabConfig
from chowla.density.estimates import predicted_constants
from chowla.errors import AcceptanceError, ConfigError

logger = logging.getLogger(__name__)

PASS, FAIL, NOT_RUN = "pass", "fail", "not run"

_env = Environment(
    loader=PackageLoader("chowla", "templates"),
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


_env.filters["fmt"] = _fmt


# group key -> (table title, claim checked by every row of the table)
CLAIMS: dict[str, tuple[str, str]] = {
    "pairs": (
        "Squarefree numbers and Möbius pairs",
        "μ² has density 6/π² and (μ(n), μ(n+1)) follows the two-point law with constant c",
    ),
    "patterns": (
        "Liouville sign patterns of length 3",
        "every sign pattern of length 3 occurs among consecutive λ values with positive density",
    ),
    "intervals": (
        "Sums over short intervals",
        "λ and λχ₃ cancel on almost all intervals of growing length",
    ),
    "runs": (
        "Runs of λ = +1",
        "runs of λ = +1 around t have positive density that shrinks as the run widens",
    ),
    "graph": (
        "Random graph connectivity",
        "0 and X are connected in the squarefree prime-gap graph with probability bounded below",
    ),
    "ensemble": (
        "Weighted path ensemble",
        "the weighted count of k-step prime paths from a vertex has mean 1 and few endpoint collisions",
    ),
    "triples": (
        "Prime triples -p1 + p2 - p3 = m",
        "prime triples with -p1 + p2 - p3 = m number ≍ X²/log³X and match the singular-series main term",
    ),
}


@dataclass
class Row:
    group: str
    quantity: str
    expected: str
    tolerance: str
    measured: float | str | None = None
    verdict: str = NOT_RUN
    claim: str = ""
    source: str = ""


def _row(group: str, quantity: str, expected: str, tolerance: str, measured=None, ok: bool | None = None) -> Row:
    if measured is None or ok is None:
        return Row(group, quantity, expected, tolerance)
    return Row(group, quantity, expected, tolerance, measured, PASS if ok else FAIL)


def _cite(key: str, rows: list[Row], lab: LabConfig) -> list[Row]:
    """Title the rows of one claim table and attach its claim and configured citation."""
    title, claim = CLAIMS[key]
    source = lab.citations.get(key, "")
    for row in rows:
        row.group, row.claim, row.source = title, claim, source
    return rows


@dataclass
class Report:
    rows: list[Row] = field(default_factory=list)
    inputs: int = 0

    def count(self, verdict: str) -> int:
        return sum(1 for r in self.rows if r.verdict == verdict)

    @property
    def failed(self) -> bool:
        return self.count(FAIL) > 0

    @property
    def groups(self) -> list[tuple[str, list[Row]]]:
        return [(g, list(rows)) for g, rows in itertools.groupby(self.rows, key=lambda r: r.group)]

    @property
    def markdown(self) -> str:
        return _env.get_template("report.md.j2").render(
            groups=self.groups,
            inputs=self.inputs,
            passed=self.count(PASS),
            failed=self.count(FAIL),
            not_run=self.count(NOT_RUN),
        )

    def rows_as_dicts(self) -> list[dict]:
        return [asdict(r) for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs,
            "passed": self.count(PASS),
            "failed": self.count(FAIL),
            "not_run": self.count(NOT_RUN),
            "rows": self.rows_as_dicts(),
        }

    def check(self) -> None:
        if self.failed:
            failing = [r.quantity for r in self.rows if r.verdict == FAIL]
            raise AcceptanceError(f"{len(failing)} check(s) failed: {', '.join(failing)}")


def load_results(paths: list[str]) -> list[dict]:
    """Read JSON result documents written by ``run``."""
    results = []
    for i, path in enumerate(paths):
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"params.in[{i}]", f"cannot load result file {path}: {e}") from e
        if not isinstance(doc, dict) or "command" not in doc or "result" not in doc:
            raise ConfigError(f"params.in[{i}]", f"{path} is not a result document")
        results.append(doc)
    logger.info("Loaded %d result files", len(results))
    return results


def _index(results: list[dict]) -> dict[str, list[dict]]:
    by_command: dict[str, list[dict]] = defaultdict(list)
    for doc in results:
        by_command[doc["command"]].append(doc)
    return by_command


# --- Claims ---


def _pair_rows(docs: list[dict], lab: LabConfig, constants: dict) -> list[Row]:
    group = "pairs"
    res = max(docs, key=lambda d: d["result"]["N"])["result"] if docs else None
    tol_mu = lab.tolerance("mu_pair")

    def close(quantity: str, expected: float, tol: float, measured: float | None) -> Row:
        ok = None if measured is None else abs(measured - expected) <= tol
        return _row(group, quantity, f"{expected:.4f}", f"± {tol}", measured, ok)

    def cell(key: str) -> float | None:
        return res["mobius"]["cells"][key]["frequency"] if res else None

    rows = [
        close("frequency of μ²(n) = 1", constants["inv_zeta2"], lab.tolerance("squarefree_density"),
              res and res["squarefree_density"]),
        close("frequency of μ²(n) = μ²(n+1) = 1", constants["c"], lab.tolerance("pair_constant"),
              res and res["squarefree_pair_density"]),
        close("μ pair (0,0)", constants["pair_zero_zero"], tol_mu, cell("0,0")),
    ]
    for key in ("+1,0", "-1,0", "0,+1", "0,-1"):
        rows.append(close(f"μ pair ({key})", constants["pair_sign_zero"], tol_mu, cell(key)))

    gap_tol = lab.tolerance("pair_symmetry")
    for name, label in (("plus_minus", "|freq(+1,-1) - freq(-1,+1)|"), ("plus_plus", "|freq(+1,+1) - freq(-1,-1)|")):
        gap = res["symmetry_gaps"][name] if res else None
        rows.append(_row(group, label, "0", f"< {gap_tol}", gap, gap is not None and gap < gap_tol))

    floor = lab.tolerance("agreement_floor")
    agreement = res["agreement"] if res else None
    rows.append(_row(group, "frequency of λ(n) = λ(n+1)", f"> {floor}", "-", agreement,
                     agreement is not None and agreement > floor))
    return rows


def _pattern_rows(docs: list[dict], lab: LabConfig) -> list[Row]:
    group = "patterns"
    floor = lab.tolerance("pattern_floor")
    found: dict[str, dict] = {}
    for doc in docs:
        res = doc["result"]
        if res["which"] != "lambda":
            continue
        symbols = res["pattern"].replace("^", "")
        best = found.get(symbols)
        if best is None or res["scales"][-1]["window"][1] > best["scales"][-1]["window"][1]:
            found[symbols] = res
    rows = []
    for symbols in ("".join(s) for s in itertools.product("+-", repeat=3)):
        res = found.get(symbols)
        freq = res["scales"][-1]["frequency"] if res else None
        rows.append(_row(group, f"density of {symbols} (Chowla value 1/8)", f"> {floor}", "-", freq,
                         freq is not None and freq > floor))
    return rows


def _interval_rows(docs: list[dict], lab: LabConfig) -> list[Row]:
    group = "intervals"
    ceiling = lab.tolerance("short_interval_ceiling")
    means: dict[tuple[str, str, int], tuple[int, float]] = {}
    for doc in docs:
        res = doc["result"]
        if "mean_abs" not in res:
            continue
        key = (res["function"], res["twist"], res["h"])
        hi = res["window"][1]
        if key not in means or hi > means[key][0]:
            means[key] = (hi, res["mean_abs"])
    rows = []
    for twist, label in (("none", "λ"), ("chi3", "λχ₃")):
        small = means.get(("lambda", twist, 10))
        large = means.get(("lambda", twist, 1000))
        both = small is not None and large is not None
        rows.append(_row(group, f"{label}: mean |S|/h at h = 1000 below h = 10",
                         _fmt(small[1]) if small else "-", "-",
                         large[1] if both else None, both and large[1] < small[1]))
        rows.append(_row(group, f"{label}: mean |S|/h at h = 1000", f"< {ceiling}", "-",
                         large[1] if large else None, large is not None and large[1] < ceiling))
    return rows


def _run_rows(docs: list[dict], lab: LabConfig) -> list[Row]:
    group = "runs"
    by_a: dict[float, tuple[int, float]] = {}
    for doc in docs:
        res = doc["result"]
        a = float(res["a"])
        if a not in by_a or res["N"] > by_a[a][0]:
            by_a[a] = (res["N"], res["frequency"])
    rows = []
    for a in (1.0, 2.0, 3.0):
        freq = by_a[a][1] if a in by_a else None
        rows.append(_row(group, f"p_a at a = {a:g}", "> 0", "-", freq, freq is not None and freq > 0))
    ladder = (1.0, 2.0, 3.0, 5.0, 8.0)
    values = [by_a[a][1] for a in ladder if a in by_a]
    if len(values) == len(ladder):
        shown = ", ".join(_fmt(v) for v in values)
        rows.append(_row(group, "p_a strictly decreasing over a = 1, 2, 3, 5, 8", "decreasing", "-", shown,
                         all(b < a for a, b in zip(values, values[1:]))))
    else:
        rows.append(_row(group, "p_a strictly decreasing over a = 1, 2, 3, 5, 8", "decreasing", "-"))
    return rows


def _graph_rows(docs: list[dict], lab: LabConfig) -> list[Row]:
    group = "graph"
    threshold = lab.connectivity_threshold
    slack = lab.tolerance("connectivity_slack")
    summaries = sorted((d["result"]["summary"] for d in docs), key=lambda s: (s["mode"], s["w"], s["X"]))
    rows = []
    for s in summaries:
        frac = s["fraction"]
        rows.append(_row(group, f"P(0 ~ X | 0, X vertices), X = {s['X']}, w = {s['w']}, {s['mode']}",
                         f">= {threshold}", "pilot", frac, frac is not None and frac >= threshold))
    if not summaries:
        rows.append(_row(group, "P(0 ~ X | 0, X vertices)", f">= {threshold}", "pilot"))

    runs = [
        [s["fraction"] for s in grp if s["fraction"] is not None]
        for _, grp in itertools.groupby(summaries, key=lambda s: (s["mode"], s["w"]))
    ]
    runs = [r for r in runs if len(r) >= 2]
    if runs:
        ok = all(b >= a - slack for r in runs for a, b in zip(r, r[1:]))
        shown = "; ".join(", ".join(_fmt(v) for v in r) for r in runs)
        rows.append(_row(group, "connectivity non-decreasing in X", "non-decreasing", f"- {slack}", shown, ok))
    else:
        rows.append(_row(group, "connectivity non-decreasing in X", "non-decreasing", f"- {slack}"))
    return rows


def _ensemble_rows(docs: list[dict], lab: LabConfig) -> list[Row]:
    group = "ensemble"
    lo, hi = lab.bracket("ensemble")
    summaries = [d["result"]["summary"] for d in docs if d["result"]["summary"]["k"] == 3]
    s = max(summaries, key=lambda s: s["trials"]) if summaries else None
    rows = []
    for key, label in (("mean_s1", "mean S₁ at k = 3, start a vertex"),
                       ("mean_expected_s1", "mean E[S₁ | V] at k = 3, start a vertex")):
        mean = s[key] if s else None
        rows.append(_row(group, label, "1", f"[{lo:g}, {hi:g}]", mean, mean is not None and lo <= mean <= hi))
    collision = s["mean_collision"] if s else None
    rows.append(_row(group, "mean Σ W_m² below mean S₁²", _fmt(s["mean_s1_squared"]) if s else "-", "-",
                     collision, collision is not None and collision < s["mean_s1_squared"]))
    return rows


def _triple_rows(docs: list[dict], lab: LabConfig) -> list[Row]:
    group = "triples"
    rows = []
    for doc in sorted(docs, key=lambda d: (d["result"]["k"], d["result"]["X"], d["result"]["m"])):
        res = doc["result"]
        label = f"X = {res['X']}, m = {res['m']}"
        if res["k"] > 1:
            lo, hi = lab.bracket("classes")
            label += f", k = {res['k']}, classes ({res['a1']}, {res['a2']})"
            ratio = res["ratio"]
            rows.append(_row(group, f"observed / main term, {label}", "1", f"[{lo:.3g}, {hi:g}]", ratio,
                             ratio is not None and lo <= ratio <= hi))
            continue
        lo, hi = lab.bracket("triples")
        norm = res["normalized"]
        rows.append(_row(group, f"count / (X²/log³X), {label}, w = {res['w']}", "≍ 1", f"[{lo:g}, {hi:g}]",
                         norm, lo <= norm <= hi))
        if res["w"] == 1:
            lo, hi = lab.bracket("main_term")
            ratio = res["ratio"]
            rows.append(_row(group, f"observed / main term, {label}", "1", f"[{lo:g}, {hi:g}]", ratio,
                             ratio is not None and lo <= ratio <= hi))
    if not rows:
        lo, hi = lab.bracket("main_term")
        rows.append(_row(group, "observed / main term", "1", f"[{lo:g}, {hi:g}]"))
    return rows


def emit_report(results: list[dict], lab: LabConfig | None = None) -> Report:
    """One row per checked claim; claims without a matching result are "not run"."""
    lab = lab or LabConfig()
    by_command = _index(results)
    constants = predicted_constants(lab.constants_cutoff)
    rows = [
        *_cite("pairs", _pair_rows(by_command["pairs"], lab, constants), lab),
        *_cite("patterns", _pattern_rows(by_command["pattern"], lab), lab),
        *_cite("intervals", _interval_rows(by_command["interval"], lab), lab),
        *_cite("runs", _run_rows(by_command["rundensity"], lab), lab),
        *_cite("graph", _graph_rows(by_command["graph"], lab), lab),
        *_cite("ensemble", _ensemble_rows(by_command["ensemble"], lab), lab),
        *_cite("triples", _triple_rows(by_command["triples"], lab), lab),
    ]
    report = Report(rows, len(results))
    logger.info(
        "Report: %d passed, %d failed, %d not run",
        report.count(PASS), report.count(FAIL), report.count(NOT_RUN),
    )
    return report
