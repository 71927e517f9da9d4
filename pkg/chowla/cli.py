"""CLI entry points for chowla-lab."""

import argparse
import logging
import sys

from chowla import __version__
from chowla.config import load_config
from chowla.errors import AcceptanceError, ConfigError, LabError, ParameterError
from chowla.export import FORMATS
from chowla.runner import COMMANDS, ExperimentConfig, load_experiment, render_output, run

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_ACCEPTANCE = 0, 1, 2, 3

SUPPRESS = argparse.SUPPRESS


def _scales(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def build_config(args) -> ExperimentConfig:
    """Merge flags over the experiment file (if any) and validate the result."""
    data = load_experiment(args.experiment) if args.experiment else {}
    command = args.command or data.get("command")
    if args.command and data.get("command") not in (None, args.command):
        raise ConfigError("command", f"flag {args.command!r} conflicts with file {data['command']!r}")
    data["command"] = command

    if command in COMMANDS:
        params = dict(data.get("params") or {})
        for name in COMMANDS[command]:
            if hasattr(args, name):
                params[name] = getattr(args, name)
        data["params"] = params

    for key in ("seed", "scales", "output", "format", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return ExperimentConfig.from_dict(data)


def cmd_experiment(args) -> int:
    """Validate, run and write one experiment; returns the exit status."""
    try:
        config = build_config(args)
        lab = load_config(args.config)
    except ConfigError as e:
        logger.error("Invalid configuration at %s: %s", e.field or "<root>", e.message)
        return EXIT_USAGE

    try:
        manifest = run(config, lab)
    except ConfigError as e:
        logger.error("Invalid configuration at %s: %s", e.field, e.message)
        return EXIT_USAGE
    except ParameterError as e:
        logger.error("Invalid parameters: %s", e)
        return EXIT_USAGE
    except LabError as e:
        logger.error("Run failed: %s", e)
        return EXIT_RUNTIME
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_RUNTIME

    outcome = manifest.outcome
    if not config.output:
        if outcome.text is not None and config.format == "json":
            print(outcome.text, end="")
        else:
            print(render_output(config, outcome), end="")
    else:
        print(f"Wrote {config.output} in {manifest.wall_time:.2f}s")

    if outcome.report is not None:
        try:
            outcome.report.check()
        except AcceptanceError as e:
            logger.error("%s", e)
            return EXIT_ACCEPTANCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chowla",
        description="chowla-lab: sieves, sign-pattern densities and random-graph experiments for λ and μ",
        epilog="The segment cache directory is taken from $CHOWLA_CACHE_DIR when set. "
        "Exit status: 0 pass, 1 runtime error, 2 configuration or usage error, 3 failed acceptance check.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default="config.yaml", help="Path to the lab config.yaml")
    parser.add_argument("--experiment", help="JSON experiment file; flags override its values")
    parser.add_argument("--output", "-o", help="Result file (a manifest is written beside it)")
    parser.add_argument("--format", choices=FORMATS, help="Result encoding (default json)")
    parser.add_argument("--workers", type=int, help="Worker threads (results do not depend on this)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level")
    subparsers = parser.add_subparsers(dest="command")

    sieve = subparsers.add_parser("sieve", help="Sieve λ, μ (and μ²_w) over [start, start + len)")
    sieve.add_argument("--start", type=int, default=SUPPRESS, help="First integer (default 1)")
    sieve.add_argument("--len", type=int, default=SUPPRESS, help="Number of integers")
    sieve.add_argument("--w", type=int, default=SUPPRESS, help="Also sieve squarefreeness by p² for p <= w")
    sieve.add_argument("--cache", action=argparse.BooleanOptionalAction, default=SUPPRESS,
                       help="Read and write the binary segment cache (default on)")

    pattern = subparsers.add_parser("pattern", help="Plain and logarithmic density of a sign pattern")
    pattern.add_argument("--expr", default=SUPPRESS, help='Pattern such as "^+++" or "-*^+"')
    pattern.add_argument("--fn", default=SUPPRESS, help="Source: lambda, mu, mu2 or mu2w")
    pattern.add_argument("--n", dest="N", type=int, default=SUPPRESS, help="Top of the default scale ladder")
    pattern.add_argument("--w", type=int, default=SUPPRESS, help="Squarefree bound for mu2w")
    pattern.add_argument("--scales", type=_scales, help="Comma-separated window ends, strictly increasing")

    pairs = subparsers.add_parser("pairs", help="Joint tables of (μ(n), μ(n+1)) and (λ(n), λ(n+1))")
    pairs.add_argument("--n", type=int, default=SUPPRESS, help="Pairs over n in [1, N-1]")

    interval = subparsers.add_parser("interval", help="Short-interval discrepancy profile")
    interval.add_argument("--fn", default=SUPPRESS, help="lambda or mu")
    interval.add_argument("--twist", default=SUPPRESS, help="none, chi3 or chi_eps")
    interval.add_argument("--eps", type=int, default=SUPPRESS, help="Sign for chi_eps: 1 or -1")
    interval.add_argument("--h", type=int, default=SUPPRESS, help="Interval length")
    interval.add_argument("--lo", type=int, default=SUPPRESS, help="First start point (default 1)")
    interval.add_argument("--n", type=int, default=SUPPRESS, help="Last start point")
    interval.add_argument("--mode", default=SUPPRESS, help="profile, coincidence or endgame")
    interval.add_argument("--k", type=int, default=SUPPRESS, help="Endgame length parameter (3k+1 terms)")

    rundensity = subparsers.add_parser("rundensity", help="Density of t with λ = +1 on (t - a, t + a)")
    rundensity.add_argument("--a", type=float, default=SUPPRESS, help="Half-width of the open window")
    rundensity.add_argument("--n", type=int, default=SUPPRESS, help="t ranges up to N")

    graph = subparsers.add_parser("graph", help="Connectivity of 0 and X in the squarefree graph")
    graph.add_argument("--mode", default=SUPPRESS, help="profinite or integer")
    graph.add_argument("--x", type=int, default=SUPPRESS, help="Target vertex X; window is [0, 2X]")
    graph.add_argument("--w", type=int, default=SUPPRESS, help="Squarefree bound w (default 50)")
    graph.add_argument("--p", type=int, default=SUPPRESS, help="Residue bound P (default max(2X, w))")
    graph.add_argument("--trials", type=int, default=SUPPRESS, help="Number of samples")
    graph.add_argument("--base", type=int, default=SUPPRESS, help="Integer mode draws n0 from [base, 2 base)")
    graph.add_argument("--seed", type=int, help="64-bit seed (required)")

    ensemble = subparsers.add_parser("ensemble", help="Weighted k-step prime path ensemble")
    ensemble.add_argument("--k", type=int, default=SUPPRESS, help="Path length, odd (default 3)")
    ensemble.add_argument("--imin", type=int, default=SUPPRESS, help="Smallest prime step (default 100)")
    ensemble.add_argument("--imax", type=int, default=SUPPRESS, help="Largest prime step (default 3000)")
    ensemble.add_argument("--trials", type=int, default=SUPPRESS, help="Number of samples")
    ensemble.add_argument("--w", type=int, default=SUPPRESS, help="Squarefree bound w (default 50)")
    ensemble.add_argument("--walks", type=int, default=SUPPRESS, help="Random walks per sample (default 64)")
    ensemble.add_argument("--start", type=int, default=SUPPRESS, help="Start vertex (default 0)")
    ensemble.add_argument("--seed", type=int, help="64-bit seed (required)")

    triples = subparsers.add_parser("triples", help="Count prime triples with -p1 + p2 - p3 = m")
    triples.add_argument("--x", type=int, default=SUPPRESS, help="Scale X")
    triples.add_argument("--m", type=int, default=SUPPRESS, help="Odd target, |m| <= X (default 1)")
    triples.add_argument("--shift", type=int, default=SUPPRESS, help="Shift A in the squarefree conditions")
    triples.add_argument("--w", type=int, default=SUPPRESS, help="Squarefree bound w (default 1: no condition)")
    triples.add_argument("--k", type=int, default=SUPPRESS, help="Squarefree modulus for the classes (default 1)")
    triples.add_argument("--a1", type=int, default=SUPPRESS, help="Class of p1 mod k²")
    triples.add_argument("--a2", type=int, default=SUPPRESS, help="Class of p2 mod k²")
    triples.add_argument("--cutoff", type=int, default=SUPPRESS, help="Singular series prime cutoff")

    report = subparsers.add_parser("report", help="Acceptance report over JSON result files")
    report.add_argument("--in", dest="in", nargs="+", default=SUPPRESS, metavar="RESULT", help="Result files")

    constants = subparsers.add_parser("constants", help="Print 6/π², c and the Möbius pair probabilities")
    constants.add_argument("--cutoff", type=int, default=SUPPRESS, help="Euler product cutoff (default 10^6)")

    return parser


def main(argv: list[str] | None = None):
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )

    if args.command is None and args.experiment is None:
        parser.print_help()
        sys.exit(EXIT_USAGE)
    sys.exit(cmd_experiment(args))


if __name__ == "__main__":
    main()
