"""Command-line interface.

Exit codes: 0 success, 1 parse/validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import PtLoadError, ScenarioError, StageError
from .numerology import Numerology, carrier_bandwidth, partition_subbands, subcarrier_spacing

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {text}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptload", description="Portfolio-theory power loading across OFDM sub-bands.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("frontier", help="sample portfolios, extract the efficient frontier, refine the optimum")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--out-cloud", metavar="PATH", help="write the evaluated portfolio cloud as CSV")
    p.add_argument("--out-report", metavar="PATH", help="write the full run report as JSON")
    p.add_argument("--out-figure", metavar="PATH", help="render the mean-SD figure (png/svg/pdf)")
    p.add_argument("--seed", type=_u64, help="override run.seed")
    p.add_argument("--portfolios", type=_positive, help="override run.portfolios")
    p.add_argument("--draws", type=_positive, help="override run.draws")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress the summary")

    p = sub.add_parser("validate", help="check a scenario file and print its resolved parameters")
    p.add_argument("scenario")

    p = sub.add_parser("numerology", help="carrier and sub-band geometry")
    p.add_argument("--mu", type=int, required=True)
    p.add_argument("--payload", type=int, required=True, help="payload subcarriers")
    p.add_argument("--bands", type=int, default=1)
    p.add_argument("--fft-size", type=int, default=2048)

    p = sub.add_parser("baseline", help="evaluate the single-sub-band allocations only")
    p.add_argument("scenario")
    p.add_argument("--seed", type=_u64)
    p.add_argument("--draws", type=_positive)
    return parser


def _load(args):
    from .scenario import load_scenario

    s = load_scenario(args.scenario)
    return s.with_run(
        seed=getattr(args, "seed", None),
        portfolios=getattr(args, "portfolios", None),
        draws=getattr(args, "draws", None),
    )


def _cmd_frontier(args) -> int:
    from .report import export_cloud, run_frontier, summary_lines, write_report

    scenario = _load(args)
    report = run_frontier(scenario)
    if args.out_cloud:
        export_cloud(report, args.out_cloud)
    if args.out_report:
        write_report(report, args.out_report)
    if args.out_figure:
        from .plotting import save_frontier_figure

        save_frontier_figure(report, args.out_figure)
    if not args.quiet:
        print("\n".join(summary_lines(report)))
    return EXIT_OK


def _cmd_validate(args) -> int:
    s = _load(args)
    g = s.geometry
    print(f"ok: {args.scenario}")
    print(f"bands={s.m} subcarriers_per_band={g.subcarriers_per_band} bandwidth_per_band_hz={g.bandwidth_per_band}")
    print(f"total_power_w={s.total_power_w!r} portfolios={s.run.portfolios} draws={s.run.draws} seed={s.run.seed}")
    for i, b in enumerate(s.bands):
        marg = b.interference
        params = ", ".join(repr(p) for p in marg.params) if marg.kind != "empirical" else f"{len(marg.samples)} samples"
        print(f"band {i + 1}: gain={b.channel_gain!r} noise_w={b.noise_power_w!r} interference={marg.kind}({params})")
    return EXIT_OK


def _cmd_numerology(args) -> int:
    n = Numerology(mu=args.mu, fft_size=args.fft_size, payload_subcarriers=args.payload)
    g = partition_subbands(n, args.bands)
    print(f"subcarrier_spacing_hz={subcarrier_spacing(n)}")
    print(f"carrier_bandwidth_hz={carrier_bandwidth(n)}")
    print(f"bands={g.count} subcarriers_per_band={g.subcarriers_per_band} bandwidth_per_band_hz={g.bandwidth_per_band}")
    return EXIT_OK


def _cmd_baseline(args) -> int:
    from .report import baseline_sweep

    s = _load(args)
    print("band,mean_bps,sd_bps")
    for i, e in enumerate(baseline_sweep(s)):
        print(f"{i + 1},{e.mean:.17g},{e.sd:.17g}")
    return EXIT_OK


_COMMANDS = {
    "frontier": _cmd_frontier,
    "validate": _cmd_validate,
    "numerology": _cmd_numerology,
    "baseline": _cmd_baseline,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ScenarioError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except PtLoadError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
