"""Command line entry point.

    intervalnull analyze   --study CLARIFY --outcome ACS --method two-step --alpha 0.5,0.8
    intervalnull reproduce 1
    intervalnull meta      --svg forest.svg
    intervalnull qcurve    --study STAMINA --svg q.svg

Exit codes: 0 ok, 2 malformed input, 3 degenerate 2x2 table, 4 an assigned
probability violates a method constraint (e.g. gamma below its floor).

P values are read through two rival scenarios for a hypothetical repeat of
the study: in one the chance of an estimate at least as extreme as observed
is no larger than the P value, in the other it is larger. The first holds
exactly when the null side is true, so the probability the analyst gives
each scenario is a post-data probability for the hypotheses; ``--gamma`` and
``--beta`` are those probabilities.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from intervalnull import inference, meta, plotting, report
from intervalnull.dist import SpecialInterval
from intervalnull.effects import DegenerateTableError, likelihood, log_odds_ratio, woolf_se

EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_CONSTRAINT = 4


def _prob_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    for v in values:
        if not 0.0 < v < 1.0:
            raise argparse.ArgumentTypeError(f"probabilities must lie in (0, 1), got {v}")
    return values


def _level(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("level must lie in (0, 1)")
    return v


def _epsilon(text: str) -> float:
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError("epsilon must be >= 0")
    return v


def _add_common(p, study=True):
    p.add_argument("--input", type=Path, default=None, help="study CSV (default: bundled data)")
    if study:
        p.add_argument("--study", required=True)
        p.add_argument("--outcome", default=None)
        p.add_argument("--theta0", type=float, default=0.0, help="special value of the log OR")
        p.add_argument("--epsilon", type=_epsilon, default=0.1, help="half-width of the special interval")
    p.add_argument("--level", type=_level, default=0.95)
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intervalnull", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run one method on one study")
    _add_common(p)
    p.add_argument("--method", choices=("flat", "two-step", "p-hybrid", "q-hybrid"), required=True)
    p.add_argument("--alpha", type=_prob_list, default=[0.5, 0.8], help="prior interval probabilities (two-step)")
    p.add_argument("--gamma", type=_prob_list, default=[0.05], help="P(theta >= theta0-eps) (p-hybrid)")
    p.add_argument("--beta", type=_prob_list, default=[0.05], help="P(theta in interval) (q-hybrid)")
    p.add_argument("--prior", type=_prob_list, default=[], help="prior interval probability to carry over "
                   "when no one-sided test applies (p-hybrid)")

    p = sub.add_parser("reproduce", help="recompute a published table from the bundled data")
    p.add_argument("table", type=int, choices=(1, 2, 3))
    p.add_argument("--level", type=_level, default=0.95)
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--figures", type=Path, default=None, help="directory for forest plot and Q curve SVGs")

    p = sub.add_parser("meta", help="DerSimonian-Laird pooling of all studies in the input")
    _add_common(p, study=False)
    p.add_argument("--svg", type=Path, default=None, help="write a forest plot here")

    p = sub.add_parser("qcurve", help="Q value as a function of the null mean")
    _add_common(p)
    p.add_argument("--svg", type=Path, default=None)
    p.add_argument("--points", type=int, default=201)
    return parser


def _study_likelihood(args):
    records = report.load_studies(args.input)
    rec = report.select_study(records, args.study, args.outcome)
    return rec, likelihood(rec.table())


def cmd_analyze(args) -> str:
    _, lik = _study_likelihood(args)
    interval = SpecialInterval(args.theta0, args.epsilon)
    values = {"two-step": args.alpha, "p-hybrid": args.gamma, "q-hybrid": args.beta}.get(args.method, [])
    rows = report.method_rows(lik, interval, args.method, values, args.level, priors=args.prior)
    return report.render_rows(rows, args.format)


def cmd_reproduce(args) -> str:
    tab = report.reproduce_table(args.table, level=args.level)
    if args.figures is not None:
        args.figures.mkdir(parents=True, exist_ok=True)
        records = report.load_studies()
        studies = [meta.StudyEffect(r.label, log_odds_ratio(r.table()), woolf_se(r.table())) for r in records]
        plotting.forest_figure(
            meta.forest_rows(studies, meta.dersimonian_laird(studies, args.level), args.level),
            args.figures / "forest.svg",
        )
        plotting.qcurve_figure(tab.likelihood, report.REPRO_INTERVAL, args.figures / f"qcurve_table{args.table}.svg")
    return report.render_reproduction(tab, args.format)


def cmd_meta(args) -> str:
    records = report.load_studies(args.input)
    studies = [meta.StudyEffect(r.label, log_odds_ratio(r.table()), woolf_se(r.table())) for r in records]
    pooled = meta.dersimonian_laird(studies, args.level)
    rows = meta.forest_rows(studies, pooled, args.level)
    if args.svg is not None:
        plotting.forest_figure(rows, args.svg)

    if args.format == "json":
        return json.dumps(
            {
                "studies": [{"label": r.label, "or": r.odds_ratio, "lo": r.lo, "hi": r.hi} for r in rows[:-1]],
                "combined": {
                    "or": rows[-1].odds_ratio, "lo": rows[-1].lo, "hi": rows[-1].hi,
                    "pooled_log_or": pooled.pooled, "pooled_se": pooled.pooled_se,
                    "tau2": pooled.tau2, "q_stat": pooled.q_stat, "k": pooled.k,
                },
            },
            indent=2,
        )
    if args.format == "csv":
        lines = ["label,or,lo,hi"] + [f"{r.label},{r.odds_ratio!r},{r.lo!r},{r.hi!r}" for r in rows]
        return "\n".join(lines)
    width = max(len(r.label) for r in rows)
    lines = [f"{r.label.ljust(width)}  {r.odds_ratio:.3f}  ({r.lo:.3f}, {r.hi:.3f})" for r in rows]
    lines.append(f"tau^2 = {pooled.tau2:.4f}, Q = {pooled.q_stat:.4f} on {pooled.k - 1} df")
    return "\n".join(lines)


def cmd_qcurve(args) -> str:
    rec, lik = _study_likelihood(args)
    interval = SpecialInterval(args.theta0, args.epsilon)
    if args.svg is not None:
        marked = plotting.qcurve_figure(lik, interval, args.svg, args.points)
    else:
        marked = inference.q_value(lik, interval, interval.upper())
    if args.format == "json":
        grid, values, _ = plotting.qcurve_data(lik, interval, args.points)
        return json.dumps(
            {"study": rec.label, "mu_star": interval.upper(), "q": marked,
             "grid": grid.tolist(), "values": values.tolist()},
            indent=2,
        )
    if args.format == "csv":
        grid, values, _ = plotting.qcurve_data(lik, interval, args.points)
        return "\n".join(["mu_star,q"] + [f"{m!r},{v!r}" for m, v in zip(grid.tolist(), values.tolist())])
    return f"{rec.label}: q({interval.upper():g}) = {marked:.4f}"


COMMANDS = {"analyze": cmd_analyze, "reproduce": cmd_reproduce, "meta": cmd_meta, "qcurve": cmd_qcurve}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = COMMANDS[args.command](args)
    except report.InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateTableError as exc:
        print(f"error: degenerate table: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except inference.FloorViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except inference.NoEvidenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
