"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 size limit, 3 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .analysis import SCHEMA_VERSION, compare, intervalize_matrix, score_runs
from .config import Config
from .errors import InputError, IRScalesError
from .grammar import parse_statement
from .meaningfulness import FamilyKind, TransformationFamily, check_meaningfulness
from .measures import rb_dependence_report
from .scales import (
    ScaleType,
    achievable_points,
    check_affine_equivalent,
    check_equispaced,
    intervalize,
)
from .serp import TopicContext, make_serp
from .trec import load_samples, parse_qrels, parse_run


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--config", help="JSON file with default settings")
    g.add_argument("--measure", help="measure name: p, rr, ap, dcg, ndcg, rbp, err (optionally @k)")
    g.add_argument("--p", type=float, help="RBP persistence (default 0.5)")
    g.add_argument("--k", type=int, help="SERP length / cutoff")
    g.add_argument("--gmax", type=int, help="highest relevance grade (default 1, binary)")
    g.add_argument("--rb", type=int, help="recall base for AP/nDCG (default: k)")
    g.add_argument("--tol", type=float, help="relative tolerance for equi-spacing and affine fits")
    g.add_argument("--trials", type=int, help="random transformations per meaningfulness check")
    g.add_argument("--seed", type=int, help="random seed (mandatory for `meaningful`)")
    g.add_argument("--universe-cap", type=int, help="largest SERP universe to enumerate")
    g.add_argument("--rb-constrained", action="store_true", default=None,
                   help="only SERPs with at most RB relevant documents")
    g.add_argument("--format", choices=("json", "csv"), help="output format")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="irscales", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", parents=[common], help="score one SERP or a run file")
    p.add_argument("--serp", help="comma-separated grades, e.g. 0,1,1")
    p.add_argument("--run", help="TREC run file")
    p.add_argument("--qrels", help="TREC qrels file")

    sub.add_parser("points", parents=[common], help="achievable measurement points")
    sub.add_parser("check-scale", parents=[common], help="equi-spacing and affine report")

    p = sub.add_parser("intervalize", parents=[common], help="score-to-rank mapping")
    p.add_argument("--normalize", action="store_true", help="also rescale ranks to [0, 1]")

    p = sub.add_parser("meaningful", parents=[common], help="meaningfulness verdict for a statement")
    p.add_argument("statement", help='e.g. "mean(A) < mean(B)"')
    p.add_argument("--samples", help="JSON object of named samples")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--scale", choices=[s.value for s in ScaleType],
                   help="claimed scale type (default interval)")
    g.add_argument("--family", choices=[f.value for f in FamilyKind],
                   help="transformation family (implies the scale type)")
    p.add_argument("--no-whitelist", action="store_true", help="always sample, even for allowable statistics")
    p.add_argument("--exact", action="store_true", help="exact rational arithmetic")

    p = sub.add_parser("analyze", parents=[common], help="raw vs intervalized comparison of runs")
    p.add_argument("runs", nargs="+", help="TREC run files, one per system")
    p.add_argument("--qrels", required=True, help="TREC qrels file")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument("--matrices", action="store_true", help="include both score matrices in JSON output")
    return parser


def _config(args) -> Config:
    base = Config.load(args.config) if args.config else Config()
    return base.override(
        measure=args.measure,
        p=args.p,
        k=args.k,
        gmax=args.gmax,
        rb=args.rb,
        tol=args.tol,
        trials=args.trials,
        seed=args.seed,
        universe_cap=args.universe_cap,
        rb_constrained=args.rb_constrained,
        format=args.format,
    )


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def _scan_args(cfg: Config):
    """Measure, universe and topic context for the scale commands."""
    m = cfg.build_measure()
    k = cfg.depth()
    ctx = None
    constraint = None
    if m.rb_dependent:
        rb = cfg.rb if cfg.rb is not None else k
        ctx = TopicContext("cli", rb, cfg.gmax)
        if cfg.rb_constrained:
            constraint = rb
    return m, cfg.universe(constraint), ctx


def cmd_measure(args, cfg: Config) -> str:
    m = cfg.build_measure()
    fmt = cfg.format
    if args.serp is not None:
        if args.run:
            raise InputError("use either --serp or --run, not both")
        try:
            serp = make_serp((int(g) for g in args.serp.split(",")), cfg.gmax)
        except ValueError:
            raise InputError(f"--serp must be comma-separated integers, got {args.serp!r}") from None
        ctx = None
        if m.rb_dependent:
            rb = cfg.rb if cfg.rb is not None else len(serp)
            ctx = TopicContext("cli", rb, cfg.gmax)
        value = m(serp, ctx)
        if fmt == "csv":
            return _csv([["measure", "serp", "value"], [m.name, args.serp, repr(value)]])
        return _dump_json({
            "schema_version": SCHEMA_VERSION,
            "measure": m.name,
            "serp": list(serp),
            "recall_base": ctx.recall_base if ctx else None,
            "value": value,
        })
    if not (args.run and args.qrels):
        raise InputError("pass --serp, or --run together with --qrels")
    qrels = parse_qrels(args.qrels)
    matrix = score_runs([parse_run(args.run)], qrels, m, cfg.depth())
    if fmt == "json":
        return _dump_json(matrix.to_dict())
    return matrix.to_csv()


def cmd_points(args, cfg: Config) -> str:
    m, universe, ctx = _scan_args(cfg)
    scale = achievable_points(m, universe, ctx, cfg.dedup_tol)
    if cfg.format == "json":
        return _dump_json({
            "schema_version": SCHEMA_VERSION,
            "measure": m.name,
            "universe": universe.describe(),
            "recall_base": ctx.recall_base if ctx else None,
            "claimed_type": scale.claimed_type.value,
            "points": list(scale.points),
        })
    return _csv([["index", "value"], *([i, repr(v)] for i, v in enumerate(scale.points))])


def cmd_check_scale(args, cfg: Config) -> str:
    m, universe, ctx = _scan_args(cfg)
    scale = achievable_points(m, universe, ctx, cfg.dedup_tol)
    verdict = check_equispaced(scale, cfg.tol)
    ranks = intervalize(m, universe, ctx, dedup_tol=cfg.dedup_tol).mapped_points()
    fit = check_affine_equivalent(scale, ranks, cfg.tol)
    rb = rb_dependence_report(m)
    report = {
        "schema_version": SCHEMA_VERSION,
        "measure": m.name,
        "universe": universe.describe(),
        "recall_base": ctx.recall_base if ctx else None,
        "n_points": len(scale),
        "claimed_type": scale.claimed_type.value,
        "equispacing": verdict.to_dict(),
        "affine_to_intervalized": None if fit is None else {
            "alpha": fit.alpha, "beta": fit.beta, "max_residual": fit.max_residual,
        },
        "rb_dependent": rb.dependent,
        "rb_explanation": rb.explanation,
    }
    if cfg.format == "csv":
        rows = [["key", "value"]]
        for key, value in report.items():
            if isinstance(value, dict):
                rows.extend([f"{key}.{k}", json.dumps(v)] for k, v in value.items())
            else:
                rows.append([key, json.dumps(value)])
        return _csv(rows)
    return _dump_json(report)


def cmd_intervalize(args, cfg: Config) -> str:
    m, universe, ctx = _scan_args(cfg)
    mapping = intervalize(m, universe, ctx, normalize=args.normalize, dedup_tol=cfg.dedup_tol)
    if cfg.format == "json":
        return _dump_json({
            "schema_version": SCHEMA_VERSION,
            "measure": m.name,
            "universe": universe.describe(),
            "normalized": args.normalize,
            "mapping": [{"value": v, "rank": r, "mapped": s} for v, r, s in mapping.rows()],
        })
    return _csv([["value", "rank", "mapped"], *([repr(v), r, repr(s)] for v, r, s in mapping.rows())])


def cmd_meaningful(args, cfg: Config) -> str:
    seed = cfg.require_seed()
    samples = load_samples(args.samples) if args.samples else {}
    st, used = parse_statement(args.statement, samples, cfg.eq_tol)
    if args.family:
        family = TransformationFamily(args.family)
        claimed = family.scale_type
    else:
        claimed = ScaleType(args.scale or "interval")
        family = TransformationFamily.for_scale(claimed)
    verdict = check_meaningfulness(
        st, used, family, cfg.trials, seed,
        claimed_type=claimed, use_whitelist=not args.no_whitelist, exact=args.exact,
    )
    out = {"schema_version": SCHEMA_VERSION, **verdict.to_dict()}
    if cfg.format == "csv":
        return _csv([["key", "value"], *([k, json.dumps(v)] for k, v in out.items())])
    return _dump_json(out)


def cmd_analyze(args, cfg: Config) -> str:
    m = cfg.build_measure()
    k = cfg.depth()
    qrels = parse_qrels(args.qrels)
    runs = [parse_run(path) for path in args.runs]
    names = [r.name for r in runs]
    if len(set(names)) != len(names):
        raise InputError(f"run names must be unique, got {names}")
    raw = score_runs(runs, qrels, m, k)
    iv = intervalize_matrix(
        raw, m, k, cfg.grade_set, qrels, cfg.rb_constrained, cap=cfg.universe_cap
    )
    report = compare(raw, iv, args.alpha)
    if cfg.format == "csv":
        return report.to_csv()
    out = report.to_dict()
    out["topic_errors"] = raw.errors
    if args.matrices:
        out["raw_matrix"] = raw.to_dict()
        out["intervalized_matrix"] = iv.to_dict()
    return _dump_json(out)


COMMANDS = {
    "measure": cmd_measure,
    "points": cmd_points,
    "check-scale": cmd_check_scale,
    "intervalize": cmd_intervalize,
    "meaningful": cmd_meaningful,
    "analyze": cmd_analyze,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help and --version exit 0, usage errors exit 1
        return exc.code if isinstance(exc.code, int) else 1
    try:
        cfg = _config(args)
        out = COMMANDS[args.command](args, cfg)
    except IRScalesError as exc:
        print(f"irscales: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"irscales: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
