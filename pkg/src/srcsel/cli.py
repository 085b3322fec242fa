"""Command-line entry point: ``srcsel {gen,select,bench,eval}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import STRATEGIES, SWEEPS, BenchSpec, format_rows, run_bench
from .evaluation import attach_metrics, emit_report, evaluate, read_golden
from .index import build_index
from .model import CatalogError, ingest_claims, read_query
from .selection import SelectionConfig, run_selection
from .synth import SyntheticConfig, generate_dataset, write_dataset

logger = logging.getLogger("srcsel")

EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_GUARD = 4


def _shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--claims", help="claims CSV (source,item,value,prob)")
    p.add_argument("--costs", help="costs CSV (source,cost); missing sources cost 1")
    p.add_argument("--query", help="file with one item id per line (default: all items)")
    p.add_argument("--golden", help="golden standard CSV (item,value)")
    p.add_argument("--out", help="output path")
    p.add_argument("--seed", type=int, default=0)


def _selection_flags(p: argparse.ArgumentParser, default_rho=None) -> None:
    p.add_argument("--objective", choices=["mincost", "maxcontrib"], default="mincost")
    p.add_argument("--budget", type=float)
    p.add_argument("--rho", type=float, default=default_rho)


def _gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sources", type=int, default=1000)
    p.add_argument("--mu", type=float, default=100.0, help="mean items per source")
    p.add_argument("--sigma", type=float, help="std dev of source size (default mu/3)")
    p.add_argument("--items", type=int, help="item universe size (default 2*mu)")
    p.add_argument("--values-per-item", type=int, default=4, help="wrong values per item")
    p.add_argument("--error-frac", type=float, default=0.2, help="mean error count as a fraction of mu")
    p.add_argument("--golden-frac", type=float, default=1.0)
    p.add_argument("--max-cost", type=float, default=1.0)


def _gen_config(args) -> SyntheticConfig:
    return SyntheticConfig(
        n_sources=args.sources,
        mean_source_size=args.mu,
        n_items=args.items,
        values_per_item=args.values_per_item,
        size_sigma=args.sigma,
        error_mean_fraction=args.error_frac,
        golden_fraction=args.golden_frac,
        max_cost=args.max_cost,
        seed=args.seed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srcsel", description="Truth-aware data source selection.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    _gen_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("select", help="select sources")
    _shared(p)
    _selection_flags(p)
    p.add_argument("--prune", choices=["none", "value", "source", "both"], default="none")
    p.add_argument("--format", choices=["json", "text"], default="json")

    p = sub.add_parser("bench", help="run a strategy x parameter sweep")
    _shared(p)
    _selection_flags(p, default_rho=0.8)
    _gen_flags(p)
    p.add_argument("--sweep", choices=SWEEPS, required=True)
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--strategies", default=",".join(STRATEGIES))
    p.add_argument("--jobs", type=int, default=1, help="run sweep cells in parallel processes")
    p.add_argument("--json", help="also write full rows (with per-round counters) as JSON")

    p = sub.add_parser("eval", help="precision/recall of a selection")
    _shared(p)
    p.add_argument("--report", help="JSON report from `select`")
    p.add_argument("--sources", help="comma-separated source ids")
    return parser


def _usage(parser, msg: str):
    parser.error(msg)


def _prune_config(parser, args) -> SelectionConfig:
    if args.objective == "maxcontrib" and args.budget is None:
        _usage(parser, "--objective maxcontrib requires --budget")
    if args.objective == "mincost" and args.budget is not None:
        _usage(parser, "--budget only applies to --objective maxcontrib")
    value = args.prune in ("value", "both")
    if value and args.rho is None:
        _usage(parser, f"--prune {args.prune} requires --rho")
    if args.rho is not None and not value:
        _usage(parser, "--rho requires --prune value or both")
    return SelectionConfig(
        objective=args.objective,
        budget=args.budget,
        rho=args.rho if value else None,
        source_prune=args.prune in ("source", "both"),
    )


def cmd_select(parser, args) -> int:
    if not args.claims:
        _usage(parser, "select requires --claims")
    config = _prune_config(parser, args)
    catalog = ingest_claims(args.claims, args.costs)
    query = read_query(args.query) if args.query else None
    index = build_index(catalog, query)
    report = run_selection(index, config)
    if args.golden:
        attach_metrics(report, catalog, read_golden(args.golden))
    text = emit_report(report, args.out, args.format)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_gen(parser, args) -> int:
    ds = generate_dataset(_gen_config(args))
    write_dataset(ds, args.out)
    print(json.dumps(ds.summary(), sort_keys=True))
    return 0


def cmd_bench(parser, args) -> int:
    if args.objective == "maxcontrib" and args.budget is None:
        _usage(parser, "--objective maxcontrib requires --budget")
    kind = int if args.sweep in ("sources", "items") else float
    try:
        values = tuple(kind(v) for v in args.values.split(","))
    except ValueError:
        _usage(parser, f"bad --values {args.values!r}")
    spec = BenchSpec(
        sweep=args.sweep,
        values=values,
        objective=args.objective,
        budget=args.budget,
        rho=args.rho,
        strategies=tuple(s.strip() for s in args.strategies.split(",")),
        gen=None if args.claims else _gen_config(args),
        claims=args.claims,
        costs=args.costs,
        golden_path=args.golden,
        seed=args.seed,
    )
    rows = run_bench(spec, jobs=args.jobs)
    table = format_rows(rows)
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    else:
        sys.stdout.write(table)
    if args.json:
        Path(args.json).write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_eval(parser, args) -> int:
    if not (args.claims and args.golden):
        _usage(parser, "eval requires --claims and --golden")
    if bool(args.report) == bool(args.sources):
        _usage(parser, "eval needs exactly one of --report or --sources")
    catalog = ingest_claims(args.claims, args.costs)
    if args.report:
        selected = json.loads(Path(args.report).read_text(encoding="utf-8"))["selected"]
    else:
        selected = [s.strip() for s in args.sources.split(",") if s.strip()]
    result = evaluate(catalog, selected, read_golden(args.golden))
    text = json.dumps(result.__dict__, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {"select": cmd_select, "gen": cmd_gen, "bench": cmd_bench, "eval": cmd_eval}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](parser, args)
    except (CatalogError, OSError) as exc:
        print(f"srcsel: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"srcsel: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
