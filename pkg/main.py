#!/usr/bin/env python3
"""
Command-line front end: significant itemset mining, subsampling estimates and
the naive Bonferroni comparison
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

from config.mappings import EXIT_CODES, STRATEGY_ALIASES, TAIL_ALIASES
from config.settings import settings
from services.bonferroni import compare_factors
from services.errors import DegenerateLabelsError, LampError
from services.lamp_engine import (
    SearchStrategy,
    SignificantPattern,
    TaroneResult,
    find_significant,
    search_root,
    verify_root,
)
from services.reporting import (
    EstimateReport,
    RunSummary,
    render_compare_table,
    write_compare_tsv,
    write_model_json,
    write_patterns_tsv,
)
from services.subsample import repeat_estimates, summarize_estimates
from services.transaction_db import (
    LabelVector,
    TransactionDatabase,
    load_fimi,
    load_labels,
    synthetic_ratio_labels,
)

logger = logging.getLogger("lamp-miner")


def _load_inputs(args: argparse.Namespace) -> Tuple[TransactionDatabase, LabelVector]:
    db = load_fimi(args.data, remap=args.remap)
    if args.labels:
        labels = load_labels(args.labels, db.num_transactions)
    else:
        labels = synthetic_ratio_labels(db.num_transactions, args.ratio)
    return db, labels


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _elapsed_ms(start: float) -> float:
    return round((time.perf_counter() - start) * 1000.0, 3)


def _testability(args: argparse.Namespace) -> Tuple[TransactionDatabase, LabelVector, TaroneResult, List[SignificantPattern]]:
    """Full significance run with labels; root search only with --ratio"""
    db, labels = _load_inputs(args)
    strategy = SearchStrategy(STRATEGY_ALIASES[args.strategy])
    if args.labels:
        report = find_significant(
            db, labels, args.alpha, strategy=strategy, tail=TAIL_ALIASES[args.tail], threads=args.threads
        )
        if report.notice:
            print(f"⚠️  {report.notice}", file=sys.stderr)
        return db, labels, report.result, report.patterns
    result = search_root(db, labels.n, args.alpha, strategy=strategy, threads=args.threads)
    return db, labels, result, []


def cmd_run(args: argparse.Namespace) -> int:
    """Mine significant itemsets and write patterns.tsv and summary.json"""
    start = time.perf_counter()
    db, labels, result, patterns = _testability(args)

    verified = None
    if args.verify:
        verified = verify_root(db, result, threads=args.threads)
        if not verified:
            logger.error(f"Root frequency {result.sigma_rt} failed the definitional check")

    out = _out_dir(args)
    write_patterns_tsv(out / settings.PATTERNS_FILE, patterns)
    summary = RunSummary(
        dataset=str(args.data),
        N=db.num_transactions,
        P=db.num_items,
        n=labels.n,
        alpha=args.alpha,
        strategy=result.strategy.value,
        tail=args.tail,
        sigma_rt=result.sigma_rt,
        num_testable=result.num_testable,
        delta=result.delta,
        log_delta=result.log_delta,
        num_significant=len(patterns),
        miner_invocations=result.miner_invocations,
        wall_time_ms=_elapsed_ms(start),
        label_orientation=labels.orientation,
        threads=args.threads,
        version=settings.APP_VERSION,
        verified=verified,
    )
    write_model_json(out / settings.SUMMARY_FILE, summary)
    print(
        f"✅ sigma_rt={summary.sigma_rt} testable={summary.num_testable} "
        f"significant={summary.num_significant} -> {out}",
        file=sys.stderr,
    )
    return EXIT_CODES["ok"]


def cmd_estimate(args: argparse.Namespace) -> int:
    """Subsampling estimate of sigma_rt and the testable count over several seeds"""
    start = time.perf_counter()
    db, labels = _load_inputs(args)
    resample = not args.no_resample
    estimates = repeat_estimates(
        db, args.K, labels.n, args.alpha, args.reps, args.seed, resample=resample, threads=args.threads
    )
    summary = summarize_estimates(estimates, seed=args.seed, resampled=resample)
    report = EstimateReport(
        dataset=str(args.data),
        N=db.num_transactions,
        P=db.num_items,
        n=labels.n,
        alpha=args.alpha,
        label_orientation=labels.orientation,
        wall_time_ms=_elapsed_ms(start),
        version=settings.APP_VERSION,
        summary=summary,
    )
    out = _out_dir(args)
    write_model_json(out / settings.ESTIMATE_FILE, report)
    print(
        f"✅ APPROXIMATE sigma_hat={summary.sigma_hat_mean:.2f} ± {summary.sigma_hat_std:.2f} "
        f"testable~{summary.estimated_testable_mean:.3e} (K={args.K}, reps={args.reps}) -> {out}",
        file=sys.stderr,
    )
    return EXIT_CODES["ok"]


def cmd_compare(args: argparse.Namespace) -> int:
    """Tarone factor against naive Bonferroni factors of bounded interaction order"""
    db, _, result, _ = _testability(args)
    rows = compare_factors(result.num_testable, db.num_items, settings.NAIVE_ORDERS)
    out = _out_dir(args)
    write_compare_tsv(out / settings.COMPARE_FILE, rows, exact=args.exact)
    print(render_compare_table(rows, exact=args.exact))
    return EXIT_CODES["ok"]


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="FIMI transaction file")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--labels", help="label file, one 0/1 per transaction")
    source.add_argument("--ratio", type=int, help="testability only, with n = floor(N / ratio)")
    parser.add_argument("--alpha", type=float, default=settings.ALPHA, help="target FWER")
    parser.add_argument("--strategy", choices=sorted(STRATEGY_ALIASES), default=settings.DEFAULT_STRATEGY)
    parser.add_argument("--tail", choices=sorted(TAIL_ALIASES), default=settings.DEFAULT_TAIL)
    parser.add_argument("--threads", type=int, default=settings.THREADS, help="miner worker threads")
    parser.add_argument("--out", default=settings.OUTPUT_DIR, help="output directory")
    parser.add_argument(
        "--no-remap",
        dest="remap",
        action="store_false",
        default=settings.REMAP_ITEM_IDS,
        help="keep file item ids as internal ids (P = max id + 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lamp-miner", description=settings.APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="find significant itemsets")
    _add_common_arguments(run)
    run.add_argument("--verify", action="store_true", help="re-check the root frequency definition")
    run.set_defaults(handler=cmd_run)

    estimate = commands.add_parser("estimate", help="estimate sigma_rt by subsampling (approximate)")
    _add_common_arguments(estimate)
    estimate.add_argument("--K", type=int, default=2, help="subsampling ratio")
    estimate.add_argument("--reps", type=int, default=settings.DEFAULT_REPS)
    estimate.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    estimate.add_argument("--no-resample", action="store_true", help="use the full database every repetition")
    estimate.set_defaults(handler=cmd_estimate)

    compare = commands.add_parser("compare", help="compare with naive Bonferroni factors")
    _add_common_arguments(compare)
    compare.add_argument("--exact", action="store_true", help="print factors as exact integers")
    compare.set_defaults(handler=cmd_compare)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if not 0.0 < args.alpha < 1.0:
        parser.error(f"--alpha must lie in (0, 1), got {args.alpha}")
    if args.threads < 1:
        parser.error("--threads must be at least 1")

    try:
        return args.handler(args)
    except FileNotFoundError as e:
        print(f"❌ File not found: {e.filename}", file=sys.stderr)
        return EXIT_CODES["input_error"]
    except DegenerateLabelsError as e:
        print(f"❌ Degenerate data: {e}", file=sys.stderr)
        return EXIT_CODES["degenerate_data"]
    except LampError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CODES["input_error"]


if __name__ == "__main__":
    sys.exit(main())
