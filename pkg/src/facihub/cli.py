"""Command-line shell: subcommands map 1:1 to engine operations.

Exit codes: 0 success, 2 usage errors, 1 operational errors (one
machine-parseable JSON error line on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

from .config import load_config
from .engine import Engine
from .errors import EngineError
from .records import format_timestamp, parse_timestamp


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facihub",
                                     description="discussion facilitation engine")
    parser.add_argument("--config", default=None,
                        help="config file (default: $FACIHUB_CONFIG or built-ins)")
    sub = parser.add_subparsers(dest="command")

    p_ingest = sub.add_parser("ingest", help="ingest a line-delimited log file")
    p_ingest.add_argument("path")

    p_run = sub.add_parser("run", help="one targeting + generation run")
    p_run.add_argument("--as-of", required=True, help="ISO-8601 instant")
    p_run.add_argument("--export-centrality", default=None, metavar="PATH",
                       help="also export the window's centrality table")

    p_publish = sub.add_parser("publish", help="publish accepted candidates")
    p_publish.add_argument("--since", default=None)
    p_publish.add_argument("--published-at", default=None)

    p_metrics = sub.add_parser("metrics", help="acceptance metrics table")
    p_metrics.add_argument("--from", dest="start", default=None)
    p_metrics.add_argument("--to", dest="end", default=None)
    p_metrics.add_argument("--out", default=None)

    p_analyze = sub.add_parser("analyze", help="evaluation reports")
    group = p_analyze.add_mutually_exclusive_group(required=True)
    group.add_argument("--goal", choices=["1", "2"])
    group.add_argument("--permutation", metavar="INDICATOR")
    group.add_argument("--balance", action="store_true")
    group.add_argument("--learner-means", action="store_true",
                       help="export index vectors keyed by (learner, condition)")
    p_analyze.add_argument("--out", default=None)
    p_analyze.add_argument("--n-permutations", type=int, default=None)
    p_analyze.add_argument("--seed", type=int, default=None)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8400)
    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _instant(value: str | None) -> datetime | None:
    return parse_timestamp(value) if value else None


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        engine = Engine(load_config(args.config))
        return _dispatch(engine, args)
    except (EngineError, ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                     "message": str(exc)}) + "\n")
        return 1


def _dispatch(engine: Engine, args) -> int:
    if args.command == "ingest":
        report = engine.ingest_path(args.path)
        print(json.dumps({"accepted": report.accepted,
                          "duplicates_dropped": report.duplicates_dropped,
                          "rejected": [{"line": n, "reason": r}
                                       for n, r in report.rejected]}))
        return 0
    if args.command == "run":
        as_of = parse_timestamp(args.as_of)
        manifest = engine.run(as_of)
        if args.export_centrality:
            engine.export_centrality(as_of, args.export_centrality)
        print(json.dumps({
            "as_of": format_timestamp(manifest.as_of),
            "window_start": format_timestamp(manifest.window_start),
            "window_end": format_timestamp(manifest.window_end),
            "n_network": manifest.n_network,
            "n_learner_reply": manifest.n_learner_reply,
            "n_emitted": manifest.n_emitted,
            "n_filtered_out": manifest.n_filtered_out,
            "assignment_delta": manifest.assignment_delta}))
        return 0
    if args.command == "publish":
        events = engine.publish(since=_instant(args.since),
                                published_at=_instant(args.published_at))
        print(json.dumps({"published": [e.candidate_id for e in events]}))
        return 0
    if args.command == "metrics":
        metrics = engine.metrics(_instant(args.start), _instant(args.end))
        _emit(metrics.to_tsv(), args.out)
        return 0
    if args.command == "analyze":
        if args.goal:
            report = engine.goal1_report() if args.goal == "1" else engine.goal2_report()
            _emit(report.to_tsv(), args.out)
        elif args.learner_means:
            from .presence import index_export_tsv

            _emit(index_export_tsv(engine.learner_condition_means()), args.out)
        elif args.permutation:
            result = engine.permutation_report(args.permutation,
                                               args.n_permutations, args.seed)
            lines = ["indicator\tobserved_delta\tnull_lo\tnull_hi\tpercentile"
                     "\tempirical_p_two_tailed\tn_permutations\tseed"]
            lines.append(f"{result.indicator}\t{result.observed_delta:.6g}"
                         f"\t{result.null_interval_95[0]:.6g}"
                         f"\t{result.null_interval_95[1]:.6g}"
                         f"\t{result.percentile:.6g}"
                         f"\t{result.empirical_p_two_tailed:.6g}"
                         f"\t{result.n_permutations}\t{result.seed}")
            _emit("\n".join(lines) + "\n", args.out)
        else:
            _emit(engine.balance_report().to_tsv(), args.out)
        return 0
    if args.command == "serve":
        from .api import serve

        serve(engine, host=args.host, port=args.port)
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
