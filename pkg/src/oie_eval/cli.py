"""Command-line entry point: ``oie-eval {score,match-eval,lint,correlate}``.

Exit status: 0 success, 1 I/O error, 2 malformed input, 3 precondition
violation (e.g. too few systems to correlate).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from itertools import combinations
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .annotation_io import FormatError, parse_extractions, parse_gold, parse_match_annotations, parse_score_table
from .lint import LOOSE, STRICT, diff_annotation_sets, lint_corpus, sentence_counts, unaligned_sentences
from .matcher import MatcherConfig, default_jobs, match_corpus
from .report import RunManifest, manifest_text, table, to_json
from .scorer import (
    CorrelationReport,
    evaluate_matcher,
    extraction_length_stats,
    filter_by_confidence,
    flatten_gold,
    pearson,
    score_corpus,
    token_level_score,
)

EXIT_OK, EXIT_IO, EXIT_FORMAT, EXIT_PRECONDITION = 0, 1, 2, 3

log = logging.getLogger("oie_eval")


class PreconditionError(Exception):
    pass


def _configs(name: str) -> list[MatcherConfig]:
    if name == "all":
        return [MatcherConfig.from_name(n) for n in MatcherConfig.VARIANTS]
    return [MatcherConfig.from_name(name)]


def _emit(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- score


def cmd_score(args) -> int:
    gold = parse_gold(Path(args.gold))
    systems = [parse_extractions(Path(p)) for p in args.extractions]
    configs = _configs(args.matcher)
    flat = flatten_gold(gold) if args.token_level else None

    results = []
    for cfg in configs:
        for xs in systems:
            xs = filter_by_confidence(xs, args.min_confidence)
            decisions = match_corpus(xs, gold, cfg, jobs=args.jobs)
            rep = score_corpus(decisions, gold, xs)
            entry = {
                "system": xs.system_name,
                "matcher": cfg.name,
                **rep.to_dict(),
                "mean_extraction_length": extraction_length_stats(xs) if len(xs) else None,
                "methods": _method_counts(decisions),
            }
            if flat is not None:
                tok = token_level_score(xs, flat)
                entry["token_level"] = {k: v for k, v in tok.to_dict().items() if k != "per_sentence"}
            results.append(entry)

    manifest = RunManifest.create("score", [args.gold, *args.extractions], configs[0] if len(configs) == 1 else None)
    if args.format == "json":
        _emit(args, to_json(manifest, {"reports": results}))
        return EXIT_OK
    headers = ["system", "matcher", "P", "R", "F1", "matched_ext", "extractions", "matched_clusters", "clusters", "mean_len"]
    rows = [
        [r["system"], r["matcher"], r["precision"], r["recall"], r["f1"], r["matched_extractions"],
         r["total_extractions"], r["matched_clusters"], r["total_clusters"], r["mean_extraction_length"]]
        for r in results
    ]
    out = manifest_text(manifest) + table(headers, rows)
    if flat is not None:
        out += "\n# token-level baseline\n" + table(
            ["system", "P", "R", "F1"],
            [[r["system"], r["token_level"]["precision"], r["token_level"]["recall"], r["token_level"]["f1"]]
             for r in results if r["matcher"] == configs[0].name],
        )
    if args.per_sentence:
        for r in results:
            out += f"\n# per sentence: {r['system']} ({r['matcher']})\n"
            out += table(
                ["sent_id", "extractions", "matched", "clusters", "matched_clusters", "orphan"],
                [[s["sent_id"], s["extractions"], s["matched_extractions"], s["clusters"], s["matched_clusters"], s["orphan"]]
                 for s in r["per_sentence"]],
            )
    _emit(args, out)
    return EXIT_OK


def _method_counts(decisions) -> dict[str, int]:
    counts = {"EM": 0, "AF": 0, "LOD": 0, "NONE": 0, "punc": 0}
    for d in decisions:
        counts[d.method.value] += 1
        counts["punc"] += d.punc_used
    return counts


# ---------------------------------------------------------------- match-eval


def cmd_match_eval(args) -> int:
    gold = parse_gold(Path(args.gold))
    anns = parse_match_annotations(Path(args.matches), gold=gold)
    configs = _configs(args.matcher)
    results = []
    for cfg in configs:
        decisions = match_corpus([a.extraction for a in anns], gold, cfg, jobs=args.jobs)
        rep = evaluate_matcher(decisions, anns)
        results.append({"matcher": cfg.name, **rep.to_dict()})

    manifest = RunManifest.create("match-eval", [args.gold, args.matches], configs[0] if len(configs) == 1 else None)
    if args.format == "json":
        _emit(args, to_json(manifest, {"reports": results}))
        return EXIT_OK
    headers = ["matcher", "P", "R", "F1", "correct", "wrong_cluster", "spurious", "missed", "correct_none", "pairs"]
    rows = [
        [r["matcher"], r["precision"], r["recall"], r["f1"], r["correct_match"], r["wrong_cluster"],
         r["spurious_match"], r["missed_match"], r["correct_none"], r["total"]]
        for r in results
    ]
    _emit(args, manifest_text(manifest) + table(headers, rows))
    return EXIT_OK


# ---------------------------------------------------------------- lint


def cmd_lint(args) -> int:
    gold = parse_gold(Path(args.gold))
    modes = {"strict": (STRICT,), "loose": (LOOSE,), "both": (STRICT, LOOSE)}[args.mode]
    findings = lint_corpus(gold, modes)
    inputs = [args.gold]
    unaligned = None
    if args.other:
        other = parse_gold(Path(args.other))
        inputs.append(args.other)
        try:
            findings += diff_annotation_sets(gold, other)
        except ValueError as err:
            raise PreconditionError(str(err)) from None
        only_a, only_b = unaligned_sentences(gold, other)
        unaligned = {"only_first": only_a, "only_second": only_b}
        if only_a or only_b:
            print(f"warning: {len(only_a) + len(only_b)} unaligned sentences", file=sys.stderr)

    manifest = RunManifest.create("lint", inputs)
    counts = sentence_counts(findings)
    if args.format == "json":
        body = {"findings": [f.to_dict() for f in findings], "sentence_counts": counts}
        if unaligned is not None:
            body["unaligned"] = unaligned
        _emit(args, to_json(manifest, body))
        return EXIT_OK
    out = manifest_text(manifest)
    for kind in ("DOUBLE_ANNOTATION", "DOUBLE_MEANING", "CROSS_SET_MISSING"):
        group = [f for f in findings if f.kind.value == kind]
        out += f"\n== {kind} ({len(group)})\n"
        for f in group:
            tag = f.severity if f.direction is None else f.direction
            out += f"{f.sent_id}  clusters {','.join(map(str, f.clusters))}  [{f.mode}/{tag}]\n"
            out += "".join(f"    {w}\n" for w in f.witnesses)
    out += "\n== sentence counts\n" + table(["proxy", "sentences"], sorted(counts.items()))
    _emit(args, out)
    return EXIT_OK


# ---------------------------------------------------------------- correlate


def cmd_correlate(args) -> int:
    scores = parse_score_table(Path(args.scores))
    if len(scores.row_labels) < 2:
        raise PreconditionError("need at least two systems to correlate")
    cols = scores.column_labels
    if args.pair:
        pairs = []
        for spec in args.pair:
            x, sep, y = spec.partition(":")
            if not sep:
                raise PreconditionError(f"column pair {spec!r} must look like X:Y")
            pairs.append((x, y))
    elif args.against:
        pairs = [(c, args.against) for c in cols if c != args.against]
    else:
        pairs = list(combinations(cols, 2))
    for x, y in pairs:
        for c in (x, y):
            if c not in cols:
                raise PreconditionError(f"unknown column {c!r}; have {', '.join(cols)}")

    report = CorrelationReport()
    for x, y in pairs:
        label = f"{x}:{y}"
        xs, ys = scores.column(x), scores.column(y)
        keep = [i for i in range(len(xs)) if not (math.isnan(xs[i]) or math.isnan(ys[i]))]
        if len(keep) < len(xs):
            report.notes.append(f"{label}: {len(xs) - len(keep)} systems with missing values skipped")
        try:
            r = pearson([xs[i] for i in keep], [ys[i] for i in keep])
        except ValueError as err:
            report.notes.append(f"{label}: coefficient omitted ({err})")
            r = None
        report.pairs.append((label, r))

    manifest = RunManifest.create("correlate", [args.scores])
    if args.format == "json":
        _emit(args, to_json(manifest, report.to_dict()))
        return EXIT_OK
    out = manifest_text(manifest) + table(["pair", "pearson"], report.pairs)
    out += "".join(f"# note: {n}\n" for n in report.notes)
    _emit(args, out)
    return EXIT_OK


# ---------------------------------------------------------------- plumbing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oie-eval", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, matcher=True):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")
        if matcher:
            sp.add_argument(
                "--matcher", default="em+af+lod+punc",
                choices=MatcherConfig.VARIANTS + ("all",),
                help="matching function variant (default: %(default)s)",
            )
            sp.add_argument("--jobs", type=int, default=default_jobs(),
                            help="worker processes (default: $OIE_EVAL_JOBS or 1)")

    sp = sub.add_parser("score", help="precision/recall/F1 of one or more systems")
    sp.add_argument("gold")
    sp.add_argument("extractions", nargs="+")
    sp.add_argument("--min-confidence", type=float, default=None,
                    help="drop extractions scored below this confidence (off by default)")
    sp.add_argument("--token-level", action="store_true", help="also report the token-overlap baseline")
    sp.add_argument("--per-sentence", action="store_true", help="include the per-sentence table in text output")
    common(sp)
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("match-eval", help="evaluate a matcher against human match labels")
    sp.add_argument("gold")
    sp.add_argument("matches")
    common(sp)
    sp.set_defaults(func=cmd_match_eval)

    sp = sub.add_parser("lint", help="annotation-quality proxies; with two files, also a cross-set diff")
    sp.add_argument("gold")
    sp.add_argument("other", nargs="?")
    sp.add_argument("--mode", choices=("strict", "loose", "both"), default="both")
    common(sp, matcher=False)
    sp.set_defaults(func=cmd_lint)

    sp = sub.add_parser("correlate", help="Pearson correlation between score-table columns")
    sp.add_argument("scores")
    sp.add_argument("--pair", action="append", metavar="X:Y", help="column pair; repeatable")
    sp.add_argument("--against", metavar="COL", help="correlate every other column with COL")
    common(sp, matcher=False)
    sp.set_defaults(func=cmd_correlate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_PRECONDITION
    try:
        return args.func(args)
    except FormatError as err:
        print(str(err), file=sys.stderr)
        return EXIT_FORMAT
    except OSError as err:
        print(f"{getattr(err, 'filename', '') or ''}: {err.strerror or err}", file=sys.stderr)
        return EXIT_IO
    except PreconditionError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
