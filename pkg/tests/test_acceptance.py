"""Acceptance checks, one test per criterion.

Run under pytest (a PASS/FAIL line per criterion is added to the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

import strategies as S  # noqa: E402
from oie_eval import (  # noqa: E402
    Cluster,
    Extraction,
    MatcherConfig,
    SentenceGold,
    diff_annotation_sets,
    exact_match,
    extraction_length_stats,
    lint_corpus,
    match_corpus,
    match_extraction,
    parse_extractions,
    parse_gold,
    parse_match_annotations,
    parse_score_table,
    pearson,
    score_corpus,
    serialize_extractions,
    serialize_gold,
    serialize_match_annotations,
    serialize_score_table,
)
from oie_eval.annotation_io import FormatError  # noqa: E402
from oie_eval.cli import main as cli_main  # noqa: E402
from oie_eval.lint import LOOSE, STRICT, Kind  # noqa: E402

FIX = Path(__file__).parent / "fixtures"
CHAIN = ["em", "em+af", "em+af+lod", "em+af+lod+punc"]

CRITERIA = {
    1: "worked-example verdicts (prime minister, Chilly Gonzales, Alex, My Classical Way) in < 1 s",
    2: "exact_match agrees with a 2^k enumeration oracle on 1000 fuzzed pairs",
    3: "matched sets nested EM <= EM+AF <= EM+AF+LoD <= full on 200 fuzzed corpora",
    4: "scoring arithmetic: P=2/3, R=1/2, F1=4/7; empty and perfect cases",
    5: "Pearson: identity, negation, affine invariance, 4-point oracle",
    6: "lint proxies fire exactly the expected findings; self-diff is empty",
    7: "parse/serialize fixpoint on fixtures and fuzzed files; fuzzed bytes never crash",
    8: "--jobs 1 and --jobs 8 reports identical on 300 sentences x 7 systems in < 10 s",
    9: "mean extraction length of a {7, 8}-token fixture is 7.5",
}


# ---------------------------------------------------------------- 1


def test_criterion_1():
    start = time.perf_counter()
    gold = parse_gold(FIX / "worked.gold")
    anns = parse_match_annotations(FIX / "worked.matches", gold=gold)
    by = gold.by_id()
    verdict = {}
    for name in MatcherConfig.VARIANTS:
        cfg = MatcherConfig.from_name(name)
        verdict[name] = [match_extraction(a.extraction, by[a.extraction.sent_id], cfg).matched_cluster for a in anns]
    elapsed = time.perf_counter() - start

    pm_neg, pm_pos, cg_is, cg_and, alex_pos, alex_neg, mcw = range(7)
    for name, v in verdict.items():
        assert v[pm_neg] is None, name
        assert v[alex_neg] is None, name
    assert verdict["em"][pm_pos] is None
    assert verdict["em+af+lod+punc"][pm_pos] == 1
    for i, cluster in ((cg_is, 4), (cg_and, 1)):
        assert verdict["em"][i] is None
        assert verdict["em+af"][i] == cluster
    assert verdict["em+af+lod+punc"][alex_pos] == 3
    assert verdict["em+af+lod"][mcw] is None
    assert verdict["em+af+lod+punc"][mcw] == 1
    # the full matcher reproduces every human label
    assert verdict["em+af+lod+punc"] == [a.gold_cluster or None for a in anns]
    assert elapsed < 1.0, f"{elapsed:.3f}s"


# ---------------------------------------------------------------- 2


@settings(max_examples=1000)
@given(st.data())
def test_criterion_2(data):
    f = data.draw(S.formulations(max_optional=12))
    g = SentenceGold("s", "text", (Cluster(1, (f,)),))
    from_gold = data.draw(st.booleans())
    if from_gold:
        t = data.draw(st.sampled_from(sorted(S.oracle_expansions(f))))
    else:
        t = (data.draw(S.tokens), data.draw(S.tokens), data.draw(st.lists(st.sampled_from(S.VOCAB), max_size=5).map(tuple)))
    e = Extraction("s", *t)
    assert (exact_match(e, g) == 1) == S.oracle_exact(f, e.triple)


# ---------------------------------------------------------------- 3


@settings(max_examples=200)
@given(S.scored_corpora())
def test_criterion_3(case):
    gc, xs = case
    previous = None
    for name in CHAIN:
        ds = match_corpus(xs, gc, MatcherConfig.from_name(name))
        matched = {i for i, d in enumerate(ds) if d.matched}
        if previous is not None:
            assert previous <= matched, name
        previous = matched


# ---------------------------------------------------------------- 4


def test_criterion_4():
    gc = parse_gold(FIX / "scoring.gold")
    xs = parse_extractions(FIX / "scoring.tsv")
    rep = score_corpus(match_corpus(xs, gc), gc, xs)
    assert (rep.matched_extractions, rep.total_extractions) == (4, 6)
    assert (rep.matched_clusters, rep.total_clusters) == (2, 4)
    assert Fraction(rep.precision).limit_denominator(100) == Fraction(2, 3)
    assert Fraction(rep.recall).limit_denominator(100) == Fraction(1, 2)
    assert Fraction(rep.f1).limit_denominator(100) == Fraction(4, 7)
    assert rep.precision == 2 / 3 and rep.recall == 1 / 2 and rep.f1 == 4 / 7

    empty = score_corpus([], gc, [])
    assert (empty.precision, empty.recall, empty.f1) == (0.0, 0.0, 0.0)
    assert not empty.precision_defined and empty.recall_defined

    perfect = [Extraction(s.sent_id, *min(c.triples)) for s in gc for c in s.clusters]
    rep = score_corpus(match_corpus(perfect, gc), gc, perfect)
    assert (rep.precision, rep.recall, rep.f1) == (1.0, 1.0, 1.0)


# ---------------------------------------------------------------- 5

vectors = st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=20).filter(
    lambda v: max(v) - min(v) > 1e-2
)


@settings(max_examples=100)
@given(st.data())
def test_criterion_5(data):
    x = data.draw(vectors)
    y = data.draw(st.lists(st.floats(-1e3, 1e3), min_size=len(x), max_size=len(x)).filter(lambda v: max(v) - min(v) > 1e-2))
    a, b = data.draw(st.floats(0.1, 100)), data.draw(st.floats(-100, 100))
    assert abs(pearson(x, x) - 1) <= 1e-12
    assert abs(pearson(x, [-v for v in x]) + 1) <= 1e-12
    assert abs(pearson([a * v + b for v in x], y) - pearson(x, y)) <= 1e-9
    assert abs(pearson([1, 2, 3, 5], [2, 1, 4, 6]) - 41 / math.sqrt(2065)) <= 1e-12


# ---------------------------------------------------------------- 6


def test_criterion_6():
    gc = parse_gold(FIX / "quality.gold")
    findings = lint_corpus(gc, (STRICT, LOOSE))
    da = [f for f in findings if f.kind is Kind.DOUBLE_ANNOTATION]
    dm = [f for f in findings if f.kind is Kind.DOUBLE_MEANING]
    assert len(da) == 1 and da[0].mode == LOOSE and da[0].sent_id == "justice"
    assert lint_corpus(gc, (STRICT,)) == dm
    assert len(dm) == 1 and len(dm[0].witnesses) == 5 and dm[0].sent_id == "fraud"
    assert len(findings) == 2

    a, b = parse_gold(FIX / "diff_a.gold"), parse_gold(FIX / "diff_b.gold")
    cross = diff_annotation_sets(a, b)
    assert len(cross) == 1
    assert cross[0].direction == "a-not-in-b" and cross[0].witnesses[0].startswith("feet -->")

    for path in FIX.glob("*.gold"):
        g = parse_gold(path)
        assert diff_annotation_sets(g, g) == []


@settings(max_examples=100)
@given(S.corpora())
def test_criterion_6_self_diff_fuzzed(gc):
    assert diff_annotation_sets(gc, gc) == []


# ---------------------------------------------------------------- 7

PARSERS = [
    (parse_gold, serialize_gold),
    (parse_extractions, serialize_extractions),
    (parse_match_annotations, serialize_match_annotations),
    (parse_score_table, serialize_score_table),
]


def test_criterion_7():
    kinds = {".gold": 0, ".tsv": 1, ".matches": 2}
    for path in sorted(FIX.iterdir()):
        k = kinds.get(path.suffix)
        if path.name in ("correlations.tsv", "downstream.tsv"):
            k = 3
        parse, ser = PARSERS[k]
        once = ser(parse(path))
        assert ser(parse(once)) == once, path.name
        if k == 1:  # literal text has no file stem to name the system after
            assert parse(once).extractions == parse(path).extractions, path.name
        else:
            assert parse(once) == parse(path), path.name


@settings(max_examples=500)
@given(S.corpora())
def test_criterion_7_gold_fuzzed(gc):
    text = serialize_gold(gc)
    back = parse_gold(text)
    assert back == gc
    assert serialize_gold(back) == text


@settings(max_examples=500)
@given(S.extraction_sets())
def test_criterion_7_extractions_fuzzed(xs):
    text = serialize_extractions(xs)
    back = parse_extractions(text, system_name="fuzz")
    assert back.extractions == xs.extractions
    assert serialize_extractions(back) == text


PIECES = list("ab 12\t\n\r[]-->#:.,`'\x00é") + ["sent_id:", " --> ", "1 --> ", "nan", "-"]
raw_inputs = st.binary(max_size=300) | st.lists(st.sampled_from(PIECES), max_size=80).map(
    lambda parts: "".join(parts).encode("utf-8")
)


@settings(max_examples=500)
@given(raw_inputs)
def test_criterion_7_bytes_never_crash(blob):
    for parse, _ in PARSERS:
        try:
            parse(blob)
        except FormatError as err:
            assert err.line >= 0


# ---------------------------------------------------------------- 8


def test_criterion_8(tmp_path):
    start = time.perf_counter()
    gc, systems = S.synthetic_corpus(300, 7, seed=7)
    gold = tmp_path / "gold.txt"
    gold.write_text(serialize_gold(gc), encoding="utf-8")
    paths = []
    for xs in systems:
        p = tmp_path / f"{xs.system_name}.tsv"
        p.write_text(serialize_extractions(xs), encoding="utf-8")
        paths.append(str(p))

    outputs = []
    for jobs in ("1", "8"):
        out = tmp_path / f"report{jobs}.json"
        assert cli_main(["score", str(gold), *paths, "--format", "json", "--jobs", jobs, "-o", str(out)]) == 0
        doc = json.loads(out.read_text(encoding="utf-8"))
        doc["manifest"].pop("timestamp")
        outputs.append(json.dumps(doc, sort_keys=True))
    elapsed = time.perf_counter() - start
    assert outputs[0] == outputs[1]
    assert len(json.loads(outputs[0])["reports"]) == 7
    assert elapsed < 10.0, f"{elapsed:.2f}s"


# ---------------------------------------------------------------- 9


def test_criterion_9():
    xs = parse_extractions(FIX / "lengths.tsv")
    assert sorted(len(e) for e in xs) == [7, 8]
    assert extraction_length_stats(xs) == 7.5


if __name__ == "__main__":
    import tempfile

    for n in CRITERIA:
        fn = globals()[f"test_criterion_{n}"]
        try:
            if n == 8:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
            status = "PASS"
        except Exception as err:  # report and keep going
            status = f"FAIL ({type(err).__name__}: {err})"
        print(f"[{status}] criterion {n}: {CRITERIA[n]}")
