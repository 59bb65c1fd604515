import math
from fractions import Fraction

import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

import strategies as S
from oie_eval import (
    Extraction,
    GoldCorpus,
    MatchDecision,
    abqa_score,
    evaluate_matcher,
    extraction_length_stats,
    flatten_gold,
    match_corpus,
    parse_gold,
    parse_match_annotations,
    pearson,
    score_corpus,
    token_level_score,
)
from oie_eval.annotation_io import ExtractionSet, MatchAnnotation
from oie_eval.matcher import EM_ONLY, FULL, Method
from oie_eval.model import ConcreteTriple
from oie_eval.scorer import filter_by_confidence, token_pair_score

TWO = parse_gold("sent_id:s\tt\n1 --> A --> r --> X\n2 --> A --> r --> Y\n")


def decide(e, cluster):
    return MatchDecision(e, cluster, Method.EM if cluster else Method.NONE)


def test_two_cluster_hand_count():
    xs = [Extraction("s", ["A"], ["r"], ["X"]), Extraction("s", ["A"], ["r"], ["X"]), Extraction("s", ["Q"], ["r"])]
    rep = score_corpus([decide(xs[0], 1), decide(xs[1], 1), decide(xs[2], None)], TWO, xs)
    assert (rep.precision, rep.recall) == (2 / 3, 1 / 2)
    assert rep.f1 == float(Fraction(4, 7))
    assert rep.per_sentence[0].matched_clusters == 1


def test_empty_and_perfect():
    rep = score_corpus([], TWO, [])
    assert (rep.precision, rep.recall, rep.precision_defined) == (0.0, 0.0, False)
    xs = [Extraction("s", ["A"], ["r"], ["X"]), Extraction("s", ["A"], ["r"], ["Y"])]
    rep = score_corpus(match_corpus(xs, TWO), TWO, xs)
    assert (rep.precision, rep.recall, rep.f1) == (1.0, 1.0, 1.0)


def test_empty_gold_flags_recall():
    rep = score_corpus([], GoldCorpus(()), [])
    assert not rep.recall_defined and rep.recall == 0.0


def test_orphans_count_against_precision():
    xs = [Extraction("s", ["A"], ["r"], ["X"]), Extraction("ghost", ["A"], ["r"], ["X"])]
    rep = score_corpus(match_corpus(xs, TWO), TWO, xs)
    assert rep.precision == 0.5
    assert [r.orphan for r in rep.per_sentence] == [False, True]


def test_misaligned_decisions_are_rejected():
    xs = [Extraction("s", ["A"], ["r"], ["X"])]
    with pytest.raises(ValueError):
        score_corpus([], TWO, xs)
    with pytest.raises(ValueError):
        score_corpus([decide(Extraction("s", ["B"], ["r"]), None)], TWO, xs)


@settings(max_examples=100)
@given(S.scored_corpora())
def test_scores_bounded_and_counts_consistent(case):
    gc, xs = case
    rep = score_corpus(match_corpus(xs, gc), gc, xs)
    assert 0 <= rep.precision <= 1 and 0 <= rep.recall <= 1 and 0 <= rep.f1 <= 1
    assert rep.matched_clusters <= rep.matched_extractions <= rep.total_extractions
    assert sum(r.matched_clusters for r in rep.per_sentence) == rep.matched_clusters


def test_evaluate_matcher_confusion(fixtures):
    gold = parse_gold(fixtures / "worked.gold")
    anns = parse_match_annotations(fixtures / "worked.matches", gold=gold)
    xs = [a.extraction for a in anns]
    full = evaluate_matcher(match_corpus(xs, gold, FULL), anns)
    assert (full.precision, full.recall, full.f1) == (1.0, 1.0, 1.0)
    assert (full.correct_match, full.correct_none, full.total) == (5, 2, 7)
    em = evaluate_matcher(match_corpus(xs, gold, EM_ONLY), anns)
    assert em.recall < 1 and em.missed_match == 5


def test_evaluate_matcher_wrong_cluster_hurts_both():
    e = Extraction("s", ["A"], ["r"], ["X"])
    rep = evaluate_matcher([decide(e, 2)], [MatchAnnotation(e, 1)])
    assert rep.wrong_cluster == 1 and rep.precision == 0 and rep.recall == 0
    rep = evaluate_matcher([decide(e, 2)], [MatchAnnotation(e, 0)])
    assert rep.spurious_match == 1


def test_token_pair_scores():
    g = ConcreteTriple(("He",), ("became",), ("a", "founding", "justice", "today"))
    assert token_pair_score(g, g)[1:3] == (1.0, 1.0)
    longer = ConcreteTriple(("He",), ("became",), ("a", "founding", "justice", "today", "x", "y"))
    shared, p, r, _ = token_pair_score(longer, g)
    assert (shared, p, r) == (6, 6 / 8, 1.0)
    assert token_pair_score(ConcreteTriple(("Q",), ("z",), ()), g) == (0, 0.0, 0.0, 0.0)


def test_token_level_score_assignment():
    gc = parse_gold("sent_id:s\tt\n1 --> He --> became --> [a] founding justice\n2 --> He --> served as --> Prime Minister\n")
    flat = flatten_gold(gc)
    assert flat["s"][0] == ConcreteTriple(("He",), ("became",), ("founding", "justice"))
    xs = [Extraction("s", ["He"], ["became"], ["founding", "justice"]), Extraction("s", ["Q"], ["z"])]
    rep = token_level_score(xs, flat)
    assert rep.matched_extractions == 1
    assert rep.precision == 4 / 6 and rep.recall == 4 / 9


def test_abqa_score():
    passages = []
    for i in range(100):
        answers = parse_gold(f"sent_id:p{i}\tt\n1 --> Q{i} --> is --> answer\n").sentences[0]
        hit = i < 23
        xs = [Extraction(f"p{i}", [f"Q{i}"], ["is"], ["answer" if hit else "other"])]
        passages.append((answers, xs))
    assert abqa_score(passages) == pytest.approx(0.230)
    assert abqa_score([(a, []) for a, _ in passages]) == 0.0
    assert abqa_score(passages[:23]) == 1.0
    with pytest.raises(ValueError):
        abqa_score([])


def test_pearson_known_value_and_scipy():
    assert pearson([1, 2, 3, 5], [2, 1, 4, 6]) == pytest.approx(41 / math.sqrt(2065), abs=1e-12)
    x, y = [0.2, 0.4, 0.1, 0.9, 0.5], [1.0, 0.3, 0.2, 0.8, 0.7]
    assert pearson(x, y) == pytest.approx(scipy.stats.pearsonr(x, y)[0], abs=1e-12)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=30))
def test_pearson_agrees_with_scipy(pts):
    x, y = [p[0] for p in pts], [p[1] for p in pts]
    if max(x) - min(x) < 1e-3 or max(y) - min(y) < 1e-3:
        return
    r = pearson(x, y)
    assert -1 <= r <= 1
    assert r == pytest.approx(scipy.stats.pearsonr(x, y)[0], abs=1e-9)
    assert pearson(y, x) == pytest.approx(r, abs=1e-12)


@pytest.mark.parametrize("x, y", [([1, 1, 1], [1, 2, 3]), ([1], [1]), ([1, 2], [1, 2, 3])])
def test_pearson_rejects_degenerate_input(x, y):
    with pytest.raises(ValueError):
        pearson(x, y)


def test_extraction_length():
    assert extraction_length_stats([Extraction("s", "a b".split(), "c d e".split(), "f g".split())]) == 7.0
    with pytest.raises(ValueError):
        extraction_length_stats([])


def test_confidence_filter():
    xs = ExtractionSet("sys", (
        Extraction("s", ["a"], ["b"], confidence=0.2),
        Extraction("s", ["a"], ["b"], confidence=0.8),
        Extraction("s", ["a"], ["b"]),
    ))
    assert filter_by_confidence(xs, None) is xs
    assert [e.confidence for e in filter_by_confidence(xs, 0.5)] == [0.8, None]
