"""Corpus scores, matcher evaluation, and small statistics helpers."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .annotation_io import ExtractionSet, GoldCorpus, MatchAnnotation
from .matcher import FULL, MatchDecision, MatcherConfig, SentenceIndex, match_extraction
from .model import ConcreteTriple, Extraction, SentenceGold


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def _f1(p: Fraction, r: Fraction) -> Fraction:
    return 2 * p * r / (p + r) if p + r else Fraction(0)


@dataclass
class SentenceScore:
    sent_id: str
    extractions: int
    matched_extractions: int
    clusters: int
    matched_clusters: int
    orphan: bool = False


@dataclass
class ScoreReport:
    precision: float
    recall: float
    f1: float
    matched_extractions: int
    total_extractions: int
    matched_clusters: int
    total_clusters: int
    precision_defined: bool = True
    recall_defined: bool = True
    per_sentence: list[SentenceScore] = field(default_factory=list)

    @classmethod
    def from_counts(cls, me: int, te: int, mc: int, tc: int, per_sentence=None) -> "ScoreReport":
        p, r = _ratio(me, te), _ratio(mc, tc)
        return cls(
            float(p), float(r), float(_f1(p, r)), me, te, mc, tc,
            precision_defined=te > 0, recall_defined=tc > 0,
            per_sentence=list(per_sentence or []),
        )

    def to_dict(self) -> dict:
        return asdict(self)


def filter_by_confidence(xs: ExtractionSet, threshold: Optional[float]) -> ExtractionSet:
    """Drop extractions whose confidence is below ``threshold``; unscored ones are kept."""
    if threshold is None:
        return xs
    kept = tuple(e for e in xs if e.confidence is None or e.confidence >= threshold)
    return ExtractionSet(xs.system_name, kept)


def score_corpus(
    decisions: Sequence[MatchDecision], gc: GoldCorpus, xs: ExtractionSet | Sequence[Extraction]
) -> ScoreReport:
    """Micro precision over extractions and recall over clusters.

    A cluster counts once however many extractions are credited to it.
    """
    xs = list(xs)
    if len(decisions) != len(xs):
        raise ValueError(f"{len(decisions)} decisions for {len(xs)} extractions")
    for i, (d, e) in enumerate(zip(decisions, xs)):
        if d.extraction != e:
            raise ValueError(f"decision {i + 1} does not belong to extraction {i + 1}")

    n_ext: Counter = Counter()
    n_hit: Counter = Counter()
    credited: dict[str, set[int]] = defaultdict(set)
    for d in decisions:
        sid = d.extraction.sent_id
        n_ext[sid] += 1
        if d.matched:
            n_hit[sid] += 1
            credited[sid].add(d.matched_cluster)

    rows = [
        SentenceScore(s.sent_id, n_ext[s.sent_id], n_hit[s.sent_id], len(s.clusters), len(credited[s.sent_id]))
        for s in gc
    ]
    known = {s.sent_id for s in gc}
    for sid in n_ext:
        if sid not in known:
            rows.append(SentenceScore(sid, n_ext[sid], 0, 0, 0, orphan=True))

    return ScoreReport.from_counts(
        sum(n_hit.values()), len(xs), sum(len(v) for v in credited.values()), gc.n_clusters, rows
    )


# ---------------------------------------------------------------- matcher evaluation


@dataclass
class MatchEvalReport:
    precision: float
    recall: float
    f1: float
    correct_match: int
    wrong_cluster: int
    spurious_match: int
    missed_match: int
    correct_none: int

    @property
    def total(self) -> int:
        return self.correct_match + self.wrong_cluster + self.spurious_match + self.missed_match + self.correct_none

    def to_dict(self) -> dict:
        return {**asdict(self), "total": self.total}


def evaluate_matcher(decisions: Sequence[MatchDecision], gold_matches: Sequence[MatchAnnotation]) -> MatchEvalReport:
    """Compare matcher decisions with human cluster labels (0 = no match).

    A credit to the wrong cluster counts against precision and recall alike.
    """
    if len(decisions) != len(gold_matches):
        raise ValueError(f"{len(decisions)} decisions for {len(gold_matches)} labelled extractions")
    c = Counter()
    for i, (d, a) in enumerate(zip(decisions, gold_matches)):
        if d.extraction.triple != a.extraction.triple or d.extraction.sent_id != a.extraction.sent_id:
            raise ValueError(f"pair {i + 1}: decision and label refer to different extractions")
        pred, gold = d.matched_cluster, a.gold_cluster
        if pred is None:
            c["missed_match" if gold else "correct_none"] += 1
        elif gold == 0:
            c["spurious_match"] += 1
        elif pred == gold:
            c["correct_match"] += 1
        else:
            c["wrong_cluster"] += 1
    tp = c["correct_match"]
    p = _ratio(tp, tp + c["spurious_match"] + c["wrong_cluster"])
    r = _ratio(tp, tp + c["wrong_cluster"] + c["missed_match"])
    return MatchEvalReport(
        float(p), float(r), float(_f1(p, r)),
        tp, c["wrong_cluster"], c["spurious_match"], c["missed_match"], c["correct_none"],
    )


# ---------------------------------------------------------------- token-level baseline


def flatten_gold(gc: GoldCorpus) -> dict[str, list[ConcreteTriple]]:
    """One mandatory-only triple per cluster, taken from its first formulation."""
    return {
        s.sent_id: [
            ConcreteTriple(*(f.mandatory_tokens() for f in c.formulations[0].slots))
            for c in s.clusters
        ]
        for s in gc
    }


def _overlap(e: ConcreteTriple, g: ConcreteTriple) -> int:
    return sum(sum((Counter(a) & Counter(b)).values()) for a, b in zip(e, g))


def token_pair_score(e: ConcreteTriple, g: ConcreteTriple) -> tuple[int, float, float, float]:
    """(shared tokens, precision, recall, f1) of one extraction against one gold triple."""
    shared = _overlap(e, g)
    ne, ng = sum(map(len, e)), sum(map(len, g))
    p, r = _ratio(shared, ne), _ratio(shared, ng)
    return shared, float(p), float(r), float(_f1(p, r))


def token_level_score(
    xs: ExtractionSet | Iterable[Extraction], gold_flat: dict[str, list[ConcreteTriple]]
) -> ScoreReport:
    """Simplified WiRE57-style token-overlap scorer, kept as a comparison baseline.

    Within each sentence, extraction/gold pairs are assigned greedily one to
    one by decreasing token F1 (ties: earlier extraction, then earlier gold).
    Precision pools shared tokens over all extraction tokens, recall over all
    gold tokens.  The cluster counters report assigned gold triples.
    """
    by_sent: dict[str, list[ConcreteTriple]] = defaultdict(list)
    for e in xs:
        by_sent[e.sent_id].append(e.triple)

    shared_total = ext_tokens = gold_tokens = assigned = 0
    rows = []
    for sid in list(gold_flat) + [s for s in by_sent if s not in gold_flat]:
        ext, gold = by_sent.get(sid, []), gold_flat.get(sid, [])
        ext_tokens += sum(sum(map(len, t)) for t in ext)
        gold_tokens += sum(sum(map(len, t)) for t in gold)
        cands = []
        for i, e in enumerate(ext):
            for j, g in enumerate(gold):
                shared, _, _, f = token_pair_score(e, g)
                if shared:
                    cands.append((-f, i, j, shared))
        cands.sort()
        used_e, used_g = set(), set()
        for _, i, j, shared in cands:
            if i in used_e or j in used_g:
                continue
            used_e.add(i)
            used_g.add(j)
            shared_total += shared
        assigned += len(used_e)
        rows.append(SentenceScore(sid, len(ext), len(used_e), len(gold), len(used_g), orphan=sid not in gold_flat))

    n_ext = sum(len(v) for v in by_sent.values())
    n_gold = sum(len(v) for v in gold_flat.values())
    p, r = _ratio(shared_total, ext_tokens), _ratio(shared_total, gold_tokens)
    return ScoreReport(
        float(p), float(r), float(_f1(p, r)), assigned, n_ext, assigned, n_gold,
        precision_defined=ext_tokens > 0, recall_defined=gold_tokens > 0, per_sentence=rows,
    )


# ---------------------------------------------------------------- downstream and statistics


def abqa_score(
    per_passage: Sequence[tuple[SentenceGold, ExtractionSet | Sequence[Extraction]]],
    cfg: MatcherConfig = FULL,
) -> float:
    """Fraction of passages where at least one extraction matches an answer cluster."""
    if not per_passage:
        raise ValueError("no passages")
    points = 0
    for answers, xs in per_passage:
        idx = SentenceIndex(answers)
        if any(match_extraction(e, idx, cfg).matched for e in xs):
            points += 1
    return points / len(per_passage)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson product-moment correlation coefficient."""
    x, y = [float(v) for v in x], [float(v) for v in y]
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    mx, my = math.fsum(x) / len(x), math.fsum(y) / len(y)
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise ValueError("constant vector: correlation undefined")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / (math.sqrt(sxx) * math.sqrt(syy))
    return max(-1.0, min(1.0, r))


@dataclass
class CorrelationReport:
    pairs: list[tuple[str, Optional[float]]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"pairs": [{"label": l, "coefficient": c} for l, c in self.pairs], "notes": self.notes}


def extraction_length_stats(xs: ExtractionSet | Iterable[Extraction]) -> float:
    """Mean number of tokens per extraction (all three slots)."""
    lengths = [len(e) for e in xs]
    if not lengths:
        raise ValueError("no extractions")
    return math.fsum(lengths) / len(lengths)


__all__ = [
    "ScoreReport",
    "SentenceScore",
    "MatchEvalReport",
    "CorrelationReport",
    "score_corpus",
    "evaluate_matcher",
    "flatten_gold",
    "token_pair_score",
    "token_level_score",
    "abqa_score",
    "pearson",
    "extraction_length_stats",
    "filter_by_confidence",
]
