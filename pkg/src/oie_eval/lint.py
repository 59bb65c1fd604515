"""Annotation-quality proxies for gold corpora.

Three detectors, none of which decides whether a hit is an actual error:

* double annotation: two clusters share a formulation after expansion;
* double meaning: one cluster holds formulations that agree on (arg1, rel)
  but never on arg2;
* cross-set missing: a cluster of one corpus has no expanded triple in the
  aligned sentence of another corpus.
"""

from __future__ import annotations

import enum
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .annotation_io import GoldCorpus
from .model import Formulation, SentenceGold, Tokens, expand_formulation, linearize, normalize_punc

log = logging.getLogger(__name__)


class Kind(str, enum.Enum):
    DOUBLE_ANNOTATION = "DOUBLE_ANNOTATION"
    DOUBLE_MEANING = "DOUBLE_MEANING"
    CROSS_SET_MISSING = "CROSS_SET_MISSING"


STRICT = "strict"
LOOSE = "loose"
SEVERITY = {STRICT: "error", LOOSE: "warning"}


@dataclass(frozen=True)
class Finding:
    kind: Kind
    sent_id: str
    clusters: tuple[int, ...]
    witnesses: tuple[str, ...]
    mode: str = STRICT
    direction: Optional[str] = None
    detail: str = ""

    @property
    def severity(self) -> str:
        return SEVERITY[self.mode]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "sent_id": self.sent_id,
            "clusters": list(self.clusters),
            "witnesses": list(self.witnesses),
            "mode": self.mode,
            "severity": self.severity,
            "direction": self.direction,
            "detail": self.detail,
        }


def _keys(f: Formulation, mode: str) -> frozenset:
    triples = expand_formulation(f)
    if mode == STRICT:
        return triples
    return frozenset(normalize_punc(linearize(t)) for t in triples)


def find_double_annotations(g: SentenceGold, mode: str = STRICT) -> list[Finding]:
    """One finding per cluster pair whose expansions intersect.

    ``strict`` compares slot-aligned triples; ``loose`` compares punctuation-
    normalized linearizations, which ignores where the slot boundaries fall.
    """
    if mode not in SEVERITY:
        raise ValueError(f"unknown mode {mode!r}")
    keyed = [[(f, _keys(f, mode)) for f in c.formulations] for c in g.clusters]
    out = []
    for (i, ci), (j, cj) in combinations(enumerate(keyed, start=1), 2):
        hit = _first_overlap(ci, cj)
        if hit is not None:
            fa, fb, shared = hit
            out.append(Finding(Kind.DOUBLE_ANNOTATION, g.sent_id, (i, j), (str(fa), str(fb)), mode, detail=shared))
    return out


def _first_overlap(ci, cj):
    for fa, ka in ci:
        for fb, kb in cj:
            common = ka & kb
            if common:
                return fa, fb, _show(min(common))
    return None


def _show(key) -> str:
    if key and isinstance(key[0], tuple):
        return " | ".join(" ".join(s) for s in key)
    return " ".join(key)


def find_double_meanings(g: SentenceGold) -> list[Finding]:
    """One finding per cluster with formulations sharing (arg1, rel) but no arg2.

    Witnesses are every formulation that takes part in at least one such
    pair, in file order.
    """
    out = []
    for c in g.clusters:
        heads: list[set[tuple[Tokens, Tokens]]] = []
        tails: list[set[Tokens]] = []
        for f in c.formulations:
            ts = expand_formulation(f)
            heads.append({(t.arg1, t.rel) for t in ts})
            tails.append({t.arg2 for t in ts})
        involved = set()
        for a, b in combinations(range(len(c.formulations)), 2):
            if heads[a] & heads[b] and not tails[a] & tails[b]:
                involved.update((a, b))
        if involved:
            witnesses = tuple(str(c.formulations[k]) for k in sorted(involved))
            out.append(Finding(Kind.DOUBLE_MEANING, g.sent_id, (c.index,), witnesses))
    return out


def _missing(src: SentenceGold, dst: SentenceGold, direction: str) -> list[Finding]:
    present = set()
    for c in dst.clusters:
        present |= c.triples
    return [
        Finding(
            Kind.CROSS_SET_MISSING, src.sent_id, (c.index,), tuple(str(f) for f in c.formulations),
            direction=direction,
        )
        for c in src.clusters
        if not c.triples & present
    ]


def diff_annotation_sets(a: GoldCorpus, b: GoldCorpus) -> list[Finding]:
    """Clusters of either corpus with no expanded triple in the other's aligned sentence.

    Sentences are aligned by ``sent_id``; unaligned ones are logged and
    skipped (see :func:`unaligned_sentences`).  Directions are ``"a-not-in-b"``
    and ``"b-not-in-a"``.
    """
    amap, bmap = a.by_id(), b.by_id()
    shared = [s.sent_id for s in a if s.sent_id in bmap]
    if not shared and (len(a) or len(b)):
        raise ValueError("the two corpora have no sent_id in common")
    only_a, only_b = unaligned_sentences(a, b)
    for sid in only_a:
        log.warning("sentence %r only in the first corpus", sid)
    for sid in only_b:
        log.warning("sentence %r only in the second corpus", sid)
    out = []
    for sid in shared:
        out += _missing(amap[sid], bmap[sid], "a-not-in-b")
        out += _missing(bmap[sid], amap[sid], "b-not-in-a")
    return out


def unaligned_sentences(a: GoldCorpus, b: GoldCorpus) -> tuple[list[str], list[str]]:
    aid, bid = {s.sent_id for s in a}, {s.sent_id for s in b}
    return [s.sent_id for s in a if s.sent_id not in bid], [s.sent_id for s in b if s.sent_id not in aid]


def lint_sentence(g: SentenceGold, modes: Sequence[str] = (STRICT, LOOSE)) -> list[Finding]:
    """Run the single-corpus proxies.

    A loose double annotation already reported in strict mode is not repeated.
    """
    out: list[Finding] = []
    strict_pairs = set()
    for mode in modes:
        for f in find_double_annotations(g, mode):
            if mode == LOOSE and f.clusters in strict_pairs:
                continue
            strict_pairs.add(f.clusters)
            out.append(f)
    return out + find_double_meanings(g)


def lint_corpus(gc: GoldCorpus, modes: Sequence[str] = (STRICT, LOOSE)) -> list[Finding]:
    findings = []
    for s in sorted(gc, key=lambda s: s.sent_id):
        findings += lint_sentence(s, modes)
    return findings


def sentence_counts(findings: Iterable[Finding]) -> dict[str, int]:
    """Number of distinct sentences with at least one finding, per proxy kind."""
    seen: dict[str, set] = defaultdict(set)
    for f in findings:
        key = f.kind.value if f.direction is None else f"{f.kind.value}:{f.direction}"
        seen[key].add(f.sent_id)
    return {k: len(v) for k, v in sorted(seen.items())}


def verify_finding(f: Finding, g: SentenceGold, other: Optional[SentenceGold] = None) -> bool:
    """Re-derive ``f`` from its witnesses; True when the condition still holds."""
    try:
        forms = [Formulation.parse(w) for w in f.witnesses]
    except ValueError:
        return False
    clusters = [g.cluster(i) for i in f.clusters if 1 <= i <= len(g.clusters)]
    if len(clusters) != len(f.clusters):
        return False
    if f.kind is Kind.DOUBLE_ANNOTATION:
        fa, fb = forms
        ca, cb = clusters
        return fa in ca.formulations and fb in cb.formulations and bool(_keys(fa, f.mode) & _keys(fb, f.mode))
    if f.kind is Kind.DOUBLE_MEANING:
        (c,) = clusters
        if not all(w in c.formulations for w in forms):
            return False
        exps = [expand_formulation(w) for w in forms]
        return any(
            {(t.arg1, t.rel) for t in x} & {(t.arg1, t.rel) for t in y} and not {t.arg2 for t in x} & {t.arg2 for t in y}
            for x, y in combinations(exps, 2)
        )
    if f.kind is Kind.CROSS_SET_MISSING:
        if other is None:
            raise ValueError("cross-set findings need the other sentence")
        (c,) = clusters
        present = set()
        for oc in other.clusters:
            present |= oc.triples
        return tuple(forms) == c.formulations and not c.triples & present
    return False
