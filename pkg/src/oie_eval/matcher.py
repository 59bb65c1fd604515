"""Staged matching of system extractions against fact synsets.

The pipeline is exact match (EM), then alternative formulations (AF), then
level of detail (LoD).  With punctuation tolerance on, each stage is retried on
lowercased, punctuation-free tokens before moving to the next stage.  The
first stage that succeeds decides the credited cluster.
"""

from __future__ import annotations

import enum
import logging
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

from .annotation_io import ExtractionSet, GoldCorpus
from .model import (
    ConcreteTriple,
    Extraction,
    SentenceGold,
    Tokens,
    linearize,
    normalize_punc,
    normalize_triple,
)

log = logging.getLogger(__name__)

IS_FORMS = frozenset({"is", "was", "are", "were"})
_REL_FILLER = frozenset({"a", "an", "the", "also"})
CONNECTORS = frozenset({"and", ","})


class Method(str, enum.Enum):
    EM = "EM"
    AF = "AF"
    LOD = "LOD"
    NONE = "NONE"


class PairSource(str, enum.Enum):
    IS = "IS"
    AND = "AND"


@dataclass(frozen=True)
class MatcherConfig:
    af_enabled: bool = True
    lod_enabled: bool = True
    punc_enabled: bool = True

    VARIANTS = ("em", "em+af", "em+lod", "em+af+lod", "em+af+lod+punc")

    @classmethod
    def from_name(cls, name: str) -> "MatcherConfig":
        """Build a config from names like ``"em+af+lod"``; ``em`` is always implied."""
        parts = [p for p in name.lower().replace(" ", "").split("+") if p]
        if not parts or parts[0] != "em" or not set(parts) <= {"em", "af", "lod", "punc"} or len(set(parts)) != len(parts):
            raise ValueError(f"unknown matcher {name!r}; expected one of {', '.join(cls.VARIANTS)}")
        return cls("af" in parts, "lod" in parts, "punc" in parts)

    @property
    def name(self) -> str:
        return "+".join(
            ["em"] + [n for n, on in (("af", self.af_enabled), ("lod", self.lod_enabled), ("punc", self.punc_enabled)) if on]
        )


EM_ONLY = MatcherConfig(False, False, False)
FULL = MatcherConfig(True, True, True)


@dataclass(frozen=True)
class RewritingPair:
    a: Tokens
    b: Tokens
    source: PairSource
    source_cluster: int

    def __post_init__(self):
        if not self.a or not self.b or self.a == self.b:
            raise ValueError("rewriting pair members must be non-empty and distinct")


@dataclass(frozen=True)
class MatchDecision:
    extraction: Extraction
    matched_cluster: Optional[int] = None
    method: Method = Method.NONE
    punc_used: bool = False

    def __post_init__(self):
        if (self.method is Method.NONE) != (self.matched_cluster is None):
            raise ValueError("method is NONE exactly when no cluster is matched")

    @property
    def matched(self) -> bool:
        return self.matched_cluster is not None


def reduces_to_is(rel: Sequence[str]) -> bool:
    """True when the relation is a bare copula once articles and ``also`` are dropped."""
    core = [t for t in (t.lower() for t in rel) if t not in _REL_FILLER]
    return len(core) == 1 and core[0] in IS_FORMS


# ---------------------------------------------------------------- rewriting pairs


def _collect_pairs(cluster_triples: Sequence[tuple[int, Iterable[ConcreteTriple]]]) -> list[RewritingPair]:
    found: dict[tuple[Tokens, Tokens, PairSource], int] = {}

    def add(a, b, src, cluster):
        if not a or not b or a == b:
            return
        key = (a, b, src)
        if key not in found or cluster < found[key]:
            found[key] = cluster

    groups: dict[tuple[Tokens, Tokens], dict[int, set[Tokens]]] = defaultdict(lambda: defaultdict(set))
    for idx, triples in cluster_triples:
        for t in triples:
            if reduces_to_is(t.rel):
                add(t.arg1, t.arg2, PairSource.IS, idx)
            groups[(t.arg1, t.rel)][idx].add(t.arg2)

    for (_, rel), per_cluster in groups.items():
        if len(per_cluster) < 2:
            continue
        is_rel = reduces_to_is(rel)
        for ci, cj in combinations(sorted(per_cluster), 2):
            for a in per_cluster[ci]:
                for b in per_cluster[cj]:
                    add(a, b, PairSource.AND, ci)
                    if is_rel:
                        add(a, b, PairSource.IS, ci)

    order = {PairSource.IS: 0, PairSource.AND: 1}
    keys = sorted(found, key=lambda k: (found[k], k[0], k[1], order[k[2]]))
    return [RewritingPair(a, b, src, found[(a, b, src)]) for a, b, src in keys]


def collect_rewriting_pairs(g: SentenceGold) -> list[RewritingPair]:
    """Harvest (A, B) pairs licensing the deletion of A or B from an extraction argument.

    IS pairs come from copular formulations (A, is, B) and from two clusters
    sharing a copular (E, is) head; AND pairs come from any two clusters that
    share (E, rel) but differ in the second argument.  Sorted by contributing
    cluster, then lexicographically.
    """
    return _collect_pairs([(c.index, c.triples) for c in g.clusters])


def _find(seq: Tokens, sub: Tokens, start: int = 0) -> Iterable[int]:
    n = len(sub)
    for i in range(start, len(seq) - n + 1):
        if seq[i:i + n] == sub:
            yield i


def _spans(arg: Tokens, a: Tokens, b: Tokens) -> Optional[tuple[tuple[int, int], tuple[int, int]]]:
    for i in _find(arg, a):
        sa = (i, i + len(a))
        for j in _find(arg, b):
            sb = (j, j + len(b))
            if sb[1] <= sa[0] or sb[0] >= sa[1]:
                return sa, sb
    return None


def _remove(arg: Tokens, drop: tuple[int, int], keep: tuple[int, int]) -> Tokens:
    lo, hi = drop
    if drop[0] > keep[0]:
        while lo > keep[1] and arg[lo - 1] in CONNECTORS:
            lo -= 1
    else:
        while hi < keep[0] and arg[hi] in CONNECTORS:
            hi += 1
    return arg[:lo] + arg[hi:]


def alternative_triples(t: ConcreteTriple, pairs: Sequence[RewritingPair]) -> list[ConcreteTriple]:
    """Deletion variants of ``t`` licensed by ``pairs``; see :func:`generate_alternatives`."""
    if not t.arg2:
        return []
    is_rel = reduces_to_is(t.rel)
    out: list[ConcreteTriple] = []
    seen = {t}
    for p in pairs:
        if p.source is PairSource.IS and not is_rel:
            continue
        for slot in ("arg1", "arg2"):
            arg = getattr(t, slot)
            if p.source is PairSource.AND and "and" not in arg:
                continue
            spans = _spans(arg, p.a, p.b)
            if spans is None:
                continue
            sa, sb = spans
            for drop, keep in ((sb, sa), (sa, sb)):
                alt = t._replace(**{slot: _remove(arg, drop, keep)})
                if alt not in seen:
                    seen.add(alt)
                    out.append(alt)
    return out


def generate_alternatives(e: Extraction, pairs: Sequence[RewritingPair]) -> list[Extraction]:
    """Deletion variants of ``e`` licensed by ``pairs``, in a fixed order.

    IS pairs apply only to copular extractions, AND pairs only to arguments
    containing ``and``.  For each applicable pair and each argument holding
    both members, the variant without ``b`` comes before the variant without
    ``a``.  A run of ``and``/``,`` between the two members is dropped together
    with the removed member.  Each variant applies a single pair; rewriting
    one argument with two pairs at once is not attempted.  The original
    extraction is never returned.
    """
    return [
        Extraction(e.sent_id, t.arg1, t.rel, t.arg2, e.confidence)
        for t in alternative_triples(e.triple, pairs)
    ]


# ---------------------------------------------------------------- per-sentence index


class _View:
    """Lookup tables over one sentence's expanded triples (raw or normalized)."""

    def __init__(self, cluster_triples: Sequence[tuple[int, Iterable[ConcreteTriple]]], pairs: list[RewritingPair]):
        self.exact: dict[ConcreteTriple, int] = {}
        self.by_linear: dict[Tokens, set[int]] = defaultdict(set)
        self.rel_arg1: dict[tuple[Tokens, Tokens], set[int]] = defaultdict(set)
        self.rel_arg2: dict[tuple[Tokens, Tokens], set[int]] = defaultdict(set)
        for idx, triples in cluster_triples:
            for t in triples:
                self.exact.setdefault(t, idx)
                self.by_linear[linearize(t)].add(idx)
                self.rel_arg1[(t.rel, t.arg1)].add(idx)
                self.rel_arg2[(t.rel, t.arg2)].add(idx)
        self.pairs = pairs

    def exact_match(self, t: ConcreteTriple) -> Optional[int]:
        return self.exact.get(t)

    def lod_match(self, t: ConcreteTriple) -> Optional[int]:
        candidates = self.by_linear.get(linearize(t))
        if not candidates:
            return None
        support = self.rel_arg1.get((t.rel, t.arg1), set()) | self.rel_arg2.get((t.rel, t.arg2), set())
        for c in sorted(candidates):
            if support - {c}:
                return c
        return None


class SentenceIndex:
    """Precomputed matching tables for one gold sentence.

    Every public matching function accepts either a :class:`SentenceGold` or
    one of these; build it once when matching many extractions.
    """

    def __init__(self, gold: SentenceGold):
        self.gold = gold
        self.sent_id = gold.sent_id

    @cached_property
    def raw(self) -> _View:
        ct = [(c.index, c.triples) for c in self.gold.clusters]
        return _View(ct, collect_rewriting_pairs(self.gold))

    @cached_property
    def punc(self) -> _View:
        ct = [(c.index, {normalize_triple(t) for t in c.triples}) for c in self.gold.clusters]
        pairs, seen = [], set()
        for p in self.raw.pairs:
            a, b = normalize_punc(p.a), normalize_punc(p.b)
            if a and b and a != b and (a, b, p.source) not in seen:
                seen.add((a, b, p.source))
                pairs.append(RewritingPair(a, b, p.source, p.source_cluster))
        return _View(ct, pairs)

    def view(self, punc: bool) -> _View:
        return self.punc if punc else self.raw


GoldLike = Union[SentenceGold, SentenceIndex]


def _index(g: GoldLike) -> SentenceIndex:
    return g if isinstance(g, SentenceIndex) else SentenceIndex(g)


def _normalized(e: Extraction) -> Extraction:
    # bypasses validation: normalized slots may legitimately be empty
    n = object.__new__(Extraction)
    for name, value in zip(("arg1", "rel", "arg2"), normalize_triple(e.triple)):
        object.__setattr__(n, name, value)
    object.__setattr__(n, "sent_id", e.sent_id)
    object.__setattr__(n, "confidence", e.confidence)
    return n


def _prepare(e: Extraction, punc: bool) -> Extraction:
    return _normalized(e) if punc else e


def exact_match(e: Extraction, g: GoldLike, punc: bool = False) -> Optional[int]:
    """Lowest cluster whose expansion contains ``e`` slot for slot, else None."""
    return _index(g).view(punc).exact_match(_prepare(e, punc).triple)


def af_match(
    e: Extraction, g: GoldLike, pairs: Optional[Sequence[RewritingPair]] = None, punc: bool = False
) -> Optional[int]:
    """Cluster of the first alternative formulation of ``e`` that matches exactly."""
    view = _index(g).view(punc)
    if pairs is None:
        pairs = view.pairs
    for alt in alternative_triples(_prepare(e, punc).triple, pairs):
        hit = view.exact_match(alt)
        if hit is not None:
            return hit
    return None


def lod_match(e: Extraction, g: GoldLike, punc: bool = False) -> Optional[int]:
    """Level-of-detail match.

    ``e`` is credited to cluster C when its linearization equals that of an
    expanded formulation of C and some other cluster contains a triple with
    the same relation and the same arg1 or the same arg2 as ``e``.
    """
    if not e.arg2:
        return None
    return _index(g).view(punc).lod_match(_prepare(e, punc).triple)


def match_extraction(e: Extraction, g: GoldLike, cfg: MatcherConfig = FULL) -> MatchDecision:
    idx = _index(g)
    if e.sent_id != idx.sent_id:
        raise ValueError(f"extraction sent_id {e.sent_id!r} does not match gold sentence {idx.sent_id!r}")
    stages = [(Method.EM, lambda p: exact_match(e, idx, p))]
    if cfg.af_enabled:
        stages.append((Method.AF, lambda p: af_match(e, idx, None, p)))
    if cfg.lod_enabled:
        stages.append((Method.LOD, lambda p: lod_match(e, idx, p)))
    for method, run in stages:
        for punc in (False, True) if cfg.punc_enabled else (False,):
            hit = run(punc)
            if hit is not None:
                return MatchDecision(e, hit, method, punc)
    return MatchDecision(e)


def _match_chunk(args) -> list[tuple[int, MatchDecision]]:
    gold, items, cfg = args
    idx = SentenceIndex(gold)
    return [(pos, match_extraction(e, idx, cfg)) for pos, e in items]


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("OIE_EVAL_JOBS", "1")))
    except ValueError:
        return 1


def match_corpus(
    xs: ExtractionSet | Iterable[Extraction],
    gc: GoldCorpus,
    cfg: MatcherConfig = FULL,
    jobs: int = 1,
) -> list[MatchDecision]:
    """One decision per extraction, in input order.

    Extractions whose sentence is not in ``gc`` get a NONE decision and a
    logged warning.  ``jobs > 1`` spreads sentences over worker processes;
    the output does not depend on it.
    """
    extractions = list(xs)
    golds = gc.by_id()
    decisions: list[Optional[MatchDecision]] = [None] * len(extractions)
    per_sentence: dict[str, list[tuple[int, Extraction]]] = defaultdict(list)
    for pos, e in enumerate(extractions):
        if e.sent_id in golds:
            per_sentence[e.sent_id].append((pos, e))
        else:
            log.warning("extraction %d: sent_id %r not in gold corpus", pos + 1, e.sent_id)
            decisions[pos] = MatchDecision(e)

    tasks = [(golds[sid], items, cfg) for sid, items in per_sentence.items()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_match_chunk, tasks, chunksize=max(1, len(tasks) // (4 * jobs)))
            results = list(results)
    else:
        results = [_match_chunk(t) for t in tasks]
    for chunk in results:
        for pos, d in chunk:
            decisions[pos] = d
    return decisions  # type: ignore[return-value]
