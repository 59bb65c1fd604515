"""Fact-synset data model.

A gold sentence holds clusters (fact synsets); each cluster holds one or more
formulations; each formulation is three slots whose tokens are grouped into
mandatory runs and optional ``[bracketed]`` groups.  Everything here is
immutable, and the expansion helpers are pure.
"""

from __future__ import annotations

import itertools
import re
import string
import unicodedata
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence

Tokens = tuple[str, ...]

SLOT_SEPARATOR = " --> "
MAX_OPTIONAL_GROUPS = 16
MAX_EXPANSION = 2**MAX_OPTIONAL_GROUPS


class AnnotationError(ValueError):
    """Raised when a model object would violate its invariants."""


def check_token(tok: str, *, gold: bool = False) -> str:
    if not isinstance(tok, str) or not tok:
        raise AnnotationError("empty token")
    if tok.split() != [tok]:
        raise AnnotationError(f"token {tok!r} contains whitespace")
    if "-->" in tok:
        raise AnnotationError(f"token {tok!r} contains the slot separator '-->'")
    # brackets are group syntax in the gold notation
    if gold and ("[" in tok or "]" in tok):
        raise AnnotationError(f"gold token {tok!r} contains a bracket")
    return tok


def as_tokens(value: str | Iterable[str], *, gold: bool = False) -> Tokens:
    """Whitespace-split a string (or validate a token iterable) into a token tuple."""
    if isinstance(value, str):
        toks = tuple(value.split())
    else:
        toks = tuple(value)
    for tok in toks:
        check_token(tok, gold=gold)
    return toks


class ConcreteTriple(NamedTuple):
    arg1: Tokens
    rel: Tokens
    arg2: Tokens

    def __str__(self) -> str:
        return " | ".join(" ".join(s) for s in self)


@dataclass(frozen=True)
class Group:
    tokens: Tokens
    optional: bool = False

    def __post_init__(self):
        toks = as_tokens(self.tokens, gold=True)
        if not toks:
            raise AnnotationError("empty group")
        object.__setattr__(self, "tokens", toks)

    def __str__(self) -> str:
        text = " ".join(self.tokens)
        return f"[{text}]" if self.optional else text


@dataclass(frozen=True)
class SlotPattern:
    """One slot of a gold formulation.

    Adjacent mandatory groups are merged on construction so that two patterns
    denoting the same bracket string compare equal.  A slot with groups needs
    at least one mandatory token; only an argument slot may be left empty.
    """

    groups: tuple[Group, ...] = ()

    def __post_init__(self):
        merged: list[Group] = []
        for g in self.groups:
            if not isinstance(g, Group):
                g = Group(*g)
            if merged and not g.optional and not merged[-1].optional:
                merged[-1] = Group(merged[-1].tokens + g.tokens)
            else:
                merged.append(g)
        if merged and all(g.optional for g in merged):
            raise AnnotationError(f"slot {self._render(merged)!r} has no mandatory token")
        object.__setattr__(self, "groups", tuple(merged))

    @staticmethod
    def _render(groups) -> str:
        return " ".join(str(g) for g in groups)

    @classmethod
    def parse(cls, text: str) -> "SlotPattern":
        """Parse bracket notation, e.g. ``"[the] [a] Prime Minister"``.

        Brackets also act as token boundaries, so ``"[the][a]"`` is two groups.
        """
        groups: list[Group] = []
        inside = False
        current: list[str] = []
        for m in re.finditer(r"\[|\]|[^\s\[\]]+", text):
            piece = m.group()
            if piece == "[":
                if inside:
                    raise AnnotationError(f"nested '[' at column {m.start() + 1}")
                if current:
                    groups.append(Group(tuple(current)))
                    current = []
                inside = True
            elif piece == "]":
                if not inside:
                    raise AnnotationError(f"unbalanced ']' at column {m.start() + 1}")
                if not current:
                    raise AnnotationError(f"empty optional group at column {m.start() + 1}")
                groups.append(Group(tuple(current), optional=True))
                current = []
                inside = False
            else:
                current.append(piece)
        if inside:
            raise AnnotationError("unbalanced '['")
        if current:
            groups.append(Group(tuple(current)))
        return cls(tuple(groups))

    @property
    def n_optional(self) -> int:
        return sum(g.optional for g in self.groups)

    @property
    def is_empty(self) -> bool:
        return not self.groups

    def mandatory_tokens(self) -> Tokens:
        return tuple(t for g in self.groups if not g.optional for t in g.tokens)

    def __str__(self) -> str:
        return self._render(self.groups)


def expand_slot(slot: SlotPattern) -> frozenset[Tokens]:
    """Every token sequence obtained by keeping or dropping each optional group."""
    choices = [((g.tokens,) if not g.optional else (g.tokens, ())) for g in slot.groups]
    return frozenset(
        tuple(itertools.chain.from_iterable(pick)) for pick in itertools.product(*choices)
    )


@dataclass(frozen=True)
class Formulation:
    arg1: SlotPattern
    rel: SlotPattern
    arg2: SlotPattern = field(default_factory=SlotPattern)

    def __post_init__(self):
        for name in ("arg1", "rel", "arg2"):
            slot = getattr(self, name)
            if isinstance(slot, str):
                object.__setattr__(self, name, SlotPattern.parse(slot))
        if self.arg1.is_empty or self.rel.is_empty:
            raise AnnotationError("arg1 and rel must not be empty")
        if self.n_optional > MAX_OPTIONAL_GROUPS:
            raise AnnotationError(
                f"{self.n_optional} optional groups exceed the cap of {MAX_OPTIONAL_GROUPS}"
            )

    @classmethod
    def parse(cls, text: str) -> "Formulation":
        """Parse ``"arg1 --> rel --> arg2"`` (arg2 may be empty)."""
        if text.endswith(" -->"):
            text += " "
        parts = text.split(SLOT_SEPARATOR)
        if len(parts) != 3:
            raise AnnotationError(
                f"expected 3 slots separated by '{SLOT_SEPARATOR.strip()}', got {len(parts)}"
            )
        return cls(*(SlotPattern.parse(p) for p in parts))

    @property
    def slots(self) -> tuple[SlotPattern, SlotPattern, SlotPattern]:
        return (self.arg1, self.rel, self.arg2)

    @property
    def n_optional(self) -> int:
        return sum(s.n_optional for s in self.slots)

    def __str__(self) -> str:
        return SLOT_SEPARATOR.join(str(s) for s in self.slots)


def expand_formulation(f: Formulation) -> frozenset[ConcreteTriple]:
    a1, rel, a2 = (expand_slot(s) for s in f.slots)
    size = len(a1) * len(rel) * len(a2)
    if size > MAX_EXPANSION:
        raise AnnotationError(f"formulation {f} expands to {size} triples (cap {MAX_EXPANSION})")
    return frozenset(ConcreteTriple(*t) for t in itertools.product(a1, rel, a2))


@dataclass(frozen=True)
class Cluster:
    index: int
    formulations: tuple[Formulation, ...]

    def __post_init__(self):
        object.__setattr__(self, "formulations", tuple(self.formulations))
        if not isinstance(self.index, int) or self.index < 1:
            raise AnnotationError(f"cluster index must be a positive integer, got {self.index!r}")
        if not self.formulations:
            raise AnnotationError(f"cluster {self.index} has no formulation")
        seen = set()
        for f in self.formulations:
            key = str(f)
            if key in seen:
                raise AnnotationError(f"cluster {self.index} repeats formulation {key!r}")
            seen.add(key)

    @cached_property
    def triples(self) -> frozenset[ConcreteTriple]:
        out: set[ConcreteTriple] = set()
        for f in self.formulations:
            out |= expand_formulation(f)
        return frozenset(out)


@dataclass(frozen=True)
class SentenceGold:
    sent_id: str
    text: str = ""
    clusters: tuple[Cluster, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))
        check_sent_id(self.sent_id)
        if any(c in self.text for c in "\n\r"):
            raise AnnotationError("sentence text contains a line break")
        for expected, c in enumerate(self.clusters, start=1):
            if c.index != expected:
                raise AnnotationError(
                    f"sentence {self.sent_id}: cluster indices must be 1..N in order, "
                    f"found {c.index} at position {expected}"
                )

    def cluster(self, index: int) -> Cluster:
        return self.clusters[index - 1]


def check_sent_id(sent_id: str) -> str:
    if not isinstance(sent_id, str) or not sent_id:
        raise AnnotationError("empty sent_id")
    if any(c in sent_id for c in "\t\n\r"):
        raise AnnotationError(f"sent_id {sent_id!r} contains a tab or line break")
    return sent_id


@dataclass(frozen=True)
class Extraction:
    sent_id: str
    arg1: Tokens
    rel: Tokens
    arg2: Tokens = ()
    confidence: Optional[float] = None

    def __post_init__(self):
        check_sent_id(self.sent_id)
        for name in ("arg1", "rel", "arg2"):
            object.__setattr__(self, name, as_tokens(getattr(self, name)))
        if not self.arg1 or not self.rel:
            raise AnnotationError("extraction arg1 and rel must not be empty")

    @property
    def triple(self) -> ConcreteTriple:
        return ConcreteTriple(self.arg1, self.rel, self.arg2)

    def __len__(self) -> int:
        return len(self.arg1) + len(self.rel) + len(self.arg2)


def linearize(t: Sequence[Tokens]) -> Tokens:
    """arg1 + rel + arg2 as a single token sequence."""
    return tuple(itertools.chain.from_iterable(t))


# ASCII symbols such as the backtick quote (Sk) are not in Unicode's P*
# categories but are treated as punctuation here.
_ASCII_PUNCT = frozenset(string.punctuation)


def _is_punct(ch: str) -> bool:
    return ch in _ASCII_PUNCT or unicodedata.category(ch).startswith("P")


def normalize_token(tok: str) -> str:
    return "".join(ch for ch in tok.lower() if not _is_punct(ch))


def normalize_punc(ts: Iterable[str]) -> Tokens:
    """Lowercase and strip punctuation; tokens that become empty are dropped."""
    out = []
    for tok in ts:
        norm = normalize_token(tok)
        if norm:
            out.append(norm)
    return tuple(out)


def normalize_triple(t: Sequence[Tokens]) -> ConcreteTriple:
    return ConcreteTriple(*(normalize_punc(s) for s in t))
