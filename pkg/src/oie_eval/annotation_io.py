"""Readers and writers for the four on-disk formats.

Gold (one block per sentence, blank line between blocks, ``#`` comments)::

    sent_id:<id>\\t<sentence text>
    <cluster> --> <arg1> --> <rel> --> <arg2>

Extractions (TSV)::

    <sent_id>\\t<arg1>\\t<rel>\\t<arg2>[\\t<confidence>]

Match annotations: the extraction columns plus a trailing cluster index
(``0`` = should match nothing).

Score tables: TSV with a header row; first column holds system names, ``-``
or an empty cell marks a missing value.

All readers accept ``str``, ``bytes``, a path, or an open text/binary file and
raise :class:`FormatError` with a line number on bad input.  Writers emit
canonical UTF-8 text with LF endings.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .model import (
    AnnotationError,
    Cluster,
    Extraction,
    Formulation,
    SentenceGold,
)

Source = Union[str, bytes, os.PathLike, IO]

HEADER_PREFIX = "sent_id:"
_CLUSTER_LINE = re.compile(r"([0-9]+) --> ", re.ASCII)
_INT = re.compile(r"[0-9]+", re.ASCII)
MISSING = "-"


class FormatError(ValueError):
    """Malformed input.  ``str(err)`` reads ``source:line: message``."""

    def __init__(self, message: str, line: int = 0, column: int = 1, source: str = "<input>"):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}: {message}")


@dataclass(frozen=True)
class GoldCorpus:
    sentences: tuple[SentenceGold, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        seen = set()
        for s in self.sentences:
            if s.sent_id in seen:
                raise AnnotationError(f"duplicate sent_id {s.sent_id!r}")
            seen.add(s.sent_id)

    def __iter__(self) -> Iterator[SentenceGold]:
        return iter(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    def by_id(self) -> dict[str, SentenceGold]:
        return {s.sent_id: s for s in self.sentences}

    @property
    def n_clusters(self) -> int:
        return sum(len(s.clusters) for s in self.sentences)


@dataclass(frozen=True)
class ExtractionSet:
    system_name: str
    extractions: tuple[Extraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "extractions", tuple(self.extractions))

    def __iter__(self) -> Iterator[Extraction]:
        return iter(self.extractions)

    def __len__(self) -> int:
        return len(self.extractions)

    def orphans(self, gold: GoldCorpus) -> list[Extraction]:
        known = gold.by_id()
        return [e for e in self.extractions if e.sent_id not in known]


@dataclass(frozen=True)
class MatchAnnotation:
    extraction: Extraction
    gold_cluster: int

    def __post_init__(self):
        if not isinstance(self.gold_cluster, int) or self.gold_cluster < 0:
            raise AnnotationError(f"gold cluster must be a non-negative integer, got {self.gold_cluster!r}")


@dataclass
class ScoreTable:
    """A (system x metric) matrix; missing cells are NaN."""

    row_labels: list[str]
    column_labels: list[str]
    values: np.ndarray
    corner: str = "system"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(len(self.row_labels), len(self.column_labels))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def column(self, label: str) -> np.ndarray:
        try:
            return self.values[:, self.column_labels.index(label)]
        except ValueError:
            raise KeyError(label) from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScoreTable):
            return NotImplemented
        return (
            self.row_labels == other.row_labels
            and self.column_labels == other.column_labels
            and self.corner == other.corner
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


# ---------------------------------------------------------------- input plumbing


def _read_text(src: Source) -> tuple[str, str]:
    if isinstance(src, bytes):
        data, name = src, "<bytes>"
    elif isinstance(src, str):
        return src, "<string>"
    elif isinstance(src, os.PathLike):
        name = os.fspath(src)
        data = Path(src).read_bytes()
    else:
        name = getattr(src, "name", "<stream>")
        data = src.read()
        if isinstance(data, str):
            return data, str(name)
    try:
        return data.decode("utf-8"), str(name)
    except UnicodeDecodeError as err:
        line = data[: err.start].count(b"\n") + 1
        raise FormatError("invalid UTF-8", line=line, source=str(name)) from None


def _lines(text: str) -> Iterator[tuple[int, str]]:
    # only LF (and CRLF) end a line; other Unicode separators stay inside it
    for n, line in enumerate(text.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        yield n, line


# ---------------------------------------------------------------- gold


def parse_gold(src: Source, source: Optional[str] = None) -> GoldCorpus:
    text, name = _read_text(src)
    name = source or name
    sentences: list[SentenceGold] = []
    seen_ids: dict[str, int] = {}

    header: Optional[tuple[int, str, str]] = None
    clusters: list[list[Formulation]] = []

    def close():
        nonlocal header, clusters
        if header is None:
            return
        line, sid, stext = header
        try:
            sentences.append(
                SentenceGold(sid, stext, tuple(Cluster(i, tuple(fs)) for i, fs in enumerate(clusters, 1)))
            )
        except AnnotationError as err:
            raise FormatError(str(err), line=line, source=name) from None
        header, clusters = None, []

    for n, line in _lines(text):
        if line.startswith("#"):
            continue
        if not line.strip():
            close()
            continue
        if line.startswith(HEADER_PREFIX):
            close()
            sid, _, stext = line[len(HEADER_PREFIX):].partition("\t")
            if not sid:
                raise FormatError("empty sent_id", line=n, column=len(HEADER_PREFIX) + 1, source=name)
            if sid in seen_ids:
                raise FormatError(
                    f"duplicate sent_id {sid!r} (first seen on line {seen_ids[sid]})", line=n, source=name
                )
            seen_ids[sid] = n
            header = (n, sid, stext)
            continue
        m = _CLUSTER_LINE.match(line)
        if m is None:
            if header is not None and line.split(" ", 1)[0].isdigit() and "-->" in line:
                raise FormatError("malformed slot separators", line=n, source=name)
            raise FormatError(
                "expected 'sent_id:<id>\\t<text>' or '<cluster> --> <arg1> --> <rel> --> <arg2>'",
                line=n,
                source=name,
            )
        if header is None:
            raise FormatError("cluster line outside a sentence block", line=n, source=name)
        idx = int(m.group(1))
        if idx == len(clusters) + 1:
            clusters.append([])
        elif idx != len(clusters) or idx == 0:
            raise FormatError(
                f"non-contiguous cluster index {idx} (expected {len(clusters) or 1}"
                + (f" or {len(clusters) + 1})" if clusters else ")"),
                line=n,
                source=name,
            )
        try:
            form = Formulation.parse(line[m.end():])
        except AnnotationError as err:
            msg = str(err)
            if msg.startswith("expected 3 slots"):
                msg = "malformed slot separators: " + msg
            raise FormatError(msg, line=n, column=m.end() + 1, source=name) from None
        if any(str(form) == str(f) for f in clusters[-1]):
            raise FormatError(f"duplicate formulation in cluster {idx}", line=n, source=name)
        clusters[-1].append(form)
    close()
    return GoldCorpus(tuple(sentences))


def serialize_sentence(s: SentenceGold) -> str:
    lines = [f"{HEADER_PREFIX}{s.sent_id}\t{s.text}"]
    for c in s.clusters:
        lines.extend(f"{c.index} --> {f}" for f in c.formulations)
    return "\n".join(lines) + "\n"


def serialize_gold(corpus: GoldCorpus | Iterable[SentenceGold]) -> str:
    return "\n".join(serialize_sentence(s) for s in corpus)


# ---------------------------------------------------------------- extractions


def _extraction_from_cols(cols: list[str], n: int, name: str) -> Extraction:
    sid, a1, rel, a2 = cols[:4]
    conf = None
    if len(cols) == 5:
        try:
            conf = float(cols[4])
        except ValueError:
            raise FormatError(f"non-numeric confidence {cols[4]!r}", line=n, source=name) from None
        if not math.isfinite(conf):
            raise FormatError(f"non-finite confidence {cols[4]!r}", line=n, source=name)
    if not a1.split():
        raise FormatError("empty arg1", line=n, source=name)
    if not rel.split():
        raise FormatError("empty relation", line=n, source=name)
    try:
        return Extraction(sid, tuple(a1.split()), tuple(rel.split()), tuple(a2.split()), conf)
    except AnnotationError as err:
        raise FormatError(str(err), line=n, source=name) from None


def parse_extractions(src: Source, system_name: Optional[str] = None, source: Optional[str] = None) -> ExtractionSet:
    text, name = _read_text(src)
    name = source or name
    if system_name is None:
        system_name = Path(name).stem if not name.startswith("<") else "system"
    out = []
    for n, line in _lines(text):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) not in (4, 5):
            raise FormatError(f"expected 4 or 5 tab-separated columns, got {len(cols)}", line=n, source=name)
        out.append(_extraction_from_cols(cols, n, name))
    return ExtractionSet(system_name, tuple(out))


def _fmt_conf(c: float) -> str:
    return repr(float(c))


def serialize_extraction(e: Extraction) -> str:
    cols = [e.sent_id, " ".join(e.arg1), " ".join(e.rel), " ".join(e.arg2)]
    if e.confidence is not None:
        cols.append(_fmt_conf(e.confidence))
    return "\t".join(cols)


def serialize_extractions(xs: ExtractionSet | Iterable[Extraction]) -> str:
    return "".join(serialize_extraction(e) + "\n" for e in xs)


# ---------------------------------------------------------------- match annotations


def parse_match_annotations(
    src: Source, gold: Optional[GoldCorpus] = None, source: Optional[str] = None
) -> list[MatchAnnotation]:
    text, name = _read_text(src)
    name = source or name
    counts = {s.sent_id: len(s.clusters) for s in gold} if gold is not None else None
    out = []
    for n, line in _lines(text):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) not in (5, 6):
            raise FormatError(f"expected 5 or 6 tab-separated columns, got {len(cols)}", line=n, source=name)
        label = cols[-1].strip()
        if not _INT.fullmatch(label):
            raise FormatError(f"cluster label {cols[-1]!r} is not a non-negative integer", line=n, source=name)
        e = _extraction_from_cols(cols[:-1], n, name)
        k = int(label)
        if counts is not None:
            limit = counts.get(e.sent_id, 0)
            if k > limit:
                where = f"has {limit} clusters" if e.sent_id in counts else "is not in the gold corpus"
                raise FormatError(f"cluster label {k} but sentence {e.sent_id!r} {where}", line=n, source=name)
        out.append(MatchAnnotation(e, k))
    return out


def serialize_match_annotations(anns: Iterable[MatchAnnotation]) -> str:
    return "".join(f"{serialize_extraction(a.extraction)}\t{a.gold_cluster}\n" for a in anns)


# ---------------------------------------------------------------- score tables


def parse_score_table(src: Source, source: Optional[str] = None) -> ScoreTable:
    text, name = _read_text(src)
    name = source or name
    rows = [(n, line) for n, line in _lines(text) if line.strip()]
    if not rows:
        raise FormatError("empty score table (a header row is required)", line=1, source=name)
    hn, header = rows[0]
    head = header.split("\t")
    if len(head) < 2:
        raise FormatError("header needs a label column and at least one metric column", line=hn, source=name)
    labels, values = [], []
    for n, line in rows[1:]:
        cells = line.split("\t")
        if len(cells) != len(head):
            raise FormatError(f"ragged row: {len(cells)} cells, header has {len(head)}", line=n, source=name)
        row = []
        for j, cell in enumerate(cells[1:], start=1):
            c = cell.strip()
            if c in ("", MISSING):
                row.append(math.nan)
                continue
            try:
                v = float(c)
            except ValueError:
                raise FormatError(f"non-numeric cell {cell!r} in column {head[j]!r}", line=n, source=name) from None
            if not math.isfinite(v):
                raise FormatError(f"non-finite cell {cell!r} in column {head[j]!r}", line=n, source=name)
            row.append(v)
        labels.append(cells[0])
        values.append(row)
    return ScoreTable(labels, head[1:], np.array(values, dtype=float).reshape(len(labels), len(head) - 1), corner=head[0])


def serialize_score_table(t: ScoreTable) -> str:
    lines = ["\t".join([t.corner, *t.column_labels])]
    for label, row in zip(t.row_labels, t.values):
        lines.append("\t".join([label, *(MISSING if math.isnan(v) else repr(float(v)) for v in row)]))
    return "\n".join(lines) + "\n"


def load(path: Union[str, os.PathLike], kind: str, **kw):
    """Read ``path`` with the parser for ``kind`` (gold, extractions, matches, scores)."""
    parser = {
        "gold": parse_gold,
        "extractions": parse_extractions,
        "matches": parse_match_annotations,
        "scores": parse_score_table,
    }[kind]
    return parser(Path(path), **kw)


__all__: Sequence[str] = [
    "FormatError",
    "GoldCorpus",
    "ExtractionSet",
    "MatchAnnotation",
    "ScoreTable",
    "parse_gold",
    "serialize_gold",
    "serialize_sentence",
    "parse_extractions",
    "serialize_extractions",
    "serialize_extraction",
    "parse_match_annotations",
    "serialize_match_annotations",
    "parse_score_table",
    "serialize_score_table",
    "load",
]
