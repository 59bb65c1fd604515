"""Run manifests and report rendering (JSON and aligned plain text)."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from . import __version__
from .matcher import MatcherConfig


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return "sha256:" + h.hexdigest()


@dataclass
class RunManifest:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    matcher: Optional[dict[str, Any]] = None
    version: str = __version__
    timestamp: str = ""

    @classmethod
    def create(cls, command: str, paths: Iterable[str | Path], cfg: Optional[MatcherConfig] = None) -> "RunManifest":
        return cls(
            command,
            {str(p): file_digest(p) for p in paths},
            None if cfg is None else {"name": cfg.name, **asdict(cfg)},
            timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        )


def to_json(manifest: RunManifest, body: dict) -> str:
    return json.dumps({"manifest": asdict(manifest), **body}, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Left-aligned text columns; numbers right-aligned."""
    cells = [list(headers)] + [[_fmt(v) for v in r] for r in rows]
    numeric = [len(cells) > 1 and all(_is_num(r[j]) for r in cells[1:]) for j in range(len(headers))]
    widths = [max(len(r[j]) for r in cells) for j in range(len(headers))]
    lines = []
    for r in cells:
        parts = [r[j].rjust(widths[j]) if numeric[j] else r[j].ljust(widths[j]) for j in range(len(headers))]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"


def _is_num(s: str) -> bool:
    if s == "-":
        return True
    try:
        float(s)
    except ValueError:
        return False
    return True


def manifest_text(m: RunManifest) -> str:
    lines = [f"# command: {m.command}", f"# version: {m.version}", f"# timestamp: {m.timestamp}"]
    if m.matcher:
        lines.append(f"# matcher: {m.matcher['name']}")
    lines += [f"# input: {p} {d}" for p, d in m.inputs.items()]
    return "\n".join(lines) + "\n"
