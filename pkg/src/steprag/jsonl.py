"""Line-delimited JSON helpers used by every file format in the package."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import ParseError


def dumps(obj: Any) -> str:
    """Canonical single-line encoding: sorted keys, no trailing spaces.

    Canonical form makes output files byte-reproducible across runs.
    """
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_lines(path: str | Path, objs: Iterable[Any]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(dumps(obj))
            fh.write("\n")
            n += 1
    return n


def read_lines(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line_no, record) pairs; blank lines are skipped.

    Raises ParseError on malformed JSON or non-object lines.
    """
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise ParseError(path, line_no, "expected a JSON object")
            yield line_no, obj
