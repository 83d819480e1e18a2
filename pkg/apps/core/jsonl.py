import json
from collections.abc import Iterator
from pathlib import Path
from typing import Any


def dumps_line(obj: Any) -> str:
    """Compact, key-order preserving JSON line (no trailing newline)."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def iter_lines(path: Path) -> Iterator[tuple[int, Any | None, str]]:
    """
    Yield ``(line_number, decoded_object, raw_text)`` for each non-blank line.

    ``decoded_object`` is None when the line is not valid JSON so callers can
    raise their own format error with the line number.
    """
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            text = raw.strip()
            if not text:
                continue
            try:
                yield number, json.loads(text), text
            except json.JSONDecodeError:
                yield number, None, text
