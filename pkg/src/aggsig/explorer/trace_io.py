"""trace-v1: one JSON object per line, keys sorted, so counterexamples diff cleanly."""
from __future__ import annotations

import json
from typing import Iterable

from ..errors import UsageError
from .events import TraceEvent

SCHEMA = "trace-v1"


def dumps_trace(trace: Iterable[TraceEvent]) -> str:
    return "".join(json.dumps(te.to_dict(), sort_keys=True, separators=(",", ":")) + "\n" for te in trace)


def loads_trace(text: str) -> list[dict]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise UsageError(f"line {lineno}: not JSON ({exc.msg})") from None
        if rec.get("schema") != SCHEMA:
            raise UsageError(f"line {lineno}: expected schema {SCHEMA!r}")
        if out and rec["position"] <= out[-1]["position"]:
            raise UsageError(f"line {lineno}: positions must increase")
        out.append(rec)
    return out


def render_trace(trace: Iterable[TraceEvent]) -> str:
    return "".join(te.render() + "\n" for te in trace)
