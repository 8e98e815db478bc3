"""Report envelopes and long-format CSV rows."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable

from abelstat import __version__


def _clean(obj: Any) -> Any:
    # JSON has no inf/nan; emit them as strings so reports always re-parse
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def envelope(command: str, config: dict, result: Any) -> dict:
    return {"tool": "abelstat", "version": __version__, "command": command,
            "config": _clean(config), "result": _clean(result)}


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def to_csv(header: list[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


SAMPLE_HEADER = ["method", "parameter", "value", "truncation_bound", "terms_used"]


def estimate_rows(estimate) -> list[list]:
    return [[estimate.method, s.parameter, s.value, s.truncation_bound, s.terms_used] for s in estimate.samples]


VERDICT_HEADER = ["method", "candidate_limit", "classification", "eps", "status", "parameter", "value", "tail_sup"]


def verdict_rows(verdict) -> list[list]:
    rows = []
    for e in verdict.evidence:
        if e.estimate is None:
            rows.append([verdict.method, verdict.candidate_limit, verdict.classification, e.eps, e.status,
                         "", "", e.tail_sup])
            continue
        for s in e.estimate.samples:
            rows.append([verdict.method, verdict.candidate_limit, verdict.classification, e.eps, e.status,
                         s.parameter, s.value, ""])
    return rows


PROBE_HEADER = ["row", "name", "limit", "expected", "input_ordinary", "image_abel", "image_ordinary", "flag_value"]


def probe_rows(report) -> list[list]:
    rows = [["flag", flag, "", "", "", "", "", value] for flag, value in report.flags.items()]
    for m in report.members:
        rows.append(["member", m.member, m.limit, m.expected, m.input_ordinary, m.image_abel, m.image_ordinary, ""])
    return rows
