"""JSON and CSV emission of verification reports.

Floats are written as the shortest decimal that round-trips (Python's repr),
keys are sorted and files are written to a temporary name in the target
directory and then renamed, so a reader never sees a half-written report.
Timings go to a separate sidecar file because they differ between runs.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

__all__ = ["report_json", "report_csv", "timings_json", "emit_report", "write_reports", "CSV_COLUMNS"]

CSV_COLUMNS = ("check", "lhs", "rhs", "margin", "pass")


def _clean(obj):
    """Replace non-finite floats (not valid JSON) by strings and numpy scalars by Python ones."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def report_json(report):
    return json.dumps(_clean(report.to_dict()), sort_keys=True, indent=1, allow_nan=False) + "\n"


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in report.to_dict()["records"]:
        writer.writerow([rec["name"], _cell(rec.get("lhs")), _cell(rec.get("rhs")), _cell(rec.get("margin")),
                         "error" if rec["status"] == "errored" else _cell(rec["status"] == "passed")])
    return buf.getvalue()


def timings_json(report):
    return json.dumps({"seconds": report.timings}, sort_keys=True, indent=1) + "\n"


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(report, path, fmt="json"):
    """Write one rendering of ``report`` to ``path`` atomically."""
    renderers = {"json": report_json, "csv": report_csv, "timings": timings_json}
    if fmt not in renderers:
        raise ValueError(f"unknown report format {fmt!r}")
    _atomic_write(path, renderers[fmt](report))
    return path


def write_reports(report, out_dir):
    """report.json, summary.csv and timings.json in ``out_dir``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    return {fmt: emit_report(report, os.path.join(out_dir, name), fmt)
            for fmt, name in (("json", "report.json"), ("csv", "summary.csv"), ("timings", "timings.json"))}
