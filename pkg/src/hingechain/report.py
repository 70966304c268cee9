"""Report emitters: structured (JSON) and flat table output.

Reports are self-describing: every tolerance that shaped the result is
echoed in the header.  Float values are rendered with shortest round-trip
repr, so a structured report parses back to the exact values and repeated
runs with the same seed are byte-identical.
"""

import io
import json

import numpy as np


def _plain(value):
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float) and np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render(report, fmt="table"):
    """Render a report dict; ``fmt`` is "table" or "structured"."""
    if fmt == "structured":
        return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown report format '{fmt}'")
    out = io.StringIO()
    out.write(f"# command: {report.get('command', '?')}\n")
    for key in sorted(report.get("tolerances", {})):
        out.write(f"# tol.{key}: {_cell(report['tolerances'][key])}\n")
    for key in sorted(report.get("inputs", {})):
        out.write(f"# input.{key}: {_cell(report['inputs'][key])}\n")
    results = report.get("results", {})
    for key in sorted(results):
        val = results[key]
        if isinstance(val, (list, tuple, np.ndarray)):
            val = " ".join(_cell(_plain(v)) for v in val)
        out.write(f"{key}: {_cell(val)}\n")
    for name in sorted(report.get("tables", {})):
        table = report["tables"][name]
        out.write(f"## {name}\n")
        out.write(",".join(table["columns"]) + "\n")
        for row in table["rows"]:
            out.write(",".join(_cell(_plain(v)) for v in row) + "\n")
    return out.getvalue()


def parse_structured(text):
    """Parse a structured report back into a dict (round-trip helper)."""
    return json.loads(text)
