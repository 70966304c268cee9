"""The hingechain/1 textual chain format.

A human-writable, line-oriented description::

    hingechain/1
    # comments and blank lines are ignored
    dimension 3
    hinge 1 0 0 | 0 0 1       # base point, then d-2 direction vectors
    hinge 2 0 0 | 0 0 1
    endpoint 3 0 0
    panel 0 0 1               # optional, one normal per body (n+1 lines)
    panel 0 0 1
    panel 0 0 1
    label example-chain       # optional

Direction vectors are orthonormalized on load; a warning is emitted when
the adjustment exceeds 1e-6.  Parse and validation errors carry the
offending line number where one exists.
"""

from __future__ import annotations

import warnings

import numpy as np

from .chain import ChainSpec
from .errors import ChainFormatError, HingeChainError
from .geom import AffineSubspace
from .panel import PanelChainSpec

FORMAT_HEADER = "hingechain/1"


def _parse_floats(text, line_no, field):
    try:
        values = [float(tok) for tok in text.split()]
    except ValueError as exc:
        raise ChainFormatError(f"field '{field}': {exc}", line=line_no) from None
    if not values:
        raise ChainFormatError(f"field '{field}' has no numbers", line=line_no)
    return np.array(values)


def _orthonormalize(rows, line_no):
    """Gram-Schmidt with a warning when the input needed real adjustment."""
    out = []
    for row in rows:
        v = row.copy()
        for prev in out:
            v -= (v @ prev) * prev
        nrm = np.linalg.norm(v)
        if nrm < 1e-9:
            raise ChainFormatError(
                "hinge directions are linearly dependent", line=line_no
            )
        out.append(v / nrm)
    out = np.array(out) if out else np.zeros((0, rows.shape[1]))
    if rows.size and np.max(np.abs(out - rows)) > 1e-6:
        warnings.warn(
            f"line {line_no}: hinge directions adjusted by more than 1e-6 "
            "during orthonormalization",
            stacklevel=3,
        )
    return out


def parse_chain_text(text):
    """Parse a hingechain/1 document into a ChainSpec or PanelChainSpec."""
    dimension = None
    hinges = []  # (line_no, base, raw_dir_rows)
    endpoint = None
    panels = []
    label = None
    header_seen = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if not header_seen:
            if stripped != FORMAT_HEADER:
                raise ChainFormatError(
                    f"expected header '{FORMAT_HEADER}', got '{stripped}'", line=line_no
                )
            header_seen = True
            continue
        key, _, rest = stripped.partition(" ")
        key = key.lower()
        if key == "dimension":
            if dimension is not None:
                raise ChainFormatError("duplicate field 'dimension'", line=line_no)
            try:
                dimension = int(rest.strip())
            except ValueError:
                raise ChainFormatError(
                    "field 'dimension' must be an integer", line=line_no
                ) from None
        elif key == "hinge":
            if dimension is None:
                raise ChainFormatError(
                    "field 'hinge' appears before 'dimension'", line=line_no
                )
            groups = rest.split("|")
            base = _parse_floats(groups[0], line_no, "hinge")
            if base.size != dimension:
                raise ChainFormatError(
                    f"field 'hinge': base point needs {dimension} coordinates",
                    line=line_no,
                )
            dir_rows = []
            for g in groups[1:]:
                v = _parse_floats(g, line_no, "hinge direction")
                if v.size != dimension:
                    raise ChainFormatError(
                        f"field 'hinge': direction needs {dimension} coordinates",
                        line=line_no,
                    )
                dir_rows.append(v)
            if len(dir_rows) != dimension - 2:
                raise ChainFormatError(
                    f"field 'hinge': expected {dimension - 2} direction vectors, "
                    f"got {len(dir_rows)}",
                    line=line_no,
                )
            rows = np.array(dir_rows) if dir_rows else np.zeros((0, dimension))
            hinges.append((line_no, base, rows))
        elif key == "endpoint":
            if dimension is None:
                raise ChainFormatError(
                    "field 'endpoint' appears before 'dimension'", line=line_no
                )
            if endpoint is not None:
                raise ChainFormatError("duplicate field 'endpoint'", line=line_no)
            endpoint = _parse_floats(rest, line_no, "endpoint")
            if endpoint.size != dimension:
                raise ChainFormatError(
                    f"field 'endpoint' needs {dimension} coordinates", line=line_no
                )
        elif key == "panel":
            if dimension is None:
                raise ChainFormatError(
                    "field 'panel' appears before 'dimension'", line=line_no
                )
            normal = _parse_floats(rest, line_no, "panel")
            if normal.size != dimension:
                raise ChainFormatError(
                    f"field 'panel' needs {dimension} coordinates", line=line_no
                )
            panels.append(normal)
        elif key == "label":
            label = rest.strip()
        else:
            raise ChainFormatError(f"unknown field '{key}'", line=line_no)
    if not header_seen:
        raise ChainFormatError(f"missing header '{FORMAT_HEADER}'", line=1)
    if dimension is None:
        raise ChainFormatError("missing field 'dimension'")
    if not hinges:
        raise ChainFormatError("missing field 'hinge' (need at least one)")
    if endpoint is None:
        raise ChainFormatError("missing field 'endpoint'")
    subspaces = []
    for line_no, base, rows in hinges:
        dirs = _orthonormalize(rows, line_no)
        try:
            subspaces.append(AffineSubspace(base, dirs))
        except HingeChainError as exc:
            raise ChainFormatError(f"field 'hinge': {exc}", line=line_no) from None
    chain = ChainSpec(dimension, subspaces, endpoint)
    if panels:
        if len(panels) != chain.n + 1:
            raise ChainFormatError(
                f"field 'panel': need {chain.n + 1} normals (one per body), "
                f"got {len(panels)}"
            )
        result = PanelChainSpec(chain, np.array(panels))
    else:
        result = chain
    result.label = label
    return result


def load_chain(path):
    """Load a chain description from a file path."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_chain_text(fh.read())


def format_chain(chain_or_panel, label=None):
    """Serialize a chain back to hingechain/1 text."""
    if isinstance(chain_or_panel, PanelChainSpec):
        chain = chain_or_panel.chain
        normals = chain_or_panel.panel_normals
    else:
        chain = chain_or_panel
        normals = None
    lines = [FORMAT_HEADER, f"dimension {chain.dimension}"]
    for h in chain.hinges:
        parts = [" ".join(repr(float(v)) for v in h.base)]
        parts += [" ".join(repr(float(v)) for v in row) for row in h.directions]
        lines.append("hinge " + " | ".join(parts))
    lines.append("endpoint " + " ".join(repr(float(v)) for v in chain.endpoint))
    if normals is not None:
        for row in normals:
            lines.append("panel " + " ".join(repr(float(v)) for v in row))
    if label:
        lines.append(f"label {label}")
    return "\n".join(lines) + "\n"
