"""Deterministic report serialization and plot-data output.

JSON reports follow the "condreg/1" schema: fixed key order, floats
rendered with 12 significant digits, NaN/Inf mapped to null.  The same
float formatting feeds the TSV plot files, so identical inputs always
produce byte-identical output.  File writes go through a temp file and
rename, never a partial file.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any, Iterable, Sequence

import numpy as np

SCHEMA = "condreg/1"


def format_number(x: float) -> str:
    """12-significant-digit rendering; NaN/Inf become JSON null."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    value = float(x)
    if math.isnan(value) or math.isinf(value):
        return "null"
    return format(value, ".12g")


def _emit(obj: Any, pieces: list[str], indent: int) -> None:
    pad = "  " * indent
    if obj is None:
        pieces.append("null")
    elif isinstance(obj, bool):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(format_number(obj))
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            pieces.append(f'{pad}  {json.dumps(str(key))}: ')
            _emit(value, pieces, indent + 1)
            pieces.append(",\n" if i < len(obj) - 1 else "\n")
        pieces.append(pad + "}")
    elif isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = list(obj)
        if not items:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for i, value in enumerate(items):
            pieces.append(pad + "  ")
            _emit(value, pieces, indent + 1)
            pieces.append(",\n" if i < len(items) - 1 else "\n")
        pieces.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} in a report")


def dumps_report(document: dict) -> str:
    """Serialize a report document to deterministic JSON text."""
    pieces: list[str] = []
    _emit(document, pieces, 0)
    pieces.append("\n")
    return "".join(pieces)


def new_document(command: str, **sections: Any) -> dict:
    """Report skeleton: schema and command first, then the sections."""
    doc: dict[str, Any] = {"schema": SCHEMA, "command": command}
    doc.update(sections)
    return doc


def model_section(fitted) -> dict:
    """Coefficient table plus fit statistics for a FittedModel."""
    rows = []
    for i, label in enumerate(fitted.labels):
        rows.append(
            {
                "term": label,
                "coef": float(fitted.coef[i]),
                "se": float(fitted.se[i]),
                "t": float(fitted.t[i]),
                "p": float(fitted.p[i]),
            }
        )
    return {
        "response": fitted.spec.response,
        "coefficients": rows,
        "stats": {
            "n": fitted.n,
            "dof": fitted.dof,
            "r2": fitted.r2,
            "r2_adj": fitted.r2_adj,
            "rss": fitted.rss,
        },
    }


def plot_tsv(comments: Iterable[str], header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    """TSV plot data with '#' comment lines, numbers at 12 digits."""
    lines = [f"# {comment}" for comment in comments]
    lines.append("\t".join(header))
    for row in rows:
        lines.append("\t".join(format_number(value) for value in row))
    return "\n".join(lines) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
