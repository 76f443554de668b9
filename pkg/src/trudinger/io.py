"""CSV and text output with atomic writes."""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .fields import Trace

__all__ = ["fmt", "write_text_atomic", "csv_text", "trace_csv", "norms_csv", "checks_csv", "read_profile_csv"]


def fmt(x) -> str:
    """Numbers at 17 significant digits; ``None`` as an empty field."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(x)


def write_text_atomic(path, text: str) -> None:
    """Write UTF-8 text with LF endings via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def trace_csv(trace: Trace) -> str:
    """``t,r,u`` rows sorted by time, then radius."""
    r = trace.grid.centers
    lines = ["t,r,u"]
    for t, vals in zip(trace.times, trace.values):
        ts = fmt(t)
        lines.extend(f"{ts},{fmt(ri)},{fmt(ui)}" for ri, ui in zip(r, vals))
    return "\n".join(lines) + "\n"


def norms_csv(rows) -> str:
    """Rows of ``(t, lambda, norm)``."""
    return csv_text(["t", "lambda", "norm"], rows)


def checks_csv(results) -> str:
    """``check,t,lhs,rhs,margin,pass,context`` sorted by ``(check, t, context)``."""
    rows = sorted(results, key=lambda c: c.sort_key())
    lines = ["check,t,lhs,rhs,margin,pass,context"]
    for c in rows:
        ctx = c.context_str()
        if "," in ctx or '"' in ctx:
            ctx = '"' + ctx.replace('"', '""') + '"'
        lines.append(",".join([c.name, fmt(c.t), fmt(c.lhs), fmt(c.rhs), fmt(c.margin), fmt(c.passed), ctx]))
    return "\n".join(lines) + "\n"


def read_profile_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Two numeric columns (header row optional) as float arrays."""
    data = np.genfromtxt(path, delimiter=",", dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"{path}: expected two numeric columns")
    if np.isnan(data[0]).all():
        data = data[1:]
    if np.isnan(data).any():
        raise ValueError(f"{path}: non-numeric entries")
    return data[:, 0], data[:, 1]
