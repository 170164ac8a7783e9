"""Deterministic JSON, CSV and SVG writers."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):  # enums
        return _encode(obj.value, indent, level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent, level + 1)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def write_csv(path, header, rows) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(float(v)) if isinstance(v, (float, np.floating, int, np.integer)) and not isinstance(v, bool) else v for v in row])
    path = Path(path)
    path.write_text(buf.getvalue())
    return path


def svg_curves(curves, markers=(), size: int = 480, title: str = "", stamp: str | None = None) -> str:
    """Polylines (closed complex point arrays) and point markers in a square viewport."""
    pts = [np.asarray(c, dtype=complex) for c in curves] + [np.asarray(list(markers), dtype=complex)]
    allp = np.concatenate([p for p in pts if p.size]) if any(p.size for p in pts) else np.array([0j])
    lo_x, hi_x = allp.real.min(), allp.real.max()
    lo_y, hi_y = allp.imag.min(), allp.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12) * 1.1
    cx, cy = (lo_x + hi_x) / 2, (lo_y + hi_y) / 2

    def xy(z):
        return (size / 2 + (z.real - cx) / span * size, size / 2 - (z.imag - cy) / span * size)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    if stamp:
        out.append(f"<!-- {stamp} -->")
    if title:
        out.append(f'<title>{title}</title>')
    out.append(f'<rect width="{size}" height="{size}" fill="white"/>')
    for c in curves:
        c = np.asarray(c, dtype=complex)
        coords = " ".join("%.3f,%.3f" % xy(z) for z in c)
        out.append(f'<polygon points="{coords}" fill="none" stroke="black" stroke-width="1"/>')
    for m in markers:
        x, y = xy(complex(m))
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, curves, markers=(), title: str = "") -> Path:
    path = Path(path)
    path.write_text(svg_curves(curves, markers, title=title))
    return path
