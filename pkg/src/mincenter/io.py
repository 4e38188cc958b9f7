"""File formats: orbit CSV and deterministic JSON reports."""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .symbolic import DEPTH, PAD


def write_orbit_csv(orbit, fh):
    """Columns ``t, x_1..x_d``; shift orbits use ``t, s_1..s_64`` (empty
    cells past the end of a finite word)."""
    w = csv.writer(fh, lineterminator="\n")
    if orbit.system.is_symbolic:
        w.writerow(["t"] + [f"s_{i + 1}" for i in range(DEPTH)])
        for t, row in zip(orbit.times, orbit.states):
            w.writerow([_num(t)] + ["" if v == PAD else int(v) for v in row])
        return
    d = orbit.states.shape[-1]
    w.writerow(["t"] + [f"x_{i + 1}" for i in range(d)])
    for t, row in zip(orbit.times, orbit.states):
        w.writerow([_num(t)] + [_num(v) for v in row])


def read_orbit_csv(fh):
    """Return ``(times, states)`` arrays from :func:`write_orbit_csv` output."""
    rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    times = np.array([float(r[0]) for r in body])
    if header[1].startswith("s_"):
        states = np.array([[PAD if v == "" else int(v) for v in r[1:]] for r in body], dtype=np.uint8)
    else:
        states = np.array([[float(v) for v in r[1:]] for r in body])
    return times, states


def _num(v):
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return "%.17g" % v


def _float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    s = "%.17g" % v
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent=2) -> str:
    """JSON with sorted keys and floats printed to 17 significant digits, so
    equal inputs always give byte-identical text."""
    return _dump(obj, indent, 0) + "\n"


def _dump(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating, bool, str)) or v is None for v in obj):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return _dump(obj.tolist(), indent, level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))
