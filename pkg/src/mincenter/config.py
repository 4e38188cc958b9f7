"""Plain-text experiment configuration.

A config file has a ``[system]`` section, an ``[experiment]`` section and
an optional ``[acceptance]`` section::

    [system]
    family = rotation
    alpha = 0.6180339887498949
    x0 = 0.0

    [experiment]
    kind = mca
    horizon = 1000000
    resolution = 64

    [acceptance]
    n_cells = == 64
    center.lower = >= 0.99

Acceptance keys are dotted paths into the report's ``result`` object.  The
right-hand side is ``<op> <value>`` with ``op`` one of ``== != < <= > >=``,
or ``~ <value> +- <tol>``.
"""

from __future__ import annotations

import configparser
import hashlib
import inspect
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import symbolic
from .errors import ConfigError, MinCenterError
from .systems import FAMILIES, SystemSpec, as_state, make_system

KINDS = ("mca", "density", "chaos-scan", "qwap", "multi", "genericity", "sensitivity")

_INT = {"horizon", "resolution", "n_samples", "n_anchor", "n_probe", "N_max", "steps", "seed", "n_returns", "m", "threads"}
_FLOAT = {
    "delta", "epsilon", "delta_pos", "tol", "zero_tol", "pos_tol", "tail_fraction", "threshold",
    "gap_bound", "radius", "budget", "period", "duty", "t_max", "warn_below",
}
_FLOATS = {"times", "thetas", "taus", "radii", "center", "cells"}
_STR = {"kind", "name", "set", "checkpoints", "closure_seeds", "y", "candidates", "region", "bounds"}
_TOLERANCES = {"tol", "zero_tol", "pos_tol", "epsilon", "threshold", "delta_pos", "gap_bound", "radius"}
_SAMPLED = {"genericity", "sensitivity"}

_SYSTEM_KEYS = {"family", "kind", "metric", "delta", "x0"}


@dataclass(frozen=True)
class Predicate:
    path: str
    op: str
    value: float | str
    tol: float = 0.0
    text: str = ""

    def check(self, actual) -> bool:
        if actual is None:
            return False
        if self.op == "~":
            return abs(float(actual) - float(self.value)) <= self.tol
        if isinstance(self.value, str) or isinstance(actual, str):
            a, b = str(actual), str(self.value)
        else:
            a, b = float(actual), float(self.value)
        return {
            "==": a == b,
            "!=": a != b,
            "<": a < b,
            "<=": a <= b,
            ">": a > b,
            ">=": a >= b,
        }[self.op]


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: str
    system: SystemSpec
    x0: object
    params: dict
    acceptance: tuple = ()
    canonical: dict = field(default_factory=dict, repr=False)

    @property
    def config_hash(self) -> str:
        text = json.dumps(self.canonical, sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()

    @property
    def seed(self):
        return self.params.get("seed")


_PRED = re.compile(r"^\s*(==|!=|<=|>=|<|>)\s*(\S+)\s*$")
_APPROX = re.compile(r"^\s*~\s*(\S+)\s*\+-\s*(\S+)\s*$")


def parse_predicate(path, text, line=None) -> Predicate:
    m = _APPROX.match(text)
    try:
        if m:
            tol = float(m.group(2))
            if not tol > 0:
                raise ConfigError("acceptance tolerance must be positive", line, path)
            return Predicate(path, "~", float(m.group(1)), tol, text.strip())
        m = _PRED.match(text)
        if not m:
            raise ConfigError(f"cannot parse acceptance predicate {text!r}", line, path)
        raw = m.group(2)
        try:
            value = float(raw)
        except ValueError:
            value = raw
        if raw in ("true", "false"):
            value = 1.0 if raw == "true" else 0.0
        return Predicate(path, m.group(1), value, 0.0, text.strip())
    except ValueError as exc:
        raise ConfigError(f"bad number in predicate: {exc}", line, path) from None


def _line_index(text):
    """Map ``(section, key)`` to its 1-based line number."""
    where = {}
    section = None
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            continue
        key = re.split(r"[=:]", s, maxsplit=1)[0].strip()
        where.setdefault((section, key), i)
    return where


def _floats(text, line, key):
    try:
        return [float(eval_number(v)) for v in re.split(r"[,\s]+", text.strip()) if v]
    except ValueError:
        raise ConfigError(f"expected a list of numbers, got {text!r}", line, key) from None


_CONSTS = {"pi": math.pi, "sqrt2": math.sqrt(2.0), "golden": (math.sqrt(5.0) - 1.0) / 2.0, "e": math.e}


def eval_number(text: str) -> float:
    """A number, one of ``pi``, ``sqrt2``, ``golden``, ``e``, or ``a/b``."""
    t = text.strip()
    if t in _CONSTS:
        return _CONSTS[t]
    if "/" in t:
        a, b = t.split("/", 1)
        return eval_number(a) / eval_number(b)
    return float(t)


def parse_state(system: SystemSpec, text: str):
    """Parse ``"0.5"``, ``"1.0, 0.0"`` or a symbolic point such as ``110(01)``."""
    if system.is_symbolic:
        return symbolic.parse_point(text)
    return as_state(system, [eval_number(v) for v in re.split(r"[,\s]+", text.strip()) if v])


def _build_system(items, where):
    if "family" not in items:
        raise ConfigError("[system] needs a family", None, "family")
    family = items["family"]
    if family not in FAMILIES:
        raise ConfigError(
            f"unknown family {family!r}; choose from {', '.join(FAMILIES)}", where.get(("system", "family")), "family"
        )
    allowed = set(inspect.signature(FAMILIES[family]).parameters)
    params = {}
    for key, val in items.items():
        if key in _SYSTEM_KEYS:
            continue
        if key not in allowed:
            raise ConfigError(f"{family} has no parameter {key!r}", where.get(("system", key)), key)
        try:
            params[key] = eval_number(val)
        except ValueError:
            raise ConfigError(f"parameter {key} must be a number", where.get(("system", key)), key) from None
    if "dimension" in params:
        params["dimension"] = int(params["dimension"])
    if "alphabet" in params:
        params["alphabet"] = int(params["alphabet"])
    try:
        system = make_system(family, **params)
    except (MinCenterError, ValueError) as exc:
        raise ConfigError(str(exc), where.get(("system", "family")), "family") from None
    if "delta" in items:
        try:
            system = system.with_delta(eval_number(items["delta"]))
        except (MinCenterError, ValueError) as exc:
            raise ConfigError(str(exc), where.get(("system", "delta")), "delta") from None
    for key in ("kind", "metric"):
        if key in items and items[key] != getattr(system, key):
            raise ConfigError(
                f"{family} has {key} {getattr(system, key)!r}, config says {items[key]!r}",
                where.get(("system", key)),
                key,
            )
    return system, params


def load_config(text: str, name="experiment", seed=None) -> ExperimentConfig:
    """Parse and validate config text.  ``seed`` overrides the file's seed."""
    where = _line_index(text)
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"syntax error: {exc.errors[0][1].strip() if exc.errors else exc}", line) from None
    except configparser.Error as exc:
        raise ConfigError(f"syntax error: {exc.message}", getattr(exc, "lineno", None)) from None
    for sec in cp.sections():
        if sec not in ("system", "experiment", "acceptance"):
            raise ConfigError(f"unknown section [{sec}]", where.get((None, sec)))
    if not cp.has_section("experiment"):
        raise ConfigError("missing [experiment] section")
    exp = dict(cp.items("experiment"))
    kind = exp.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"experiment kind must be one of {', '.join(KINDS)}", where.get(("experiment", "kind")), "kind")
    system, x0, sys_items = None, None, {}
    if cp.has_section("system"):
        sys_items = dict(cp.items("system"))
        system, _ = _build_system(sys_items, where)
        if "x0" in sys_items:
            try:
                x0 = parse_state(system, sys_items["x0"])
            except (MinCenterError, ValueError) as exc:
                raise ConfigError(f"bad initial state: {exc}", where.get(("system", "x0")), "x0") from None
    elif kind != "density":
        raise ConfigError("missing [system] section")

    params = {}
    for key, val in exp.items():
        line = where.get(("experiment", key))
        try:
            if key in _INT:
                params[key] = int(val)
            elif key in _FLOAT:
                params[key] = eval_number(val)
            elif key in _FLOATS:
                params[key] = _floats(val, line, key)
            elif key in _STR:
                params[key] = val.strip()
            else:
                raise ConfigError(f"unknown experiment field {key!r}", line, key)
        except ValueError:
            raise ConfigError(f"bad value {val!r}", line, key) from None
        if key in _TOLERANCES and not params[key] > 0:
            raise ConfigError(f"{key} must be positive", line, key)
        if key in ("horizon", "resolution", "n_samples") and params[key] < 1:
            raise ConfigError(f"{key} must be positive", line, key)
    if "delta" in params and system is not None:
        try:
            system = system.with_delta(params["delta"])
        except MinCenterError as exc:
            raise ConfigError(str(exc), where.get(("experiment", "delta")), "delta") from None
    if seed is not None:
        params["seed"] = int(seed)
    if kind in _SAMPLED and "seed" not in params:
        raise ConfigError(f"{kind} experiments draw random samples and need a seed", None, "seed")
    if kind != "density" and x0 is None:
        raise ConfigError("[system] needs an initial state x0", None, "x0")

    acceptance = []
    if cp.has_section("acceptance"):
        for key, val in cp.items("acceptance"):
            acceptance.append(parse_predicate(key, val, where.get(("acceptance", key))))

    canonical = {
        "name": exp.get("name", name),
        "system": {k: v.strip() for k, v in sys_items.items()},
        "experiment": {k: v.strip() for k, v in exp.items() if k != "name"},
        "acceptance": {p.path: p.text for p in acceptance},
        "seed": params.get("seed"),
    }
    return ExperimentConfig(
        exp.get("name", name), kind, system, x0, params, tuple(acceptance), canonical
    )


def load_config_file(path, seed=None) -> ExperimentConfig:
    from pathlib import Path

    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return load_config(text, p.stem, seed)


def describe_state(x) -> str:
    if isinstance(x, symbolic.SymbolicPoint):
        return x.sequence.label + (f"+{x.offset}" if x.offset else "")
    return ", ".join("%.17g" % v for v in np.atleast_1d(x))
