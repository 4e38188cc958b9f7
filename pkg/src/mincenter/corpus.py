"""Built-in regression corpus.

Each case is an ordinary experiment config tagged with the acceptance
criterion it exercises.  Reports are compared against the golden copies in
``mincenter/golden``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .config import load_config


@dataclass(frozen=True)
class Case:
    name: str
    criterion: int
    text: str

    def config(self, seed=None):
        return load_config(self.text, self.name, seed)

    @property
    def kind(self):
        return self.config().kind


def _mca(name, crit, family, x0, resolution, extra="", system="", accept=""):
    return Case(name, crit, f"""
[system]
family = {family}
x0 = {x0}
{system}
[experiment]
kind = mca
resolution = {resolution}
{extra}
[acceptance]
center.ok = == 1
minimal.ok = == 1
invariant = == 1
{accept}
""")


def _qwap(name, family, x0, resolution, extra="", system=""):
    return Case(name, 10, f"""
[system]
family = {family}
x0 = {x0}
{system}
[experiment]
kind = qwap
resolution = {resolution}
{extra}
[acceptance]
chain_ok = == 1
crosscheck.ok = == 1
""")


def _multi(name, family, x0, resolution, times, extra="", system=""):
    return Case(name, 11, f"""
[system]
family = {family}
x0 = {x0}
{system}
[experiment]
kind = multi
resolution = {resolution}
times = {times}
{extra}
[acceptance]
lower = >= 0.99
""")


CASES = (
    Case("density-evens", 1, """
[experiment]
kind = density
set = evens
horizon = 10000
checkpoints = linear
[acceptance]
lower = ~ 0.5 +- 1e-3
upper = ~ 0.5 +- 1e-3
"""),
    Case("density-blocks-scaling", 2, """
[experiment]
kind = density
set = blocks
period = 2
duty = 1
delta = 0.01
t_max = 1000
taus = 0.5, 2, pi
[acceptance]
lower = ~ 0.5 +- 1e-2
max_scale_shift = <= 0.02
"""),
    Case("density-evens-scaling-rejected", 2, """
[experiment]
kind = density
set = evens
horizon = 10000
checkpoints = linear
taus = 2
[acceptance]
scaled.0.rejected = == 1
"""),
    _mca("mca-contraction", 3, "linear-contraction", "1.0", 65, accept="n_cells = == 1\ncells.0 = == 32"),
    _mca("mca-period-2", 3, "rotation", "0.1", 64, system="alpha = 1/2",
         accept="n_cells = == 2\ndensity_min = ~ 0.5 +- 1e-2\ndensity_max = ~ 0.5 +- 1e-2"),
    _mca("mca-period-3", 3, "rotation", "0.1", 64, system="alpha = 1/3",
         accept="n_cells = == 3\ndensity_min = ~ 0.3333333333333333 +- 1e-2\ndensity_max = ~ 0.3333333333333333 +- 1e-2"),
    _mca("mca-period-5", 3, "rotation", "0.1", 64, system="alpha = 1/5",
         accept="n_cells = == 5\ndensity_min = ~ 0.2 +- 1e-2\ndensity_max = ~ 0.2 +- 1e-2"),
    _mca("mca-rotation", 3, "rotation", "0", 64, extra="horizon = 1000000\nthetas = 1, 2.7",
         accept="n_cells = == 64\ndensity_min = ~ 0.015625 +- 1e-3\ndensity_max = ~ 0.015625 +- 1e-3\ntheta.score = >= 0.98"),
    _mca("mca-shift-eventually-periodic", 3, "full-shift-sequence", "110(01)", 8,
         accept="n_cells = == 2\ncells.0 = == 85\ncells.1 = == 170"),
    _mca("mca-logistic", 4, "logistic", "0.3", 64, extra="tol = 5e-3"),
    _mca("mca-focus", 4, "stable-focus-ode", "1.0, 0.0", 31, extra="delta_pos = 1e-3", accept="n_cells = == 1"),
    _mca("mca-shadowing", 4, "full-shift-sequence", "shadowing", 8, extra="delta_pos = 0.01\ntol = 0.04", accept="n_cells = == 2"),
    Case("genericity-rotation", 6, """
[system]
family = rotation
x0 = 0
[experiment]
kind = genericity
resolution = 64
n_samples = 100
horizon = 10000
seed = 0
[acceptance]
fraction = >= 0.95
"""),
    Case("genericity-logistic", 6, """
[system]
family = logistic
x0 = 0.3
[experiment]
kind = genericity
resolution = 64
n_samples = 100
horizon = 10000
seed = 0
[acceptance]
fraction = >= 0.95
"""),
    Case("chaos-logistic-pair", 7, """
[system]
family = logistic
x0 = 0.3
[experiment]
kind = chaos-scan
y = 0.300000001
horizon = 100000
[acceptance]
liminf_pair = < 1e-3
limsup_pair = > 0.5
li_yorke = == 1
"""),
    Case("chaos-rotation-random-pairs", 7, """
[system]
family = rotation
x0 = 0
[experiment]
kind = chaos-scan
y = random
n_samples = 1000
horizon = 10000
seed = 0
[acceptance]
li_yorke_count = == 0
"""),
    Case("chaos-shadowing-partner", 8, """
[system]
family = full-shift-sequence
x0 = shadowing
[experiment]
kind = chaos-scan
candidates = (01); (10)
horizon = 100000
resolution = 8
delta_pos = 0.01
[acceptance]
partner.found = == 1
bound_ok = == 1
"""),
    Case("sensitivity-two-cells", 9, f"""
[system]
family = rotation
alpha = 0
x0 = 0
[experiment]
kind = sensitivity
resolution = 64
cells = 3, 20
seed = 0
[acceptance]
epsilon_hat = ~ {abs(20 - 3) / 64 / 4!r} +- 1e-12
none_witnessed = == 1
"""),
    Case("sensitivity-logistic", 9, """
[system]
family = logistic
x0 = 0.3
[experiment]
kind = sensitivity
resolution = 64
horizon = 10000
closure_seeds = centers+vertices
seed = 0
[acceptance]
epsilon_hat = > 0.1
all_witnessed = == 1
"""),
    _qwap("qwap-rotation", "rotation", "0", 64, extra="epsilon = 0.05\ngap_bound = 21"),
    _qwap("qwap-period-2", "rotation", "0.001", 64, system="alpha = 1/2"),
    _qwap("qwap-period-3", "rotation", "0.001", 64, system="alpha = 1/3"),
    _qwap("qwap-contraction", "linear-contraction", "1.0", 64),
    _qwap("qwap-shift-transient", "full-shift-sequence", "1(0)", 8),
    _qwap("qwap-shift-eventually-periodic", "full-shift-sequence", "110(01)", 8),
    _qwap("qwap-logistic", "logistic", "0.3", 64),
    _qwap("qwap-shadowing", "full-shift-sequence", "shadowing", 8, extra="delta_pos = 0.01"),
    _qwap("qwap-focus", "stable-focus-ode", "1.0, 0.0", 31, extra="delta_pos = 1e-3"),
    _multi("multi-rotation-1-2", "rotation", "0", 64, "1, 2", extra="epsilon = 0.046875"),
    _multi("multi-rotation-1-sqrt2", "rotation", "0", 64, "1, sqrt2", extra="epsilon = 0.046875"),
    _multi("multi-contraction-1-2", "linear-contraction", "1.0", 65, "1, 2"),
    _multi("multi-contraction-1-sqrt2", "linear-contraction", "1.0", 65, "1, sqrt2"),
    _multi("multi-focus-1-2", "stable-focus-ode", "1.0, 0.0", 31, "1, 2", extra="delta_pos = 1e-3"),
    _multi("multi-focus-1-sqrt2", "stable-focus-ode", "1.0, 0.0", 31, "1, sqrt2", extra="delta_pos = 1e-3"),
    _multi("multi-logistic-1-2", "logistic", "0.3", 64, "1, 2"),
    _multi("multi-shift-1-2", "full-shift-sequence", "110(01)", 8, "1, 2"),
)


def select(kind=None, names=None):
    """Cases filtered by experiment kind (prefix match) or exact names."""
    out = []
    for c in CASES:
        if kind and not (c.kind == kind or c.kind.startswith(kind)):
            continue
        if names and c.name not in names:
            continue
        out.append(c)
    return out


def golden_dir() -> Path:
    return Path(str(resources.files("mincenter") / "golden"))


def compare(expected, actual, rtol=1e-9, atol=1e-12, path=""):
    """List of human-readable differences between two report trees."""
    diffs = []
    if isinstance(expected, dict) and isinstance(actual, dict):
        for k in sorted(set(expected) | set(actual)):
            p = f"{path}.{k}" if path else k
            if k not in actual:
                diffs.append(f"{p}: missing in report")
            elif k not in expected:
                diffs.append(f"{p}: not in golden file")
            else:
                diffs += compare(expected[k], actual[k], rtol, atol, p)
        return diffs
    if isinstance(expected, list) and isinstance(actual, list):
        if len(expected) != len(actual):
            return [f"{path}: length {len(expected)} -> {len(actual)}"]
        for i, (a, b) in enumerate(zip(expected, actual)):
            diffs += compare(a, b, rtol, atol, f"{path}[{i}]")
        return diffs
    num = (int, float)
    if isinstance(expected, num) and isinstance(actual, num) and not isinstance(expected, bool) and not isinstance(actual, bool):
        if not math.isclose(expected, actual, rel_tol=rtol, abs_tol=atol):
            return [f"{path}: {expected!r} -> {actual!r}"]
        return []
    if expected != actual:
        return [f"{path}: {expected!r} -> {actual!r}"]
    return []
