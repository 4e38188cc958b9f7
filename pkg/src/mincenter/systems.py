"""Semiflows, their metrics, and sampled orbits.

A :class:`SystemSpec` describes a semiflow ``f(t, x)`` of one of three kinds:

* ``discrete-map``: ``f(n, x)`` is the n-th iterate of a map.  Families with
  an exact continuous-time extension (rotation, linear contraction) also
  accept non-integer time steps.
* ``ode-semiflow``: the flow of an autonomous vector field, advanced with
  fixed-step classical Runge-Kutta.
* ``symbolic-shift``: the one-sided shift on sequences over a finite alphabet.

Numeric states are float arrays of shape ``(dimension,)``; symbolic states are
:class:`~mincenter.symbolic.SymbolicPoint` objects.  Inside an
:class:`OrbitSample` symbolic states are stored as their first ``DEPTH``
symbols, which is all the metric can see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import symbolic
from .errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    NumericOverflowError,
    OrbitExhaustedError,
    UnsupportedOperationError,
)
from .symbolic import DEPTH, SymbolicPoint

KINDS = ("discrete-map", "ode-semiflow", "symbolic-shift")
METRICS = ("euclidean", "circle", "symbolic")
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

_CHUNK = 1 << 15


@dataclass(frozen=True)
class SystemSpec:
    """An immutable description of a simulatable semiflow.

    ``rule`` is the map (discrete kind) or the vector field (ODE kind); both
    act on arrays of shape ``(..., dimension)``.  ``flow`` optionally gives
    ``f(t, x)`` in closed form for all real ``t >= 0`` so that maps can be
    sampled on non-integer grids.
    """

    kind: str
    family: str
    dimension: int = 1
    params: dict = field(default_factory=dict)
    metric: str = "euclidean"
    delta: float = 1.0
    bounds: tuple | None = None
    alphabet: int = 2
    rule: Callable | None = field(default=None, compare=False, repr=False)
    flow: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown system kind {self.kind!r}")
        if self.metric not in METRICS:
            raise InvalidArgumentError(f"unknown metric {self.metric!r}")
        if int(self.dimension) < 1:
            raise InvalidArgumentError("dimension must be a positive integer")
        _check_delta(self, self.delta)
        if self.kind == "symbolic-shift":
            if self.metric != "symbolic":
                raise InvalidArgumentError("shift spaces use the symbolic metric")
        elif self.rule is None:
            raise InvalidArgumentError(f"{self.kind} system needs a rule")

    @property
    def is_symbolic(self) -> bool:
        return self.kind == "symbolic-shift"

    @property
    def continuous_time(self) -> bool:
        """Whether arbitrary positive time steps are supported."""
        return self.kind == "ode-semiflow" or self.flow is not None

    def with_delta(self, delta) -> SystemSpec:
        from dataclasses import replace

        return replace(self, delta=float(delta))

    def describe(self) -> str:
        lines = [
            f"family:    {self.family}",
            f"kind:      {self.kind}",
            f"dimension: {self.dimension}",
            f"metric:    {self.metric}",
            f"delta:     {self.delta:g}",
        ]
        if self.params:
            lines.append("params:    " + ", ".join(f"{k}={v:g}" for k, v in self.params.items()))
        if self.bounds is not None:
            lines.append(f"bounds:    {self.bounds}")
        if self.continuous_time:
            lines.append("time:      continuous (any positive step)")
        return "\n".join(lines)


def _check_delta(system, delta):
    if not (isinstance(delta, (int, float, np.floating, np.integer)) and math.isfinite(delta)):
        raise InvalidArgumentError(f"time step must be a finite number, got {delta!r}")
    if delta <= 0:
        raise InvalidArgumentError(f"time step must be positive, got {delta}")
    if not system.continuous_time and not float(delta).is_integer():
        raise UnsupportedOperationError(
            f"{system.family} is a discrete-time system; time step {delta} is not an integer"
        )


# -- built-in families ---------------------------------------------------------


def rotation(alpha=GOLDEN) -> SystemSpec:
    """Circle rotation ``x -> x + alpha (mod 1)``; flows as ``x + alpha t``."""
    a = float(alpha)
    return SystemSpec(
        "discrete-map",
        "rotation",
        1,
        {"alpha": a},
        "circle",
        bounds=((0.0, 1.0),),
        rule=lambda x: np.mod(x + a, 1.0),
        flow=lambda t, x: np.mod(x + a * t, 1.0),
    )


def logistic(r=4.0) -> SystemSpec:
    r = float(r)
    return SystemSpec(
        "discrete-map",
        "logistic",
        1,
        {"r": r},
        "euclidean",
        bounds=((0.0, 1.0),),
        rule=lambda x: r * x * (1.0 - x),
    )


def tent(mu=2.0) -> SystemSpec:
    mu = float(mu)
    return SystemSpec(
        "discrete-map",
        "tent",
        1,
        {"mu": mu},
        "euclidean",
        bounds=((0.0, 1.0),),
        rule=lambda x: mu * np.minimum(x, 1.0 - x),
    )


def linear_contraction(factor=0.5, dimension=1) -> SystemSpec:
    """``x -> factor * x``, which flows as ``factor**t * x``."""
    lam = float(factor)
    if not 0.0 < lam < 1.0:
        raise InvalidArgumentError("contraction factor must lie in (0, 1)")
    d = int(dimension)
    return SystemSpec(
        "discrete-map",
        "linear-contraction",
        d,
        {"factor": lam},
        "euclidean",
        bounds=((-1.0, 1.0),) * d,
        rule=lambda x: lam * x,
        flow=lambda t, x: lam**t * x,
    )


def stable_focus_ode(a=0.5, omega=2.0, delta=0.05) -> SystemSpec:
    """Planar linear ODE with a stable focus at the origin.

    ``x' = -a x - omega y``, ``y' = omega x - a y``.
    """
    a, w = float(a), float(omega)
    if a <= 0:
        raise InvalidArgumentError("stable focus needs a > 0")

    def field_(z):
        x, y = z[..., 0], z[..., 1]
        return np.stack([-a * x - w * y, w * x - a * y], axis=-1)

    return SystemSpec(
        "ode-semiflow",
        "stable-focus-ode",
        2,
        {"a": a, "omega": w},
        "euclidean",
        delta=float(delta),
        bounds=((-1.5, 1.5), (-1.5, 1.5)),
        rule=field_,
    )


def full_shift(alphabet=2) -> SystemSpec:
    k = int(alphabet)
    if k < 2:
        raise InvalidArgumentError("alphabet needs at least two symbols")
    return SystemSpec(
        "symbolic-shift",
        "full-shift-sequence",
        1,
        {"alphabet": k},
        "symbolic",
        alphabet=k,
    )


def custom_map(fn, dimension=1, metric="euclidean", flow=None, bounds=None) -> SystemSpec:
    """Wrap a user map.  Joint continuity of ``fn`` is assumed, not checked."""
    return SystemSpec("discrete-map", "custom", dimension, {}, metric, bounds=bounds, rule=fn, flow=flow)


def custom_ode(fn, dimension=1, delta=0.01, bounds=None) -> SystemSpec:
    return SystemSpec("ode-semiflow", "custom", dimension, {}, "euclidean", delta, bounds, rule=fn)


FAMILIES = {
    "rotation": rotation,
    "logistic": logistic,
    "tent": tent,
    "linear-contraction": linear_contraction,
    "stable-focus-ode": stable_focus_ode,
    "full-shift-sequence": full_shift,
}


def make_system(family, **params) -> SystemSpec:
    try:
        factory = FAMILIES[family]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown family {family!r}; choose from {', '.join(FAMILIES)}"
        ) from None
    return factory(**params)


# -- stepping --------------------------------------------------------------------


def _rk4(field_, x, h):
    k1 = field_(x)
    k2 = field_(x + 0.5 * h * k1)
    k3 = field_(x + 0.5 * h * k2)
    k4 = field_(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagator(system: SystemSpec, delta=None) -> Callable:
    """Return a function advancing states by time ``delta`` (default: the
    system's own step)."""
    delta = system.delta if delta is None else delta
    _check_delta(system, delta)
    if system.is_symbolic:
        n = int(delta)
        return lambda p: p.shift(n)
    if system.kind == "ode-semiflow":
        fld, h = system.rule, float(delta)
        return lambda x: _rk4(fld, x, h)
    if float(delta).is_integer():
        n, fn = int(delta), system.rule
        if n == 1:
            return fn

        def iterate(x):
            for _ in range(n):
                x = fn(x)
            return x

        return iterate
    flow, t = system.flow, float(delta)
    return lambda x: flow(t, x)


def as_state(system: SystemSpec, state):
    """Coerce a user-supplied state to the system's representation."""
    if system.is_symbolic:
        if isinstance(state, str):
            state = symbolic.parse_point(state)
        if not isinstance(state, SymbolicPoint):
            raise InvalidArgumentError("shift states are SymbolicPoint objects")
        return state
    x = np.array(state, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.shape[-1] != system.dimension:
        raise DimensionMismatchError(
            f"state has {x.shape[-1]} components, system dimension is {system.dimension}"
        )
    return x


def step(system: SystemSpec, state):
    """Advance ``state`` by one sample step ``f(delta, .)``."""
    state = as_state(system, state)
    nxt = propagator(system)(state)
    if not system.is_symbolic and not np.all(np.isfinite(nxt)):
        raise NumericOverflowError(f"non-finite state after one step from {state}", index=1)
    return nxt


def advance(system: SystemSpec, state, steps=1, delta=None):
    """Apply ``steps`` consecutive sample steps."""
    state = as_state(system, state)
    prop = propagator(system, delta)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(int(steps)):
            state = prop(state)
            if not system.is_symbolic and not np.all(np.isfinite(state)):
                raise NumericOverflowError("non-finite state", index=k + 1)
    return state


def state_array(system: SystemSpec, state) -> np.ndarray:
    """Array form of a state as seen by the metric."""
    if system.is_symbolic:
        if isinstance(state, SymbolicPoint):
            return state.window()
        return np.asarray(state, dtype=np.uint8)
    return as_state(system, state)


# -- metrics ---------------------------------------------------------------------


def metric_distance(metric: str, a, b) -> np.ndarray:
    """Vectorised distance between arrays of states (broadcast on leading axes)."""
    if metric == "symbolic":
        a = np.asarray(a)
        b = np.asarray(b)
        neq = a != b
        first = np.argmax(neq, axis=-1)
        return np.where(neq.any(axis=-1), np.ldexp(1.0, -first), 0.0)
    diff = np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))
    if metric == "circle":
        diff = np.mod(diff, 1.0)
        diff = np.minimum(diff, 1.0 - diff)
    if diff.shape[-1] == 1:
        return diff[..., 0]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def distance(system: SystemSpec, a, b) -> float:
    """Distance between two states of ``system``."""
    xa, xb = state_array(system, a), state_array(system, b)
    if xa.shape[-1] != xb.shape[-1]:
        raise DimensionMismatchError(f"states of length {xa.shape[-1]} and {xb.shape[-1]}")
    d = metric_distance(system.metric, xa, xb)
    return float(d) if np.ndim(d) == 0 else d


def space_diameter(system: SystemSpec) -> float:
    if system.metric == "symbolic":
        return 1.0
    if system.metric == "circle":
        return 0.5 * math.sqrt(system.dimension)
    if system.bounds is None:
        return math.inf
    return math.sqrt(sum((hi - lo) ** 2 for lo, hi in system.bounds))


# -- orbits ----------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSample:
    """States ``f(k * delta, x0)`` for ``k = 0..horizon``."""

    system: SystemSpec
    x0: object
    delta: float
    horizon: int
    states: np.ndarray = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.horizon + 1) * self.delta

    @property
    def t_max(self) -> float:
        return self.horizon * self.delta

    def point(self, k):
        """The k-th state in the system's own representation."""
        if self.system.is_symbolic:
            return SymbolicPoint(self.x0.sequence, self.x0.offset + k * int(self.delta))
        return self.states[k]

    def distances_to(self, state) -> np.ndarray:
        ref = state_array(self.system, state)
        return metric_distance(self.system.metric, self.states, ref)


def _validate_sampling(system, delta, horizon):
    delta = system.delta if delta is None else delta
    _check_delta(system, delta)
    if int(horizon) != horizon or horizon < 1:
        raise InvalidArgumentError(f"horizon must be a positive integer, got {horizon}")
    return float(delta), int(horizon)


def iter_orbit(system, x0, delta=None, horizon=1, chunk=_CHUNK) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, states)`` blocks covering sample indices ``0..horizon``.

    Only one block is alive at a time, so long orbits can be folded without
    being stored.  ``x0`` may also be a batch of numeric states with shape
    ``(M, dimension)``; blocks then have shape ``(n, M, dimension)``.
    """
    delta, horizon = _validate_sampling(system, delta, horizon)
    total = horizon + 1
    if system.is_symbolic:
        p = as_state(system, x0)
        n = int(delta)
        for start in range(0, total, chunk):
            stop = min(total, start + chunk)
            lo = p.offset + start * n
            hi = p.offset + (stop - 1) * n + DEPTH
            if not p.sequence.has(p.offset + (stop - 1) * n + 1):
                avail = 0
                while p.sequence.has(p.offset + avail * n + 1):
                    avail += 1
                raise OrbitExhaustedError(
                    f"{p.sequence.label} exhausted at sample {avail}", index=avail
                )
            syms = p.sequence.symbols(lo, hi)
            win = np.lib.stride_tricks.sliding_window_view(syms, DEPTH)[::n]
            yield start, np.ascontiguousarray(win[: stop - start])
        return
    x = as_state(system, x0)
    prop = propagator(system, delta)
    with np.errstate(over="ignore", invalid="ignore"):
        for start in range(0, total, chunk):
            size = min(chunk, total - start)
            buf = np.empty((size,) + x.shape)
            i0 = 0
            if start == 0:
                buf[0] = x
                i0 = 1
            for i in range(i0, size):
                x = prop(x)
                buf[i] = x
            bad = ~np.isfinite(buf.reshape(size, -1)).all(axis=1)
            if bad.any():
                idx = start + int(np.argmax(bad))
                raise NumericOverflowError(f"non-finite state at sample {idx}", index=idx)
            yield start, buf


def sample_orbit(system: SystemSpec, x0, delta=None, horizon=1) -> OrbitSample:
    """Sample ``f(k * delta, x0)`` for ``k = 0..horizon``."""
    delta, horizon = _validate_sampling(system, delta, horizon)
    x0 = as_state(system, x0)
    blocks = [b for _, b in iter_orbit(system, x0, delta, horizon)]
    states = blocks[0] if len(blocks) == 1 else np.concatenate(blocks)
    return OrbitSample(system, x0, delta, horizon, states)
