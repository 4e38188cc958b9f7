"""Time sets along an orbit and finite-horizon estimates of their densities.

A :class:`TimeSet` lives on a sampling grid.  In *continuous* mode slot ``k``
stands for the interval ``[k*delta, (k+1)*delta)`` (rectangle rule for the
integral of an indicator); in *discrete* mode slot ``k`` is the integer ``k``.

The limits defining lower and upper density cannot be computed, so a
:class:`DensityEstimate` records running averages ``|S ∩ [0, T_j]| / T_j`` at
checkpoints ``T_1 < ... < T_m`` and reports their min and max over a tail
window of checkpoints.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, UnsupportedOperationError

MODES = ("continuous", "discrete")


@dataclass(frozen=True)
class TimeSet:
    """Subset of a sampling grid over ``[0, t_max]``."""

    mode: str
    mask: np.ndarray = field(repr=False)
    delta: float = 1.0
    t_max: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgumentError(f"unknown time-set mode {self.mode!r}")
        if self.mode == "discrete" and self.delta != 1.0:
            raise InvalidArgumentError("discrete time sets have unit spacing")
        if not self.delta > 0:
            raise InvalidArgumentError("time set spacing must be positive")
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 1:
            raise InvalidArgumentError("time-set mask must be one-dimensional")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "_counts", np.concatenate([[0], np.cumsum(mask)]))

    # construction

    @classmethod
    def from_indices(cls, indices, n_slots, mode="discrete", delta=1.0, t_max=None):
        mask = np.zeros(n_slots, dtype=bool)
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n_slots):
            raise InvalidArgumentError("time-set index outside the grid")
        mask[idx] = True
        if t_max is None:
            t_max = (n_slots - 1) * delta
        return cls(mode, mask, float(delta), float(t_max))

    @classmethod
    def from_time_predicate(cls, pred, delta, t_max):
        """Continuous set of slots whose left endpoint satisfies ``pred``."""
        n = int(math.floor(t_max / delta + 1e-9)) + 1
        t = np.arange(n) * delta
        return cls("continuous", np.asarray(pred(t), dtype=bool), float(delta), float(t_max))

    @classmethod
    def evens(cls, horizon):
        """The discrete set ``{0, 2, 4, ...}`` up to ``horizon``."""
        mask = np.zeros(horizon + 1, dtype=bool)
        mask[::2] = True
        return cls("discrete", mask, 1.0, float(horizon))

    # views

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def n_slots(self) -> int:
        return len(self.mask)

    def __len__(self):
        return int(self._counts[-1])

    def _same_grid(self, other):
        if (self.mode, self.n_slots, self.delta, self.t_max) != (
            other.mode,
            other.n_slots,
            other.delta,
            other.t_max,
        ):
            raise InvalidArgumentError("time sets live on different grids")

    def __or__(self, other):
        self._same_grid(other)
        return TimeSet(self.mode, self.mask | other.mask, self.delta, self.t_max)

    def __and__(self, other):
        self._same_grid(other)
        return TimeSet(self.mode, self.mask & other.mask, self.delta, self.t_max)

    def issubset(self, other) -> bool:
        self._same_grid(other)
        return not np.any(self.mask & ~other.mask)

    def __eq__(self, other):
        if not isinstance(other, TimeSet):
            return NotImplemented
        return (
            (self.mode, self.delta, self.t_max) == (other.mode, other.delta, other.t_max)
            and np.array_equal(self.mask, other.mask)
        )

    __hash__ = None

    def measure(self, T) -> float:
        """``λ(S ∩ [0, T))`` (counting measure in discrete mode)."""
        if self.mode == "discrete":
            k = min(int(math.ceil(T - 1e-12)), self.n_slots)
            return float(self._counts[max(k, 0)])
        full = int(math.floor(T / self.delta + 1e-9))
        full = min(max(full, 0), self.n_slots)
        m = self._counts[full] * self.delta
        if full < self.n_slots and self.mask[full]:
            m += max(0.0, T - full * self.delta)
        return float(m)

    def runs(self):
        """Maximal runs of consecutive members as ``(start, end)`` slot pairs,
        end exclusive."""
        padded = np.concatenate([[False], self.mask, [False]])
        edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
        return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


@dataclass(frozen=True)
class CheckpointPolicy:
    """How the horizon is probed when approximating lim sup / lim inf.

    ``geometric`` uses ``T_j = t_max / 2**(m - j)``; ``linear`` uses
    ``T_j = j * t_max / m``.  Extremes are taken over the last
    ``ceil(tail_fraction * m)`` checkpoints.
    """

    kind: str = "geometric"
    m: int = 20
    tail_fraction: float = 0.5

    def __post_init__(self):
        if self.kind not in ("geometric", "linear"):
            raise InvalidArgumentError(f"unknown checkpoint policy {self.kind!r}")
        if self.m < 1:
            raise InvalidArgumentError("need at least one checkpoint")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise InvalidArgumentError("tail_fraction must lie in (0, 1]")

    def times(self, t_max) -> np.ndarray:
        j = np.arange(1, self.m + 1)
        if self.kind == "geometric":
            return t_max / 2.0 ** (self.m - j)
        return j * (t_max / self.m)

    def as_dict(self):
        return {"kind": self.kind, "m": self.m, "tail_fraction": self.tail_fraction}


#: Default probing used by :func:`upper_density` and :func:`lower_density`.
DEFAULT_POLICY = CheckpointPolicy("geometric", 20, 0.5)

#: Used instead for discrete sets, whose counting measure is too coarse at
#: the small times a geometric ladder reaches.
DISCRETE_POLICY = CheckpointPolicy("linear", 20, 0.5)


def tail_count(m, tail_fraction) -> int:
    return max(1, math.ceil(tail_fraction * m - 1e-12))


@dataclass(frozen=True)
class DensityEstimate:
    lower: float
    upper: float
    checkpoints: tuple
    values: tuple

    def to_json(self) -> str:
        return json.dumps(
            {
                "lower": self.lower,
                "upper": self.upper,
                "checkpoints": list(self.checkpoints),
                "values": list(self.values),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["lower"], d["upper"], tuple(d["checkpoints"]), tuple(d["values"]))


def _checkpoint_times(ts_t_max, checkpoints):
    if isinstance(checkpoints, CheckpointPolicy):
        return checkpoints.times(ts_t_max), checkpoints.tail_fraction
    return np.asarray(checkpoints, dtype=np.float64), None


def density(ts: TimeSet, checkpoints, tail_fraction=None) -> DensityEstimate:
    """Running averages of ``ts`` at ``checkpoints`` and their tail extremes.

    ``checkpoints`` is either an increasing list of times in ``(0, t_max]`` or
    a :class:`CheckpointPolicy`.
    """
    times, policy_tail = _checkpoint_times(ts.t_max, checkpoints)
    if tail_fraction is None:
        tail_fraction = 0.5 if policy_tail is None else policy_tail
    if times.size == 0:
        raise InvalidArgumentError("empty checkpoint list")
    if not 0.0 < tail_fraction <= 1.0:
        raise InvalidArgumentError("tail_fraction must lie in (0, 1]")
    if np.any(np.diff(times) <= 0) or times[0] <= 0 or times[-1] > ts.t_max * (1 + 1e-12):
        raise InvalidArgumentError("checkpoints must increase within (0, t_max]")
    values = np.array([ts.measure(T) / T for T in times])
    values = np.clip(values, 0.0, 1.0)
    tail = values[-tail_count(len(times), tail_fraction):]
    return DensityEstimate(float(tail.min()), float(tail.max()), tuple(times.tolist()), tuple(values.tolist()))


def _default_policy(ts):
    return DISCRETE_POLICY if ts.mode == "discrete" else DEFAULT_POLICY


def upper_density(ts: TimeSet, checkpoints=None) -> float:
    return density(ts, checkpoints or _default_policy(ts)).upper


def lower_density(ts: TimeSet, checkpoints=None) -> float:
    return density(ts, checkpoints or _default_policy(ts)).lower


def positivity_threshold(n_samples) -> float:
    """Default cut-off separating recurrent visits from incidental ones."""
    return 10.0 / n_samples


def hitting_times(orbit, region, mode="continuous") -> TimeSet:
    """Sample indices whose state satisfies ``region``.

    ``region`` takes an array of states (shape ``(n, ...)``) and returns a
    boolean array.  Use :func:`ball` for closed metric balls.
    """
    mask = np.asarray(region(orbit.states), dtype=bool)
    if mask.shape != (orbit.horizon + 1,):
        raise InvalidArgumentError("region predicate must return one flag per sample")
    if mode == "discrete":
        if orbit.delta != 1.0:
            raise InvalidArgumentError("discrete time sets need a unit sampling step")
        return TimeSet("discrete", mask, 1.0, float(orbit.horizon))
    return TimeSet("continuous", mask, orbit.delta, orbit.t_max)


def ball(system, center, radius):
    """Closed ball predicate ``d(x, center) <= radius`` (boundary counts as inside)."""
    from .systems import metric_distance, state_array

    c = state_array(system, center)
    return lambda states: metric_distance(system.metric, states, c) <= radius


def scale(ts: TimeSet, tau) -> TimeSet:
    """The set ``tau * S``: each slot ``[t, t + delta)`` becomes
    ``[tau t, tau t + tau delta)``."""
    if not (isinstance(tau, (int, float, np.floating)) and tau > 0 and math.isfinite(tau)):
        raise InvalidArgumentError("scale factor must be a positive finite number")
    if ts.mode == "discrete":
        raise UnsupportedOperationError(
            "time scaling does not preserve density in discrete time: the evens "
            "{0, 2, 4, ...} have density 1/2, yet halving them gives all of Z+ "
            "with density 1"
        )
    if tau == 1:
        return ts
    return TimeSet("continuous", ts.mask, ts.delta * tau, ts.t_max * tau)


# -- export ----------------------------------------------------------------------


def write_rle_csv(ts: TimeSet, fh):
    """Write runs as ``start,end`` rows in time units, end exclusive.  The
    last run may end past ``t_max`` by less than one slot."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["start", "end"])
    for a, b in ts.runs():
        if ts.mode == "discrete":
            w.writerow([a, b])
        else:
            w.writerow([repr(a * ts.delta), repr(b * ts.delta)])


def read_rle_csv(fh, mode, delta, t_max) -> TimeSet:
    rows = list(csv.reader(fh))[1:]
    n = int(round(t_max / delta)) + 1
    mask = np.zeros(n, dtype=bool)
    for a, b in rows:
        mask[int(round(float(a) / delta)) : int(round(float(b) / delta))] = True
    return TimeSet(mode, mask, float(delta), float(t_max))
