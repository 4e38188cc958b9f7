"""Estimating and checking the minimal center of attraction of a motion.

The minimal center of attraction of ``x`` is the set of points every
neighbourhood of which is visited by the motion with positive upper density.
At finite resolution the neighbourhoods are partition cells: a cell is
flagged when the upper density of its visit times reaches ``delta_pos``.

Cell densities are folded in one pass over the sampled states.  Upper
densities use :data:`MCA_POLICY`, which only looks at the last two geometric
checkpoints (``T/2`` and ``T``).  A longer tail would let a single early
visit reach ``10/N`` at the smallest checkpoint and flag transient cells.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import symbolic
from .density import CheckpointPolicy, DensityEstimate, TimeSet, density, positivity_threshold, tail_count
from .errors import BudgetExceededError, InvalidArgumentError, NotLagrangeStableError
from .partition import BoxPartition
from .systems import as_state, iter_orbit, propagator

#: Checkpoints used for per-cell upper densities and center checks.
MCA_POLICY = CheckpointPolicy("geometric", 20, 0.1)

#: Largest ``horizon * max(times)`` accepted by :func:`multi_attraction_density`.
DEFAULT_BUDGET = 10**8

_SLACK = 1e-12


@dataclass(frozen=True)
class CellSet:
    """A set of cells of one partition (a candidate center)."""

    partition: BoxPartition
    cells: np.ndarray

    def __post_init__(self):
        cells = np.unique(np.asarray(self.cells, dtype=np.int64))
        if cells.size and (cells[0] < 0 or cells[-1] >= self.partition.n_cells):
            raise InvalidArgumentError("cell index outside the partition")
        object.__setattr__(self, "cells", cells)

    def __len__(self):
        return len(self.cells)

    def fatten(self, k=1) -> CellSet:
        return CellSet(self.partition, self.partition.fatten(self.cells, k))

    def centers(self) -> np.ndarray:
        return self.partition.centers(self.cells)


@dataclass(frozen=True)
class McaEstimate:
    """Cells whose visit times have upper density at least ``delta_pos``.

    ``upper`` holds the upper density of every cell of the partition and
    ``final`` the plain running average at the horizon.
    """

    partition: BoxPartition
    cells: np.ndarray
    delta_pos: float
    horizon: int
    theta: float
    upper: np.ndarray = field(repr=False)
    final: np.ndarray = field(repr=False)
    policy: CheckpointPolicy = MCA_POLICY

    @property
    def cellset(self) -> CellSet:
        return CellSet(self.partition, self.cells)

    @property
    def densities(self) -> np.ndarray:
        return self.upper[self.cells]

    def __len__(self):
        return len(self.cells)

    def with_threshold(self, delta_pos) -> McaEstimate:
        """Re-threshold the stored table without re-running the orbit."""
        cells = np.flatnonzero(self.upper >= delta_pos)
        return McaEstimate(
            self.partition, cells, float(delta_pos), self.horizon, self.theta, self.upper, self.final, self.policy
        )

    def to_dict(self) -> dict:
        return {
            "partition": self.partition.as_dict(),
            "theta": self.theta,
            "delta_pos": self.delta_pos,
            "horizon": self.horizon,
            "checkpoint_policy": self.policy.as_dict(),
            "cells": self.cells.tolist(),
            "densities": self.densities.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def write_plot_csv(self, fh, all_cells=False):
        """Rows of cell centre coordinates (or cylinder word) and upper density."""
        cells = np.arange(self.partition.n_cells) if all_cells else self.cells
        w = csv.writer(fh, lineterminator="\n")
        if self.partition.kind == "cylinder":
            w.writerow(["cell", "word", "density"])
            for c, word in zip(cells, self.partition.words(cells)):
                w.writerow([int(c), "".join(map(str, word)), repr(float(self.upper[c]))])
            return
        centers = self.partition.centers(cells)
        d = centers.shape[1]
        w.writerow(["cell"] + [f"x_{i + 1}" for i in range(d)] + ["density"])
        for c, x in zip(cells, centers):
            w.writerow([int(c)] + [repr(float(v)) for v in x] + [repr(float(self.upper[c]))])


def _cells_of(candidate):
    if isinstance(candidate, (McaEstimate, CellSet)):
        return candidate.partition, np.asarray(candidate.cells, dtype=np.int64)
    raise InvalidArgumentError("candidate must be an McaEstimate or a CellSet")


# -- per-cell folding --------------------------------------------------------------


def checkpoint_samples(horizon, delta, policy) -> np.ndarray:
    """Checkpoint times snapped to sample counts in ``1..horizon``."""
    t = policy.times(horizon * delta)
    return np.clip(np.rint(t / delta).astype(np.int64), 1, horizon)


class _CellFold:
    """Streaming per-cell visit counts for ``members`` orbits at once.

    Samples ``0..n_j - 1`` count towards checkpoint ``j``; the running max of
    ``count / n_j`` over tail checkpoints is the upper density.
    """

    def __init__(self, n_cells, ckpts, tail, members=1):
        self.n_cells = n_cells
        self.ckpts = ckpts
        self.tail_start = len(ckpts) - tail
        self.counts = np.zeros((members, n_cells), dtype=np.int64)
        self.upper = np.zeros((members, n_cells))
        self.j = 0
        self._offsets = (np.arange(members, dtype=np.int64) * n_cells)[None, :]

    def _count(self, block):
        if len(block) == 0:
            return
        ok = block >= 0
        flat = (block + self._offsets)[ok]
        self.counts += np.bincount(flat, minlength=self.counts.size).reshape(self.counts.shape)

    def add(self, start, idx):
        idx = idx.reshape(len(idx), -1)
        pos = 0
        while self.j < len(self.ckpts):
            target = int(self.ckpts[self.j]) - start
            if target > len(idx):
                break
            self._count(idx[pos:target])
            pos = target
            if self.j >= self.tail_start:
                np.maximum(self.upper, self.counts / self.ckpts[self.j], out=self.upper)
            self.j += 1
        else:
            return
        self._count(idx[pos:])

    @property
    def final(self):
        return self.counts / self.ckpts[-1]


def _fold_orbit(orbit, partition, policy):
    if orbit.system.metric != partition.metric:
        raise InvalidArgumentError(f"{partition.kind} partition does not fit a {orbit.system.metric} system")
    idx = partition.locate(orbit.states)
    out = np.flatnonzero(idx < 0)
    if out.size:
        raise NotLagrangeStableError(
            f"orbit leaves the partition bounds at sample {int(out[0])}", index=int(out[0])
        )
    ckpts = checkpoint_samples(orbit.horizon, orbit.delta, policy)
    fold = _CellFold(partition.n_cells, ckpts, tail_count(len(ckpts), policy.tail_fraction))
    fold.add(0, idx)
    return fold.upper[0], fold.final[0]


# -- operations --------------------------------------------------------------------


def sojourn_fraction(orbit, region, T) -> float:
    """``(1/T) ∫_0^T 1_region(f(t, x)) dt`` by the rectangle rule."""
    if not T > 0:
        raise InvalidArgumentError("sojourn time must be positive")
    if T > orbit.t_max * (1 + _SLACK):
        raise InvalidArgumentError(f"T = {T} is past the orbit horizon {orbit.t_max}")
    mask = np.asarray(region(orbit.states), dtype=bool)
    ts = TimeSet("continuous", mask, orbit.delta, orbit.t_max)
    return min(1.0, ts.measure(T) / T)


def estimate_mca(orbit, partition: BoxPartition, delta_pos=None, checkpoints=MCA_POLICY) -> McaEstimate:
    """Flag the cells visited with upper density at least ``delta_pos``.

    Args:
        orbit: A sampled motion.
        partition: Cells playing the role of neighbourhoods.
        delta_pos: Positivity threshold, ``10 / horizon`` by default.
        checkpoints: Policy for the upper-density surrogate.

    Raises:
        NotLagrangeStableError: if a sample falls outside the partition.
    """
    if delta_pos is None:
        delta_pos = positivity_threshold(orbit.horizon)
    if not delta_pos > 0:
        raise InvalidArgumentError("delta_pos must be positive")
    upper, final = _fold_orbit(orbit, partition, checkpoints)
    cells = np.flatnonzero(upper >= delta_pos)
    return McaEstimate(partition, cells, float(delta_pos), orbit.horizon, orbit.delta, upper, final, checkpoints)


@dataclass(frozen=True)
class CenterReport:
    ok: bool
    estimate: DensityEstimate
    epsilon: float
    tol: float

    def __bool__(self):
        return bool(self.ok)


def _covered(orbit, partition, cells, epsilon):
    return partition.within(orbit.states, cells, epsilon * (1 + _SLACK))


def verify_center(orbit, candidate, epsilon=None, tol=1e-2, checkpoints=MCA_POLICY) -> CenterReport:
    """Check that the ``epsilon``-neighbourhood of ``candidate`` is visited
    with lower density at least ``1 - tol``."""
    partition, cells = _cells_of(candidate)
    if epsilon is None:
        epsilon = partition.cell_diameter
    if epsilon < partition.cell_diameter * (1 - 1e-9):
        raise InvalidArgumentError("epsilon must be at least one cell diameter")
    ts = TimeSet("continuous", _covered(orbit, partition, cells, epsilon), orbit.delta, orbit.t_max)
    est = density(ts, checkpoints)
    return CenterReport(est.lower >= 1 - tol, est, float(epsilon), float(tol))


@dataclass(frozen=True)
class MinimalityReport:
    ok: bool
    removable: int | None
    lowers: dict

    def __bool__(self):
        return bool(self.ok)


def verify_minimality(orbit, candidate, epsilon=None, tol=1e-2, checkpoints=MCA_POLICY) -> MinimalityReport:
    """Check that no single cell can be dropped from ``candidate``.

    For each cell ``c`` the orbit's density in the ``epsilon``-neighbourhood
    of ``candidate - {c}`` must fall below ``1 - tol``.  The default
    ``epsilon`` is a small fraction of a cell so a removed cell is not
    simply covered again by its neighbours.
    """
    partition, cells = _cells_of(candidate)
    if epsilon is None:
        epsilon = partition.cell_width / 32
    eps = epsilon * (1 + _SLACK)
    states = orbit.states
    loc = partition.locate(states)
    table = np.zeros(partition.n_cells + 1, dtype=bool)
    table[cells] = True
    in_set = table[loc]  # loc == -1 reads the spare False slot
    base = partition.within(states, cells, eps)
    # a cell c can only cover points whose own cell lies in fatten([c], k)
    k = partition.reach(eps)
    order = np.argsort(loc, kind="stable")
    sorted_loc = loc[order]
    stray = order[: np.searchsorted(sorted_loc, 0)]
    lowers = {}
    removable = None
    for c in cells.tolist():
        near = partition.fatten([c], k)
        lo = np.searchsorted(sorted_loc, near, "left")
        hi = np.searchsorted(sorted_loc, near, "right")
        parts = [order[a:b] for a, b in zip(lo, hi) if b > a] + [stray]
        affected = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
        affected = affected[~in_set[affected] | (loc[affected] == c)]
        mask = base.copy()
        others = cells[cells != c]
        mask[affected] = partition.within(states[affected], others, eps)
        est = density(TimeSet("continuous", mask, orbit.delta, orbit.t_max), checkpoints)
        lowers[c] = est.lower
        if removable is None and est.lower >= 1 - tol:
            removable = c
    return MinimalityReport(removable is None, removable, lowers)


def check_invariance(system, candidate, steps=50, epsilon=None) -> bool:
    """Whether the images of every cell representative under ``1..steps``
    sample steps stay within ``epsilon`` of the cell set (default: two cell
    widths)."""
    partition, cells = _cells_of(candidate)
    if not len(cells):
        raise InvalidArgumentError("candidate is empty")
    if epsilon is None:
        epsilon = 2 * partition.cell_width
    eps = epsilon * (1 + _SLACK)
    prop = propagator(system)
    if system.is_symbolic:
        pts = partition.representatives(cells)
        for _ in range(steps):
            pts = [prop(p) for p in pts]
            win = np.stack([p.window() for p in pts])
            if not np.all(partition.within(win, cells, eps)):
                return False
        return True
    x = partition.centers(cells)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            x = prop(x)
            if not np.all(np.isfinite(x)):
                return False
            if not np.all(partition.within(x, cells, eps)):
                return False
    return True


def agreement_score(partition, a, b, k=1) -> float:
    """``1 - |disagreement| / |a ∪ b|`` where a cell disagrees if it is in
    one set but not in the ``k``-cell fattening of the other."""
    a = np.unique(np.asarray(a, dtype=np.int64))
    b = np.unique(np.asarray(b, dtype=np.int64))
    union = np.union1d(a, b)
    if union.size == 0:
        return 1.0
    bad = np.union1d(np.setdiff1d(a, partition.fatten(b, k)), np.setdiff1d(b, partition.fatten(a, k)))
    return 1.0 - bad.size / union.size


@dataclass(frozen=True)
class ThetaReport:
    score: float
    estimate_a: McaEstimate
    estimate_b: McaEstimate
    resonance_warning: bool


def _same_point(system, a, b):
    if system.is_symbolic:
        return a.sequence is b.sequence and a.offset == b.offset
    return np.array_equal(np.asarray(a), np.asarray(b))


def theta_robustness(orbit_a, orbit_b, partition, delta_pos=None, checkpoints=MCA_POLICY, warn_below=0.98):
    """Compare estimates from the same motion sampled at two steps.

    A score under ``warn_below`` sets ``resonance_warning``: the sampling
    step is likely commensurate with a period of the motion.
    """
    if not _same_point(orbit_a.system, orbit_a.x0, orbit_b.x0):
        raise InvalidArgumentError("orbits start from different points")
    if abs(orbit_a.t_max - orbit_b.t_max) > max(orbit_a.delta, orbit_b.delta) * (1 + 1e-9):
        raise InvalidArgumentError(
            f"horizons differ in time: {orbit_a.t_max} vs {orbit_b.t_max}"
        )
    ea = estimate_mca(orbit_a, partition, delta_pos, checkpoints)
    eb = estimate_mca(orbit_b, partition, delta_pos, checkpoints)
    score = agreement_score(partition, ea.cells, eb.cells)
    return ThetaReport(score, ea, eb, score < warn_below)


@dataclass(frozen=True)
class GenericityReport:
    fraction: float
    scores: tuple
    n_samples: int
    seed: int
    escaped: int = 0


def uniform_sampler(partition):
    """Uniform initial states over the partition's bounds (random words for
    cylinders)."""
    if partition.kind == "cylinder":
        return lambda rng: symbolic.random_point(rng, partition.alphabet)
    lo, hi = np.array(partition.lower), np.array(partition.upper)
    return lambda rng: rng.uniform(lo, hi)


def _batch_upper(system, x0s, delta, horizon, partition, policy):
    """Upper-density tables for a batch of numeric starts; escaping members
    get ``None``."""
    ckpts = checkpoint_samples(horizon, delta, policy)
    fold = _CellFold(partition.n_cells, ckpts, tail_count(len(ckpts), policy.tail_fraction), len(x0s))
    escaped = np.zeros(len(x0s), dtype=bool)
    for start, block in iter_orbit(system, x0s, delta, horizon):
        idx = partition.locate(block)
        escaped |= np.any(idx < 0, axis=0)
        fold.add(start, idx)
    return [None if e else u for e, u in zip(escaped, fold.upper)]


def genericity_probe(
    system,
    reference,
    sampler=None,
    n_samples=100,
    horizon=10**4,
    delta=None,
    seed=0,
    threshold=0.95,
    delta_pos=None,
    checkpoints=MCA_POLICY,
    workers=1,
) -> GenericityReport:
    """Fraction of sampled initial states whose estimate agrees with
    ``reference`` (agreement score at least ``threshold``).

    This samples initial conditions; it is a stand-in for residuality and a
    fraction below one does not contradict genericity.  Orbits that leave
    the partition count as disagreeing.
    """
    partition, ref_cells = _cells_of(reference)
    sampler = sampler or uniform_sampler(partition)
    delta = system.delta if delta is None else delta
    delta_pos = positivity_threshold(horizon) if delta_pos is None else delta_pos
    rng = np.random.default_rng(seed)
    starts = [sampler(rng) for _ in range(n_samples)]

    if system.is_symbolic:
        def run(batch):
            out = []
            for p in batch:
                ckpts = checkpoint_samples(horizon, delta, checkpoints)
                fold = _CellFold(partition.n_cells, ckpts, tail_count(len(ckpts), checkpoints.tail_fraction))
                for start, block in iter_orbit(system, p, delta, horizon):
                    fold.add(start, partition.locate(block))
                out.append(fold.upper[0])
            return out
    else:
        starts = [as_state(system, s) for s in starts]

        def run(batch):
            return _batch_upper(system, np.stack(batch), delta, horizon, partition, checkpoints)

    workers = max(1, min(int(workers), n_samples))
    size = math.ceil(n_samples / workers)
    batches = [starts[i : i + size] for i in range(0, n_samples, size)]
    if workers == 1:
        tables = [run(b) for b in batches]
    else:
        with ThreadPoolExecutor(workers) as pool:
            tables = list(pool.map(run, batches))
    uppers = [u for t in tables for u in t]
    scores = tuple(
        0.0 if u is None else agreement_score(partition, ref_cells, np.flatnonzero(u >= delta_pos))
        for u in uppers
    )
    escaped = sum(u is None for u in uppers)
    fraction = float(np.mean([s >= threshold for s in scores]))
    return GenericityReport(fraction, scores, n_samples, seed, escaped)


def multi_attraction_density(
    system,
    x0,
    candidate,
    times,
    epsilon=None,
    horizon=10**5,
    delta=None,
    checkpoints=MCA_POLICY,
    budget=DEFAULT_BUDGET,
) -> DensityEstimate:
    """Density of ``{t : f(t_i t, x0) is within epsilon of the candidate for all i}``.

    Factor ``i`` is sampled on its own grid with step ``t_i * delta``; the
    intersection is evaluated on the common parameter grid ``t = k * delta``.
    The default ``epsilon`` is two cell widths.

    Raises:
        BudgetExceededError: if ``horizon * max(times)`` exceeds ``budget``.
        UnsupportedOperationError: if a factor step is not an integer for a
            map without a closed-form flow.
    """
    times = [float(t) for t in times]
    if not times or any(not (t > 0 and math.isfinite(t)) for t in times):
        raise InvalidArgumentError("times must be a non-empty list of positive numbers")
    if horizon * max(times) > budget:
        raise BudgetExceededError(
            f"horizon {horizon} times max factor {max(times):g} exceeds budget {budget:g}"
        )
    partition, cells = _cells_of(candidate)
    if epsilon is None:
        epsilon = 2 * partition.cell_width
    delta = system.delta if delta is None else float(delta)
    mask = np.ones(horizon + 1, dtype=bool)
    eps = epsilon * (1 + _SLACK)
    for t in times:
        for start, block in iter_orbit(system, x0, t * delta, horizon):
            inside = partition.within(block, cells, eps)
            mask[start : start + len(block)] &= inside
    return density(TimeSet("continuous", mask, delta, horizon * delta), checkpoints)
