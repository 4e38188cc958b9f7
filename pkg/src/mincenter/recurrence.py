"""Pointwise recurrence tests on a sampled orbit.

A *return* is a sample ``k >= 1`` whose state lies in the closed ball
``B_eps(x0)``.  Sample 0 itself is never counted as a return.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .mca import estimate_mca
from .systems import sample_orbit


def return_indices(orbit, epsilon) -> np.ndarray:
    """Sample indices ``k >= 1`` with ``d(f(k delta, x0), x0) <= epsilon``."""
    d = orbit.distances_to(orbit.point(0) if orbit.system.is_symbolic else orbit.states[0])
    return np.flatnonzero(d[1:] <= epsilon) + 1


def separated_returns(returns, gap) -> np.ndarray:
    """Greedy selection of returns at least ``gap`` samples apart, counting
    the gap from time 0."""
    kept = []
    last = 0
    for r in returns.tolist():
        if r - last >= gap:
            kept.append(r)
            last = r
    return np.array(kept, dtype=np.int64)


@dataclass(frozen=True)
class QwapResult:
    ok: bool
    N: int | None
    n: tuple
    counts: tuple
    returns: tuple = field(repr=False)

    def __bool__(self):
        return bool(self.ok)

    def to_json(self) -> str:
        return json.dumps(
            {"ok": self.ok, "N": self.N, "n": list(self.n), "counts": list(self.counts), "returns": list(self.returns)},
            sort_keys=True,
        )


def qwap_test(orbit, epsilon, N_max=1000) -> QwapResult:
    """Finite-horizon test for quasi-weak almost periodicity.

    Returns are thinned greedily so that consecutive kept times are at least
    one time unit apart (``ceil(1 / delta)`` samples).  For ``N = 1, 2, ...``
    the test sets ``n_3 = floor(H / N)`` (``H`` the horizon time, ``n_3 >= 4``),
    ``n_1 = n_3 // 4``, ``n_2 = n_3 // 2`` and asks for at least ``n_j`` kept
    returns before time ``n_j N`` for each ``j``, with the return rate at
    ``n_3`` no less than half the rate at ``n_1``.  The first such ``N`` is
    the witness.
    """
    gap = max(1, math.ceil(1.0 / orbit.delta - 1e-9))
    kept = separated_returns(return_indices(orbit, epsilon), gap)
    times = kept * orbit.delta
    H = orbit.t_max

    def count(T):
        return int(np.searchsorted(times, T - 1e-9 * orbit.delta, side="left"))

    for N in range(1, int(N_max) + 1):
        n3 = int(math.floor(H / N + 1e-9))
        if n3 < 4:
            break
        ns = (n3 // 4, n3 // 2, n3)
        counts = tuple(count(n * N) for n in ns)
        if all(c >= n for c, n in zip(counts, ns)) and counts[2] / ns[2] >= 0.5 * counts[0] / ns[0]:
            return QwapResult(True, N, ns, counts, tuple(times.tolist()))
    return QwapResult(False, None, (), (), tuple(times.tolist()))


def poisson_stable_test(orbit, epsilon, n_returns=3) -> bool:
    """At least ``n_returns`` returns, the last one in the final quarter of
    the horizon."""
    r = return_indices(orbit, epsilon)
    return len(r) >= n_returns and r[-1] >= 0.75 * orbit.horizon


@dataclass(frozen=True)
class BirkhoffResult:
    ok: bool
    max_gap: float

    def __bool__(self):
        return bool(self.ok)


def birkhoff_recurrent_test(orbit, epsilon, gap_bound=None) -> BirkhoffResult:
    """Syndetic returns: the longest stretch without a return (including the
    stretch from the last return to the horizon) is at most ``gap_bound``
    time units (default: a tenth of the horizon)."""
    if gap_bound is None:
        gap_bound = orbit.t_max / 10
    r = return_indices(orbit, epsilon)
    marks = np.concatenate([[0], r, [orbit.horizon]])
    gaps = np.diff(marks)
    max_gap = float(gaps.max() * orbit.delta)
    return BirkhoffResult(max_gap <= gap_bound, max_gap)


@dataclass(frozen=True)
class CrosscheckVerdict:
    """``ok`` when ``x0 in C_x`` (its cell is flagged) and the recurrence
    test agree."""

    ok: bool
    qwap: QwapResult
    in_estimate: bool
    cell: int
    epsilon: float

    def __bool__(self):
        return bool(self.ok)

    def describe(self) -> str:
        q = f"qwap={'yes' if self.qwap.ok else 'no'}"
        if self.qwap.ok:
            q += f" (N={self.qwap.N}, n={list(self.qwap.n)}, counts={list(self.qwap.counts)})"
        c = f"cell {self.cell} {'in' if self.in_estimate else 'not in'} estimate"
        return f"{'OK' if self.ok else 'MISMATCH'}: {q}; {c}; eps={self.epsilon:g}"


def prop42_crosscheck(
    system, x0, partition, horizon=10**5, delta=None, delta_pos=None, N_max=1000, epsilon=None, checkpoints=None
) -> CrosscheckVerdict:
    """Compare the recurrence test at ``epsilon`` (default two cell widths)
    with membership of ``x0``'s cell in the estimated center."""
    orbit = sample_orbit(system, x0, delta, horizon)
    kwargs = {} if checkpoints is None else {"checkpoints": checkpoints}
    est = estimate_mca(orbit, partition, delta_pos, **kwargs)
    if epsilon is None:
        epsilon = 2 * partition.cell_width
    q = qwap_test(orbit, epsilon, N_max)
    cell = int(partition.locate(orbit.states[:1])[0])
    inside = bool(np.isin(cell, est.cells))
    return CrosscheckVerdict(q.ok == inside, q, inside, cell, float(epsilon))
