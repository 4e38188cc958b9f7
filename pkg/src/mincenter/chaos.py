"""Li-Yorke pairs, chaotic motions, sensitivity constants and diameters.

Limits in time are replaced by extremes over the tail half of the sampled
horizon: with ``m`` evenly spaced checkpoints ``c_j = j N / m`` the liminf
and limsup surrogates are the min and max over samples ``c_{m/2} .. N``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import symbolic
from .errors import DegenerateEstimateError, InvalidArgumentError, NotLagrangeStableError, NumericOverflowError
from .mca import CellSet, McaEstimate, _cells_of
from .systems import as_state, iter_orbit, metric_distance, state_array

DEFAULT_ZERO_TOL = 1e-3


@dataclass(frozen=True)
class PairDiagnostics:
    """Tail extremes of ``d(f(t,x), f(t,y))`` (pair) and ``d(f(t,x), y)`` (point)."""

    liminf_pair: float
    limsup_pair: float
    liminf_point: float
    limsup_point: float
    horizon: int
    checkpoints: tuple = field(repr=False)

    def as_dict(self):
        return {
            "liminf_pair": self.liminf_pair,
            "limsup_pair": self.limsup_pair,
            "liminf_point": self.liminf_point,
            "limsup_point": self.limsup_point,
            "horizon": self.horizon,
        }


def _tail_start(horizon, n_checkpoints):
    if n_checkpoints < 2:
        raise InvalidArgumentError("need at least two checkpoints")
    ckpts = np.rint(np.arange(1, n_checkpoints + 1) * horizon / n_checkpoints).astype(np.int64)
    return int(ckpts[n_checkpoints // 2 - 1]), tuple(ckpts.tolist())


def _check_bounded(system, block, start):
    if system.is_symbolic or system.bounds is None:
        return
    lo = np.array([b[0] for b in system.bounds])
    hi = np.array([b[1] for b in system.bounds])
    slack = 1e-9 * np.maximum(1.0, hi - lo)
    out = np.any((block < lo - slack) | (block > hi + slack), axis=-1)
    if out.any():
        k = start + int(np.argmax(out.reshape(len(out), -1).any(axis=1)))
        raise NotLagrangeStableError(f"orbit leaves the state-space bounds at sample {k}", index=k)


def _pair_extrema(system, xs, ys, horizon, n_checkpoints, delta, y_fixed=None):
    """Tail min/max of pair distances for a batch of numeric starts.

    Returns four arrays of shape ``(M,)`` (pair min, pair max, point min,
    point max) and the checkpoint tuple.
    """
    t0, ckpts = _tail_start(horizon, n_checkpoints)
    both = np.concatenate([xs, ys])
    m = len(xs)
    lo_p = np.full(m, np.inf)
    hi_p = np.full(m, -np.inf)
    lo_q = np.full(m, np.inf)
    hi_q = np.full(m, -np.inf)
    y_fixed = ys if y_fixed is None else y_fixed
    try:
        for start, block in iter_orbit(system, both, delta, horizon):
            _check_bounded(system, block, start)
            if start + len(block) <= t0:
                continue
            block = block[max(0, t0 - start) :]
            fx, fy = block[:, :m], block[:, m:]
            dp = metric_distance(system.metric, fx, fy)
            dq = metric_distance(system.metric, fx, y_fixed[None])
            np.minimum(lo_p, dp.min(axis=0), out=lo_p)
            np.maximum(hi_p, dp.max(axis=0), out=hi_p)
            np.minimum(lo_q, dq.min(axis=0), out=lo_q)
            np.maximum(hi_q, dq.max(axis=0), out=hi_q)
    except NumericOverflowError as exc:
        raise NotLagrangeStableError(f"unbounded orbit: {exc}", index=exc.index) from exc
    return lo_p, hi_p, lo_q, hi_q, ckpts


def _symbolic_extrema(system, x, y, horizon, n_checkpoints, delta):
    t0, ckpts = _tail_start(horizon, n_checkpoints)
    yw = state_array(system, y)
    lo_p = lo_q = math.inf
    hi_p = hi_q = -math.inf
    gen_x = iter_orbit(system, x, delta, horizon)
    gen_y = iter_orbit(system, y, delta, horizon)
    for (start, bx), (_, by) in zip(gen_x, gen_y):
        if start + len(bx) <= t0:
            continue
        cut = max(0, t0 - start)
        dp = metric_distance("symbolic", bx[cut:], by[cut:])
        dq = metric_distance("symbolic", bx[cut:], yw)
        lo_p, hi_p = min(lo_p, dp.min()), max(hi_p, dp.max())
        lo_q, hi_q = min(lo_q, dq.min()), max(hi_q, dq.max())
    return lo_p, hi_p, lo_q, hi_q, ckpts


def pair_diagnostics(system, x, y, horizon=10**5, n_checkpoints=20, delta=None) -> PairDiagnostics:
    """Tail extremes of the distance between the motions of ``x`` and ``y``
    and between the motion of ``x`` and the point ``y``.

    Raises:
        NotLagrangeStableError: if either orbit blows up or leaves the
            system's bounds.
    """
    delta = system.delta if delta is None else delta
    if system.is_symbolic:
        vals = _symbolic_extrema(system, as_state(system, x), as_state(system, y), horizon, n_checkpoints, delta)
        return PairDiagnostics(*(float(v) for v in vals[:4]), int(horizon), vals[4])
    xs = as_state(system, x)[None]
    ys = as_state(system, y)[None]
    lo_p, hi_p, lo_q, hi_q, ckpts = _pair_extrema(system, xs, ys, horizon, n_checkpoints, delta, ys[0])
    return PairDiagnostics(float(lo_p[0]), float(hi_p[0]), float(lo_q[0]), float(hi_q[0]), int(horizon), ckpts)


def pair_diagnostics_batch(system, xs, ys, horizon=10**4, n_checkpoints=20, delta=None):
    """:func:`pair_diagnostics` for many numeric pairs at once."""
    if system.is_symbolic:
        return [pair_diagnostics(system, x, y, horizon, n_checkpoints, delta) for x, y in zip(xs, ys)]
    delta = system.delta if delta is None else delta
    xs = as_state(system, xs).reshape(-1, system.dimension)
    ys = as_state(system, ys).reshape(-1, system.dimension)
    if xs.shape != ys.shape:
        raise InvalidArgumentError("need as many x as y states")
    lo_p, hi_p, lo_q, hi_q, ckpts = _pair_extrema(system, xs, ys, horizon, n_checkpoints, delta, ys)
    return [
        PairDiagnostics(float(a), float(b), float(c), float(d), int(horizon), ckpts)
        for a, b, c, d in zip(lo_p, hi_p, lo_q, hi_q)
    ]


def _tols(zero_tol, pos_tol):
    pos_tol = 10 * zero_tol if pos_tol is None else pos_tol
    if not pos_tol > zero_tol:
        raise InvalidArgumentError("pos_tol must exceed zero_tol")
    return zero_tol, pos_tol


def is_li_yorke(d: PairDiagnostics, zero_tol=DEFAULT_ZERO_TOL, pos_tol=None) -> bool:
    """Proximal (liminf at most ``zero_tol``) but not asymptotic (limsup at
    least ``pos_tol``, default ``10 * zero_tol``)."""
    zero_tol, pos_tol = _tols(zero_tol, pos_tol)
    return d.liminf_pair <= zero_tol and d.limsup_pair >= pos_tol


def is_chaotic_motion(system, x, y, horizon=10**5, zero_tol=DEFAULT_ZERO_TOL, pos_tol=None, delta=None) -> bool:
    """All four conditions: the motion of ``x`` comes close to ``y`` without
    converging to it, and is proximal but not asymptotic to ``y``'s motion."""
    return chaotic_diagnostics(pair_diagnostics(system, x, y, horizon, delta=delta), zero_tol, pos_tol)


def chaotic_diagnostics(d: PairDiagnostics, zero_tol=DEFAULT_ZERO_TOL, pos_tol=None) -> bool:
    """The four conditions of :func:`is_chaotic_motion` on given diagnostics."""
    zero_tol, pos_tol = _tols(zero_tol, pos_tol)
    return (
        d.liminf_point <= zero_tol
        and d.limsup_point >= pos_tol
        and d.liminf_pair <= zero_tol
        and d.limsup_pair >= pos_tol
    )


@dataclass(frozen=True)
class PartnerResult:
    found: bool
    index: int | None
    candidate: object
    diagnostics: PairDiagnostics | None
    all_diagnostics: tuple = field(repr=False)


def find_li_yorke_partner(
    system, x, candidates, horizon=10**5, zero_tol=DEFAULT_ZERO_TOL, pos_tol=None, delta=None, workers=1
) -> PartnerResult:
    """Among proximal candidates pick the one with the largest limsup.

    ``found`` is False when no candidate is proximal or the best one is
    asymptotic; this is a reported outcome, not an error.
    """
    zero_tol, pos_tol = _tols(zero_tol, pos_tol)
    candidates = list(candidates)
    if not candidates:
        raise InvalidArgumentError("no candidates given")

    def one(y):
        return pair_diagnostics(system, x, y, horizon, delta=delta)

    if system.is_symbolic or workers > 1:
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                diags = list(pool.map(one, candidates))
        else:
            diags = [one(y) for y in candidates]
    else:
        xs = np.repeat(as_state(system, x)[None], len(candidates), axis=0)
        diags = pair_diagnostics_batch(system, xs, np.stack([as_state(system, y) for y in candidates]), horizon, delta=delta)
    best = None
    for i, d in enumerate(diags):
        if d.liminf_pair <= zero_tol and (best is None or d.limsup_pair > diags[best].limsup_pair):
            best = i
    if best is None:
        return PartnerResult(False, None, None, None, tuple(diags))
    ok = diags[best].limsup_pair >= pos_tol
    return PartnerResult(ok, best, candidates[best], diags[best], tuple(diags))


# -- sensitivity -------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    anchor: int
    radius: float
    probe: str
    partner: str
    limsup: float
    success: bool


@dataclass(frozen=True)
class SensitivityReport:
    """``epsilon_hat = delta_hat / 4`` and the probe witnesses per anchor."""

    delta_hat: float
    epsilon_hat: float
    anchors: tuple
    anchor_success: tuple
    witnesses: tuple = field(repr=False)

    @property
    def sensitive(self) -> bool:
        return bool(self.anchor_success) and all(self.anchor_success)

    @property
    def no_sensitivity(self) -> bool:
        return not any(self.anchor_success)

    def witness_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["anchor", "probe", "radius", "partner", "limsup", "success"])
        for r in self.witnesses:
            w.writerow([r.anchor, r.probe, repr(r.radius), r.partner, repr(r.limsup), int(r.success)])
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(
            {
                "delta_hat": self.delta_hat,
                "epsilon_hat": self.epsilon_hat,
                "anchors": list(self.anchors),
                "anchor_success": list(self.anchor_success),
            },
            sort_keys=True,
        )


def _closure_seeds(partition, cells, mode):
    """States whose orbits stand in for orbit closures inside the estimate."""
    if not isinstance(mode, str):
        return list(mode)
    if mode not in ("centers", "centers+vertices"):
        raise InvalidArgumentError(f"unknown closure seed mode {mode!r}")
    seeds = partition.representatives(cells)
    if mode == "centers+vertices" and partition.kind != "cylinder":
        lo, hi = partition.cell_bounds(cells)
        d = lo.shape[1]
        corners = [np.where(np.array(bits, dtype=bool), hi, lo) for bits in np.ndindex(*(2,) * d)]
        verts = np.unique(np.round(np.concatenate(corners), 15), axis=0)
        seeds += list(verts)
    return seeds


def _segment_distances(system, anchors, seeds, length, delta):
    """``[i, j] = min_k d(anchor_i, f^k(seed_j))`` over ``k < length``."""
    out = np.full((len(anchors), len(seeds)), np.inf)
    if system.is_symbolic:
        aw = np.stack([state_array(system, a) for a in anchors])
        for j, q in enumerate(seeds):
            for _, block in iter_orbit(system, q, delta, length - 1):
                d = metric_distance("symbolic", block[None, :, :], aw[:, None, :])
                out[:, j] = np.minimum(out[:, j], d.min(axis=1))
        return out
    a = np.stack([as_state(system, s) for s in anchors])
    q = np.stack([as_state(system, s) for s in seeds])
    for _, block in iter_orbit(system, q, delta, length - 1):
        # block: (n, Q, d); distances to each anchor
        d = metric_distance(system.metric, block[:, None, :, :], a[None, :, None, :])
        out = np.minimum(out, d.min(axis=0))
    return out


def _probe_points(system, partition, anchor, radius, n, rng):
    if system.is_symbolic:
        keep = max(1, math.ceil(-math.log2(radius)))
        head = anchor.window(min(keep, symbolic.DEPTH))

        def make():
            tail = symbolic.random_point(rng, system.alphabet).sequence
            return symbolic.concatenation(
                _chain_blocks(head, tail), system.alphabet, "probe"
            )

        return [make() for _ in range(n)]
    x = as_state(system, anchor)
    pts = x + rng.uniform(-1.0, 1.0, size=(n, x.shape[-1])) * radius / math.sqrt(x.shape[-1])
    if partition.kind == "box":
        pts = np.clip(pts, partition.lower, partition.upper)
    elif partition.kind == "circle":
        pts = np.mod(pts, 1.0)
    return list(pts)


def _chain_blocks(head, tail_seq):
    yield head
    pos = 0
    while True:
        yield tail_seq.symbols(pos, pos + 4096)
        pos += 4096


def _best_pair(system, anchor, probes, horizon, delta, target):
    """Largest pair limsup between a probe and the anchor or another probe,
    as ``(limsup, probe, partner)``."""
    pairs = [
        (label, xp, j, c)
        for j, c in enumerate(probes)
        for label, xp in [("anchor", anchor)] + [(f"probe{k}", p) for k, p in enumerate(probes)]
        if xp is not c
    ]
    if not pairs:
        return (-math.inf, "", "")
    if system.is_symbolic:
        best = (-math.inf, "", "")
        for label, xp, j, c in pairs:
            d = pair_diagnostics(system, xp, c, horizon, delta=delta)
            if d.limsup_pair > best[0]:
                best = (d.limsup_pair, _fmt_state(c), label)
            if best[0] >= target:
                break
        return best
    xs = np.stack([as_state(system, xp) for _, xp, _, _ in pairs])
    cs = np.stack([as_state(system, c) for _, _, _, c in pairs])
    diags = pair_diagnostics_batch(system, xs, cs, horizon, delta=delta)
    i = int(np.argmax([d.limsup_pair for d in diags]))
    return (diags[i].limsup_pair, _fmt_state(pairs[i][3]), pairs[i][0])


def _fmt_state(s):
    if isinstance(s, symbolic.SymbolicPoint):
        return "".join(str(v) for v in s.window(16) if v != symbolic.PAD) + "..."
    return " ".join(f"{v:.17g}" for v in np.atleast_1d(s))


def sensitivity_scan(
    system,
    est,
    n_anchor=None,
    n_probe=4,
    horizon=10**4,
    radii=(1e-2, 1e-4, 1e-6),
    seed=0,
    closure_seeds="centers",
    delta=None,
) -> SensitivityReport:
    """Estimate the sensitivity constant near the estimated center.

    ``delta_hat`` is the minimum over sampled anchors of the largest distance
    from the anchor to a sampled orbit segment (length ``horizon // 10``)
    started inside the estimate.  ``epsilon_hat = delta_hat / 4``.  Each
    anchor is then probed at each radius (capped at ``epsilon_hat / 4``): it
    succeeds when, for every radius, some probe ``c`` and some ``x'`` among
    the anchor and the probes satisfy ``limsup d(f^t x', f^t c) >= epsilon_hat``.

    Args:
        n_anchor: Anchors drawn from the estimate's cells; ``None`` uses all.
        n_probe: Probe points per radius.
        closure_seeds: ``"centers"`` (cell representatives),
            ``"centers+vertices"`` (also the cell corners, which catch fixed
            points sitting on the grid) or an explicit list of states.

    Raises:
        DegenerateEstimateError: if the estimate is a single cell.
    """
    partition, cells = _cells_of(est)
    if len(cells) < 2:
        raise DegenerateEstimateError("sensitivity needs an estimate with at least two cells")
    delta = system.delta if delta is None else delta
    rng = np.random.default_rng(seed)
    if n_anchor is None or n_anchor >= len(cells):
        anchor_cells = cells
    else:
        anchor_cells = np.sort(rng.choice(cells, size=n_anchor, replace=False))
    anchors = partition.representatives(anchor_cells)
    seeds = _closure_seeds(partition, cells, closure_seeds)
    seg = _segment_distances(system, anchors, seeds, max(1, horizon // 10), delta)
    delta_hat = float(seg.max(axis=1).min())
    eps_hat = delta_hat / 4.0

    witnesses = []
    success = []
    for i, a in enumerate(anchors):
        ok_all = True
        for r0 in radii:
            r = min(r0, eps_hat / 4.0)
            probes = _probe_points(system, partition, a, r, n_probe, rng) if r > 0 else []
            best = _best_pair(system, a, probes, horizon, delta, eps_hat)
            hit = eps_hat > 0 and best[0] >= eps_hat
            ok_all &= hit
            witnesses.append(Witness(int(anchor_cells[i]), float(r), best[1], best[2], float(best[0]), bool(hit)))
        success.append(bool(ok_all))
    return SensitivityReport(delta_hat, eps_hat, tuple(int(c) for c in anchor_cells), tuple(success), tuple(witnesses))


# -- diameter ----------------------------------------------------------------------


def diameter(obj, metric=None) -> float:
    """Diameter of a cell estimate (centres plus one cell diameter, capped at
    the diameter of the space) or of an array of states under ``metric``."""
    if isinstance(obj, (McaEstimate, CellSet)):
        partition, cells = _cells_of(obj)
        if not len(cells):
            raise InvalidArgumentError("empty estimate")
        centers = partition.centers(cells)
        spread = _max_pairwise(partition.metric, centers)
        return min(spread + partition.cell_diameter, partition.space_diameter)
    if metric is None:
        raise InvalidArgumentError("a metric is needed for a plain state set")
    states = np.asarray(obj)
    if states.ndim == 1 and metric != "symbolic":
        states = states[:, None]
    if not len(states):
        raise InvalidArgumentError("empty state set")
    return _max_pairwise(metric, states)


def _max_pairwise(metric, pts):
    best = 0.0
    step = max(1, (1 << 22) // (len(pts) * pts.shape[-1]))
    for s in range(0, len(pts), step):
        d = metric_distance(metric, pts[s : s + step, None, :], pts[None, :, :])
        best = max(best, float(d.max()))
    return best
