"""Finite partitions of a state space into cells.

Three geometries are supported:

* ``box``: a Euclidean box cut into a regular grid,
* ``circle``: the torus ``[0, 1)^d`` cut into a regular grid (cells wrap),
* ``cylinder``: cylinder sets ``[w]`` of a fixed depth in a shift space.

Cells are identified by flat integer indices.  A cylinder's index is its
word read as a base-``alphabet`` number.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import symbolic
from .errors import InvalidArgumentError
from .symbolic import DEPTH, PAD

_MAX_CELLS = 1 << 22
_CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True)
class BoxPartition:
    kind: str
    lower: tuple = ()
    upper: tuple = ()
    resolution: tuple = ()
    alphabet: int = 2

    def __post_init__(self):
        if self.kind not in ("box", "circle", "cylinder"):
            raise InvalidArgumentError(f"unknown partition kind {self.kind!r}")
        if any(int(r) < 1 for r in self.resolution) or not self.resolution:
            raise InvalidArgumentError("resolution must be positive")
        if self.kind == "cylinder":
            if len(self.resolution) != 1 or self.resolution[0] > DEPTH:
                raise InvalidArgumentError(f"cylinder depth must be in 1..{DEPTH}")
        elif len(self.lower) != len(self.resolution) or len(self.upper) != len(self.resolution):
            raise InvalidArgumentError("bounds and resolution disagree on dimension")
        elif any(hi <= lo for lo, hi in zip(self.lower, self.upper)):
            raise InvalidArgumentError("empty bounds")
        if self.n_cells > _MAX_CELLS:
            raise InvalidArgumentError(f"{self.n_cells} cells is more than supported")

    # construction

    @classmethod
    def interval(cls, lo, hi, n):
        return cls("box", (float(lo),), (float(hi),), (int(n),))

    @classmethod
    def box(cls, bounds, resolution):
        bounds = [tuple(map(float, b)) for b in bounds]
        if isinstance(resolution, int):
            resolution = (resolution,) * len(bounds)
        return cls("box", tuple(b[0] for b in bounds), tuple(b[1] for b in bounds), tuple(map(int, resolution)))

    @classmethod
    def circle(cls, n, dimension=1):
        return cls("circle", (0.0,) * dimension, (1.0,) * dimension, (int(n),) * dimension)

    @classmethod
    def cylinders(cls, depth, alphabet=2):
        return cls("cylinder", resolution=(int(depth),), alphabet=int(alphabet))

    @classmethod
    def for_system(cls, system, resolution, bounds=None):
        """Partition matching ``system``'s metric; ``resolution`` is the
        cylinder depth for shift spaces."""
        if system.metric == "symbolic":
            return cls.cylinders(resolution, system.alphabet)
        if system.metric == "circle":
            return cls.circle(resolution, system.dimension)
        bounds = bounds if bounds is not None else system.bounds
        if bounds is None:
            raise InvalidArgumentError(f"{system.family} has no default bounds; pass them")
        return cls.box(bounds, resolution)

    @classmethod
    def for_epsilon(cls, system, epsilon, bounds=None):
        """Coarsest regular partition with cell diameter at most ``epsilon / 2``."""
        if epsilon <= 0:
            raise InvalidArgumentError("epsilon must be positive")
        target = epsilon / 2.0
        if system.metric == "symbolic":
            return cls.cylinders(max(1, math.ceil(-math.log2(target))), system.alphabet)
        probe = cls.for_system(system, 1, bounds)
        d = len(probe.resolution)
        widths = np.subtract(probe.upper, probe.lower)
        n = np.ceil(widths * math.sqrt(d) / target).astype(int)
        return cls(probe.kind, probe.lower, probe.upper, tuple(int(v) for v in np.maximum(n, 1)))

    # geometry

    @property
    def metric(self) -> str:
        return {"box": "euclidean", "circle": "circle", "cylinder": "symbolic"}[self.kind]

    @property
    def depth(self) -> int:
        return self.resolution[0]

    @property
    def n_cells(self) -> int:
        if self.kind == "cylinder":
            return self.alphabet**self.depth
        return int(np.prod(self.resolution))

    @property
    def widths(self) -> np.ndarray:
        if self.kind == "cylinder":
            return np.array([2.0**-self.depth])
        return (np.subtract(self.upper, self.lower)) / np.array(self.resolution)

    @property
    def cell_width(self) -> float:
        """Largest side length (``2**-depth`` for cylinders)."""
        return float(self.widths.max())

    @property
    def cell_diameter(self) -> float:
        if self.kind == "cylinder":
            return 2.0**-self.depth
        w = self.widths
        if self.kind == "circle":
            w = np.minimum(w, 0.5)
        return float(np.sqrt(np.sum(w * w)))

    @property
    def space_diameter(self) -> float:
        if self.kind == "cylinder":
            return 1.0
        if self.kind == "circle":
            return 0.5 * math.sqrt(len(self.resolution))
        return float(np.sqrt(np.sum(np.subtract(self.upper, self.lower) ** 2)))

    def as_dict(self) -> dict:
        if self.kind == "cylinder":
            return {"kind": "cylinder", "depth": self.depth, "alphabet": self.alphabet}
        return {
            "kind": self.kind,
            "lower": list(self.lower),
            "upper": list(self.upper),
            "resolution": list(self.resolution),
        }

    @classmethod
    def from_dict(cls, d):
        if d["kind"] == "cylinder":
            return cls.cylinders(d["depth"], d.get("alphabet", 2))
        return cls(d["kind"], tuple(d["lower"]), tuple(d["upper"]), tuple(d["resolution"]))

    # cell lookup

    def locate(self, states) -> np.ndarray:
        """Cell index of each state, ``-1`` when outside the bounds."""
        states = np.asarray(states)
        if self.kind == "cylinder":
            return self._locate_words(states[..., : self.depth])
        x = states.astype(np.float64, copy=False)
        lo = np.array(self.lower)
        res = np.array(self.resolution)
        w = self.widths
        if self.kind == "circle":
            x = np.mod(x, 1.0)
            idx = np.minimum(np.floor(x / w).astype(np.int64), res - 1)
            ok = np.ones(x.shape[:-1], dtype=bool)
        else:
            hi = np.array(self.upper)
            ok = np.all((x >= lo) & (x <= hi), axis=-1)
            idx = np.clip(np.floor((x - lo) / w), 0, res - 1).astype(np.int64)
        flat = np.ravel_multi_index(np.moveaxis(idx, -1, 0), self.resolution, mode="clip")
        return np.where(ok, flat, -1)

    def _locate_words(self, words):
        if np.any(words == PAD, axis=-1).any():
            bad = np.any(words == PAD, axis=-1)
        else:
            bad = None
        weights = self.alphabet ** np.arange(self.depth - 1, -1, -1, dtype=np.int64)
        code = words.astype(np.int64) @ weights
        if bad is not None:
            code = np.where(bad, -1, code)
        return code

    def coords(self, cells) -> np.ndarray:
        cells = np.asarray(cells, dtype=np.int64)
        if self.kind == "cylinder":
            return self.words(cells)
        return np.stack(np.unravel_index(cells, self.resolution), axis=-1)

    def words(self, cells) -> np.ndarray:
        """Cylinder words, shape ``(n, depth)``."""
        cells = np.asarray(cells, dtype=np.int64)
        powers = self.alphabet ** np.arange(self.depth - 1, -1, -1, dtype=np.int64)
        return ((cells[..., None] // powers) % self.alphabet).astype(np.uint8)

    def cell_bounds(self, cells):
        c = self.coords(cells)
        lo = np.array(self.lower) + c * self.widths
        return lo, lo + self.widths

    def centers(self, cells) -> np.ndarray:
        """Representative state of each cell.

        Box and circle cells use their midpoint.  A cylinder ``[w]`` uses the
        periodic point ``w^∞`` (its first ``DEPTH`` symbols).
        """
        if self.kind == "cylinder":
            w = self.words(cells)
            reps = -(-DEPTH // self.depth)
            return np.tile(w, (1, reps))[:, :DEPTH]
        lo, hi = self.cell_bounds(cells)
        return 0.5 * (lo + hi)

    def representatives(self, cells) -> list:
        """Cell representatives as system states (SymbolicPoints for cylinders)."""
        if self.kind == "cylinder":
            return [symbolic.periodic(w) for w in self.words(cells)]
        return list(self.centers(cells))

    # distances

    def cell_distances(self, states, cells) -> np.ndarray:
        """Distance from each state to each cell, shape ``(n, len(cells))``."""
        states = np.asarray(states)
        cells = np.asarray(cells, dtype=np.int64)
        if self.kind == "cylinder":
            words = self.words(cells)
            eq = states[:, None, : self.depth] == words[None, :, :]
            full = eq.all(axis=-1)
            first = np.argmin(eq, axis=-1)
            return np.where(full, 0.0, np.ldexp(1.0, -first))
        lo, hi = self.cell_bounds(cells)
        x = states[:, None, :].astype(np.float64)
        if self.kind == "circle":
            inside = _in_arc(x, lo[None], hi[None])
            dl = _circ(x - lo[None])
            dh = _circ(x - hi[None])
            gap = np.where(inside, 0.0, np.minimum(dl, dh))
        else:
            gap = np.maximum(np.maximum(lo[None] - x, x - hi[None]), 0.0)
        if gap.shape[-1] == 1:
            return gap[..., 0]
        return np.sqrt(np.sum(gap * gap, axis=-1))

    def distance_to_cells(self, states, cells) -> np.ndarray:
        """Distance from each state to the union of ``cells`` (inf if empty)."""
        states = np.asarray(states)
        n = len(states)
        cells = np.asarray(cells, dtype=np.int64)
        if cells.size == 0:
            return np.full(n, np.inf)
        out = np.empty(n)
        per = max(1, _CHUNK_ELEMS // (len(cells) * max(1, states.shape[-1])))
        for s in range(0, n, per):
            out[s : s + per] = self.cell_distances(states[s : s + per], cells).min(axis=1)
        return out

    def reach(self, epsilon) -> int:
        """Smallest ``k`` such that every cell within ``epsilon`` of a point
        of cell ``a`` belongs to ``fatten([a], k)``."""
        if self.kind == "cylinder":
            if epsilon >= 1:
                return self.depth
            lead = math.ceil(-math.log2(epsilon)) if epsilon > 0 else self.depth
            return max(0, self.depth - min(lead, self.depth))
        return int(math.floor(epsilon / float(self.widths.min()))) + 1

    def within(self, states, cells, epsilon) -> np.ndarray:
        """Whether each state lies within ``epsilon`` of the union of ``cells``.

        Only neighbouring cells are examined, so the cost does not grow with
        the size of the cell set.
        """
        states = np.asarray(states)
        cells = np.unique(np.asarray(cells, dtype=np.int64))
        n = len(states)
        res = np.zeros(n, dtype=bool)
        if cells.size == 0 or n == 0:
            return res
        table = np.zeros(self.n_cells, dtype=bool)
        table[cells] = True
        loc = self.locate(states)
        ok = loc >= 0
        res[ok] = table[loc[ok]]
        stray = np.flatnonzero(~ok)
        if stray.size:
            res[stray] = self.distance_to_cells(states[stray], cells) <= epsilon
        todo = np.flatnonzero(ok & ~res)
        if todo.size == 0:
            return res
        k = self.reach(epsilon)
        if self.kind == "cylinder":
            if k == 0:
                return res
            shift = self.alphabet**k
            res[todo] = np.isin(loc[todo] // shift, np.unique(cells // shift))
            return res
        d = len(self.resolution)
        if (2 * k + 1) ** d >= self.n_cells or (2 * k + 1) ** d > 4 * len(cells):
            res[todo] = self.distance_to_cells(states[todo], cells) <= epsilon
            return res
        res_arr = np.array(self.resolution)
        coords = self.coords(loc[todo])
        sub = states[todo]
        hit = np.zeros(todo.size, dtype=bool)
        for off in itertools.product(range(-k, k + 1), repeat=d):
            if not any(off):
                continue
            nb = coords + np.array(off)
            if self.kind == "circle":
                nb = np.mod(nb, res_arr)
                valid = np.ones(len(nb), dtype=bool)
            else:
                valid = np.all((nb >= 0) & (nb < res_arr), axis=1)
            flat = np.full(len(nb), -1, dtype=np.int64)
            flat[valid] = np.ravel_multi_index(nb[valid].T, self.resolution)
            cand = valid & ~hit
            cand[cand] = table[flat[cand]]
            if not cand.any():
                continue
            idx = np.flatnonzero(cand)
            dist = self._point_cell_distance(sub[idx], flat[idx])
            hit[idx[dist <= epsilon]] = True
        res[todo] = hit
        return res

    def _point_cell_distance(self, states, cells):
        """Distance from ``states[i]`` to ``cells[i]`` (paired, not all-pairs)."""
        lo, hi = self.cell_bounds(cells)
        x = np.asarray(states, dtype=np.float64)
        if self.kind == "circle":
            gap = np.where(_in_arc(x, lo, hi), 0.0, np.minimum(_circ(x - lo), _circ(x - hi)))
        else:
            gap = np.maximum(np.maximum(lo - x, x - hi), 0.0)
        return np.sqrt(np.sum(gap * gap, axis=-1))

    def fatten(self, cells, k=1) -> np.ndarray:
        """Cells within ``k`` grid steps of ``cells`` (Chebyshev neighbourhood;
        for cylinders, cells agreeing on the first ``depth - k`` symbols)."""
        cells = np.unique(np.asarray(cells, dtype=np.int64))
        if cells.size == 0 or k == 0:
            return cells
        if self.kind == "cylinder":
            shift = self.alphabet ** min(k, self.depth)
            prefixes = np.unique(cells // shift)
            return (prefixes[:, None] * shift + np.arange(shift)[None, :]).ravel()
        c = self.coords(cells)
        d = c.shape[1]
        offsets = np.stack(np.meshgrid(*[np.arange(-k, k + 1)] * d, indexing="ij"), -1).reshape(-1, d)
        nb = c[:, None, :] + offsets[None, :, :]
        res = np.array(self.resolution)
        if self.kind == "circle":
            nb = np.mod(nb, res)
            keep = np.ones(nb.shape[:-1], dtype=bool)
        else:
            keep = np.all((nb >= 0) & (nb < res), axis=-1)
        nb = nb[keep]
        return np.unique(np.ravel_multi_index(nb.T, self.resolution))


def _circ(d):
    d = np.mod(np.abs(d), 1.0)
    return np.minimum(d, 1.0 - d)


def _in_arc(x, lo, hi):
    return (np.mod(x - lo, 1.0) <= (hi - lo)) | (_circ(x - lo) == 0.0)
