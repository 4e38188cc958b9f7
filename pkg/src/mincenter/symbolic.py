"""Lazily generated one-sided symbol sequences and points of the shift space.

A point of the one-sided shift is an infinite word.  Words are produced on
demand by a block generator and cached, so a :class:`SymbolicPoint` is just a
(sequence, offset) pair and shifting is an offset increment.
"""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, OrbitExhaustedError

#: Number of leading symbols the symbolic metric looks at.
DEPTH = 64
#: Filler used past the end of a finite word; never equal to a real symbol.
PAD = 255

_BLOCK = 4096


def as_word(word) -> np.ndarray:
    """Convert ``"0101"``, a list of ints or an array into a uint8 word."""
    if isinstance(word, str):
        if not word.isdigit() and word:
            raise InvalidArgumentError(f"symbol words are digit strings, got {word!r}")
        return np.frombuffer(word.encode(), dtype=np.uint8) - ord("0")
    arr = np.asarray(word, dtype=np.int64)
    if arr.ndim != 1 or (arr.size and (arr.min() < 0 or arr.max() >= PAD)):
        raise InvalidArgumentError("a word is a 1-d sequence of small non-negative ints")
    return arr.astype(np.uint8)


class SymbolicSequence:
    """A one-sided sequence built by concatenating generated blocks.

    ``blocks`` is any iterable of words.  If it is finite the sequence is
    finite and shifting past its end raises :class:`OrbitExhaustedError`.
    """

    def __init__(self, blocks, alphabet=2, label="sequence"):
        self._blocks = iter(blocks)
        self._buffer = np.empty(0, dtype=np.uint8)
        self._done = False
        self._lock = threading.Lock()
        self.alphabet = int(alphabet)
        self.label = label

    def __repr__(self):
        return f"SymbolicSequence({self.label})"

    def _fill(self, n):
        if len(self._buffer) >= n or self._done:
            return
        with self._lock:
            size = len(self._buffer)
            parts = [self._buffer]
            while size < n:
                try:
                    block = as_word(next(self._blocks))
                except StopIteration:
                    self._done = True
                    break
                parts.append(block)
                size += len(block)
            self._buffer = np.concatenate(parts)

    @property
    def length(self):
        """Total length for an exhausted finite sequence, else ``None``."""
        return len(self._buffer) if self._done else None

    def has(self, n) -> bool:
        """True if at least ``n`` symbols exist."""
        self._fill(n)
        return len(self._buffer) >= n

    def symbols(self, start, stop) -> np.ndarray:
        """Symbols ``start:stop``; positions past a finite end hold ``PAD``."""
        self._fill(stop)
        out = np.full(stop - start, PAD, dtype=np.uint8)
        avail = self._buffer[start:stop]
        out[: len(avail)] = avail
        return out


@dataclass(frozen=True)
class SymbolicPoint:
    """The point ``sequence[offset:]`` of the one-sided shift space."""

    sequence: SymbolicSequence
    offset: int = 0

    def window(self, depth=DEPTH) -> np.ndarray:
        return self.sequence.symbols(self.offset, self.offset + depth)

    def shift(self, n=1) -> SymbolicPoint:
        if n < 0:
            raise InvalidArgumentError("the one-sided shift cannot move backwards")
        if not self.sequence.has(self.offset + n + 1):
            raise OrbitExhaustedError(
                f"{self.sequence.label} has no symbols left after offset {self.offset + n}"
            )
        return SymbolicPoint(self.sequence, self.offset + n)

    def __repr__(self):
        head = "".join(str(s) if s != PAD else "" for s in self.window(16))
        return f"SymbolicPoint({head}..., offset={self.offset})"


# -- generators --------------------------------------------------------------


def periodic(word, prefix="", alphabet=2) -> SymbolicPoint:
    """The eventually periodic point ``prefix · word^∞``."""
    w = as_word(word)
    if len(w) == 0:
        raise InvalidArgumentError("periodic word must be non-empty")
    reps = max(1, _BLOCK // len(w))
    tiled = np.tile(w, reps)
    blocks = itertools.chain([as_word(prefix)], itertools.repeat(tiled))
    label = f"{prefix}({''.join(map(str, w))})"
    return SymbolicPoint(SymbolicSequence(blocks, alphabet, label))


def finite(word, alphabet=2) -> SymbolicPoint:
    w = as_word(word)
    return SymbolicPoint(SymbolicSequence([w], alphabet, f"finite[{len(w)}]"))


def sturmian(alpha, x=0.0) -> SymbolicPoint:
    """Coding of the rotation ``x -> x + alpha`` by the arc ``[1 - alpha, 1)``."""
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError("sturmian slope must lie in (0, 1)")

    def blocks():
        for start in itertools.count(0, _BLOCK):
            i = np.arange(start, start + _BLOCK, dtype=np.float64)
            yield (np.mod(x + i * alpha, 1.0) >= 1.0 - alpha).astype(np.uint8)

    return SymbolicPoint(SymbolicSequence(blocks(), 2, f"sturmian({alpha:.6g})"))


def concatenation(words, alphabet=2, label="blocks") -> SymbolicPoint:
    """Concatenate an (optionally infinite) iterable of words."""
    return SymbolicPoint(SymbolicSequence(words, alphabet, label))


def random_point(rng, alphabet=2) -> SymbolicPoint:
    """A point with i.i.d. uniform symbols drawn lazily from ``rng``."""

    def blocks():
        while True:
            yield rng.integers(0, alphabet, _BLOCK, dtype=np.uint8)

    return SymbolicPoint(SymbolicSequence(blocks(), alphabet, "random"))


def shortlex_words(alphabet=2):
    """All non-empty words in shortlex order: 0, 1, 00, 01, 10, 11, 000, ..."""
    for n in itertools.count(1):
        for w in itertools.product(range(alphabet), repeat=n):
            yield np.array(w, dtype=np.uint8)


def shadowing_point(base="01", start=64, growth=8) -> SymbolicPoint:
    """A point that alternates long runs of ``base`` with every finite word.

    Run ``k`` is ``base`` repeated ``start + growth * k`` times, followed by
    the ``k``-th shortlex word padded (by repeating its last symbol) to a
    multiple of ``len(base)``.  The runs stay phase-aligned with
    ``base^∞``, so the motion comes back arbitrarily close to the periodic
    orbit while the departures make the orbit dense in the full shift.
    """
    b = as_word(base)
    p = len(b)

    def blocks():
        for k, w in enumerate(shortlex_words(), start=1):
            yield np.tile(b, start + growth * k)
            pad = (-len(w)) % p
            yield np.concatenate([w, np.repeat(w[-1:], pad)])

    return SymbolicPoint(SymbolicSequence(blocks(), 2, f"shadowing({base})"))


def sparse_ones() -> SymbolicPoint:
    """``1 0 1 00 1 0000 1 ...``: the gaps between ones double."""

    def blocks():
        for k in itertools.count():
            yield np.concatenate([[1], np.zeros(2**k, dtype=np.uint8)])

    return SymbolicPoint(SymbolicSequence(blocks(), 2, "sparse-ones"))


_NOTATION = re.compile(r"^\s*([0-9]*)\(([0-9]+)\)\s*$")


def parse_point(text: str) -> SymbolicPoint:
    """Parse a point from text.

    Accepted forms: ``110(01)`` (prefix then repeated word), ``0101`` (finite
    word), ``sturmian:<alpha>``, ``shadowing``, ``sparse-ones``.
    """
    text = text.strip()
    m = _NOTATION.match(text)
    if m:
        return periodic(m.group(2), prefix=m.group(1))
    if text.startswith("sturmian:"):
        return sturmian(float(text.split(":", 1)[1]))
    if text == "shadowing":
        return shadowing_point()
    if text == "sparse-ones":
        return sparse_ones()
    if text.isdigit():
        return finite(text)
    raise InvalidArgumentError(f"cannot parse symbolic point {text!r}")
