"""Z^d group carriers, finite windows and Følner sequences.

Elements are tuples of ints.  Rank-1 helpers also accept bare ints so that
``FiniteWindow.of([0, 1, 2])`` reads naturally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, RangeError, ResourceError

Element = tuple


def as_element(g, rank: int | None = None) -> Element:
    if isinstance(g, (int, np.integer)):
        g = (int(g),)
    else:
        g = tuple(int(v) for v in g)
    if rank is not None and len(g) != rank:
        raise ConfigError(f"element {g} has rank {len(g)}, expected {rank}")
    return g


@dataclass(frozen=True)
class GroupSpec:
    """The free abelian group Z^rank under componentwise addition."""

    rank: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ConfigError("rank must be a positive integer")

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def element(self, g) -> Element:
        return as_element(g, self.rank)

    def op(self, a, b) -> Element:
        a, b = self.element(a), self.element(b)
        return tuple(x + y for x, y in zip(a, b))

    def inverse(self, a) -> Element:
        return tuple(-x for x in self.element(a))

    def norm1(self, a) -> int:
        return sum(abs(x) for x in self.element(a))


@dataclass(frozen=True)
class FiniteWindow:
    """A finite nonempty set of group elements, stored sorted and deduplicated."""

    elements: tuple

    def __post_init__(self):
        if not self.elements:
            raise ConfigError("a window must be nonempty")
        ranks = {len(e) for e in self.elements}
        if len(ranks) != 1:
            raise ConfigError("window mixes elements of different rank")
        if list(self.elements) != sorted(set(self.elements)):
            raise ConfigError("window elements must be sorted and unique; use FiniteWindow.of")

    @classmethod
    def of(cls, items: Iterable, rank: int | None = None) -> "FiniteWindow":
        return cls(tuple(sorted({as_element(g, rank) for g in items})))

    @property
    def rank(self) -> int:
        return len(self.elements[0])

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return as_element(g) in set(self.elements)

    def as_set(self) -> frozenset:
        return frozenset(self.elements)

    def translate(self, g) -> "FiniteWindow":
        g = as_element(g, self.rank)
        return FiniteWindow.of((tuple(a + b for a, b in zip(g, f)) for f in self.elements))

    def inverse(self) -> "FiniteWindow":
        return FiniteWindow.of(tuple(-x for x in f) for f in self.elements)

    def to_list(self) -> list:
        return [list(e) for e in self.elements]

    def as_array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64)


def box(n: int, rank: int = 1, origin: Sequence[int] | None = None) -> FiniteWindow:
    """The integer box ``origin + [0, n)^rank``."""
    if n < 1:
        raise ConfigError("box side must be >= 1")
    origin = (0,) * rank if origin is None else as_element(origin, rank)
    return FiniteWindow(tuple(
        tuple(o + c for o, c in zip(origin, cell)) for cell in product(range(n), repeat=rank)
    ))


def symmetric_box(radius: int, rank: int = 1) -> FiniteWindow:
    return box(2 * radius + 1, rank, origin=(-radius,) * rank)


@dataclass(frozen=True)
class FolnerSequence:
    """Indexed windows F_n (1-based).

    ``windows=None`` selects the box family [0, n)^rank for n in
    ``n_min..n_max``; otherwise ``windows[k]`` is F_{k+1}.
    """

    rank: int = 1
    windows: tuple | None = None
    n_min: int = 1
    n_max: int = 64
    tempered_constant: float | None = None

    def __post_init__(self):
        if self.windows is not None:
            if not self.windows:
                raise ConfigError("user Følner list is empty")
            object.__setattr__(self, "n_min", 1)
            object.__setattr__(self, "n_max", len(self.windows))
            for w in self.windows:
                if w.rank != self.rank:
                    raise ConfigError("user window rank does not match sequence rank")
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ConfigError("invalid Følner index range")

    @classmethod
    def boxes(cls, rank: int = 1, n_max: int = 64) -> "FolnerSequence":
        return cls(rank=rank, n_max=n_max)

    @classmethod
    def from_windows(cls, windows: Sequence) -> "FolnerSequence":
        ws = tuple(w if isinstance(w, FiniteWindow) else FiniteWindow.of(w) for w in windows)
        return cls(rank=ws[0].rank, windows=ws)

    @property
    def is_box_family(self) -> bool:
        return self.windows is None

    def window(self, n: int) -> FiniteWindow:
        return folner_window(self, n)


def folner_window(seq: FolnerSequence, n: int) -> FiniteWindow:
    if not seq.n_min <= n <= seq.n_max:
        raise RangeError(f"index {n} outside {seq.n_min}..{seq.n_max}")
    if seq.windows is None:
        return box(n, seq.rank)
    return seq.windows[n - 1]


def boundary_ratio(F: FiniteWindow, g) -> Fraction:
    """|F \\ gF| / |F| with gF = {g + f}."""
    g = as_element(g, F.rank)
    gF = {tuple(a + b for a, b in zip(g, f)) for f in F.elements}
    missing = sum(1 for f in F.elements if f not in gF)
    return Fraction(missing, F.size)


def window_product(S: FiniteWindow, F: FiniteWindow) -> FiniteWindow:
    """The sumset SF = {s + f}."""
    if S.rank != F.rank:
        raise ConfigError("rank mismatch in window product")
    return FiniteWindow.of(
        tuple(a + b for a, b in zip(s, f)) for s in S.elements for f in F.elements
    )


def check_tempered(seq: FolnerSequence, n_max: int, element_budget: int = 2_000_000) -> Fraction:
    """Smallest C with |U_{k<n} F_k^{-1} F_n| <= C |F_n| for 2 <= n <= n_max.

    Exact set arithmetic; the work is bounded by ``element_budget`` sums.
    """
    if n_max < 2:
        raise ConfigError("check_tempered needs n_max >= 2")
    if n_max > seq.n_max:
        raise RangeError(f"n_max {n_max} exceeds sequence range {seq.n_max}")
    worst = Fraction(0)
    work = 0
    for n in range(max(2, seq.n_min + 1), n_max + 1):
        Fn = folner_window(seq, n)
        union: set = set()
        for k in range(seq.n_min, n):
            Fk_inv = folner_window(seq, k).inverse()
            work += Fk_inv.size * Fn.size
            if work > element_budget:
                raise ResourceError(
                    f"tempered check exceeded element budget {element_budget} at n={n}"
                )
            union.update(window_product(Fk_inv, Fn).elements)
        worst = max(worst, Fraction(len(union), Fn.size))
    return worst
