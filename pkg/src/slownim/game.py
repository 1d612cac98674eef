"""Core model of exact slow NIM.

A position is a multiset of pile sizes, stored canonically as a sorted
non-decreasing tuple. A move in NIM(n, k) removes one stone from each of
exactly k distinct nonempty piles; a position with fewer than k nonempty
piles is terminal.

The module also provides a bijective ranking of the box of all canonical
n-pile positions with entries bounded by `cap`. Positions are ordered
colexicographically (compare the largest entry first), which makes every
move target a strictly smaller rank: dense tables indexed by rank can be
filled in a single forward pass.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    IllegalMoveError,
    InvalidPositionError,
    InvalidSpecError,
    NoMovesError,
    OutOfBoxError,
    UnsupportedSpecError,
)


class Version(str, Enum):
    """Play convention: the player unable to move loses (normal) or wins (misere)."""

    NORMAL = "normal"
    MISERE = "misere"


@dataclass(frozen=True, slots=True)
class Position:
    """Canonical game position: a non-decreasing tuple of pile sizes.

    Construct directly only from already-sorted data; use :func:`canonicalize`
    for raw user input.
    """

    piles: tuple[int, ...]

    def __post_init__(self) -> None:
        p = self.piles
        if not isinstance(p, tuple) or len(p) == 0:
            raise InvalidPositionError("position needs at least one pile")
        last = 0
        for v in p:
            if not isinstance(v, int) or isinstance(v, bool):
                raise InvalidPositionError(f"pile size {v!r} is not an integer")
            if v < 0:
                raise InvalidPositionError(f"pile size {v} is negative")
            if v < last:
                raise InvalidPositionError("piles must be non-decreasing; use canonicalize()")
            last = v

    @property
    def n(self) -> int:
        return len(self.piles)

    @property
    def stones(self) -> int:
        return sum(self.piles)

    def __len__(self) -> int:
        return len(self.piles)

    def __iter__(self) -> Iterator[int]:
        return iter(self.piles)

    def __getitem__(self, i: int) -> int:
        return self.piles[i]

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.piles)

    @classmethod
    def from_text(cls, text: str) -> "Position":
        """Parse a comma-separated pile list such as ``"1,2,3"`` and canonicalize."""
        parts = [s.strip() for s in text.split(",")]
        try:
            raw = [int(s) for s in parts]
        except ValueError as exc:
            raise InvalidPositionError(f"cannot parse pile list {text!r}") from exc
        return canonicalize(raw)


@dataclass(frozen=True, slots=True)
class GameSpec:
    """Rules of one game: n piles, moves shrink exactly k of them, play version."""

    n: int
    k: int
    version: Version = Version.MISERE

    def __post_init__(self) -> None:
        if self.n < 1 or not 1 <= self.k <= self.n:
            raise InvalidSpecError(f"need 1 <= k <= n, got n={self.n} k={self.k}")
        if not isinstance(self.version, Version):
            object.__setattr__(self, "version", Version(self.version))

    @property
    def misere(self) -> bool:
        return self.version is Version.MISERE


@dataclass(frozen=True, slots=True)
class MoveChoice:
    """One concrete move: the sorted indices of the piles being reduced."""

    reduced: tuple[int, ...]
    n: int

    @property
    def kept_index(self) -> int:
        """The single untouched index; only meaningful when k = n - 1."""
        if len(self.reduced) != self.n - 1:
            raise UnsupportedSpecError("kept_index is defined only for k = n - 1 moves")
        return next(i for i in range(self.n) if i not in self.reduced)


def canonicalize(raw: Iterable[int]) -> Position:
    """Sort raw pile sizes into the canonical non-decreasing form."""
    return Position(tuple(sorted(raw)))


def _check_length(x: Position, spec: GameSpec) -> None:
    if x.n != spec.n:
        raise InvalidPositionError(f"position has {x.n} piles but spec.n = {spec.n}")


def is_terminal(x: Position, spec: GameSpec) -> bool:
    """True when fewer than k piles are nonempty, i.e. no move exists."""
    _check_length(x, spec)
    return sum(1 for v in x.piles if v > 0) < spec.k


def successor_piles(piles: tuple[int, ...], k: int) -> list[tuple[int, ...]]:
    """Distinct canonical successors of a sorted pile tuple, as bare tuples.

    Helper for hot paths that do not need move bookkeeping. Order is
    deterministic (first appearance over lexicographic index choices).
    """
    indices = [i for i, v in enumerate(piles) if v > 0]
    if len(indices) < k:
        return []
    seen: dict[tuple[int, ...], None] = {}
    for combo in itertools.combinations(indices, k):
        nxt = list(piles)
        for i in combo:
            nxt[i] -= 1
        seen.setdefault(tuple(sorted(nxt)))
    return list(seen)


def successors(x: Position, spec: GameSpec) -> list[tuple[MoveChoice, Position]]:
    """All moves from x, one entry per distinct successor position.

    When several index choices produce the same multiset, the representative
    MoveChoice is the lexicographically smallest set of reduced indices.
    """
    _check_length(x, spec)
    indices = [i for i, v in enumerate(x.piles) if v > 0]
    if len(indices) < spec.k:
        return []
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    for combo in itertools.combinations(indices, spec.k):
        nxt = list(x.piles)
        for i in combo:
            nxt[i] -= 1
        key = tuple(sorted(nxt))
        if key not in seen:
            seen[key] = combo
    return [(MoveChoice(reduced=c, n=spec.n), Position(p)) for p, c in seen.items()]


def apply_keep(x: Position, kept_index: int, spec: GameSpec) -> Position:
    """Play the k = n-1 move that keeps one pile and reduces all others."""
    _check_length(x, spec)
    if spec.k != spec.n - 1:
        raise UnsupportedSpecError("apply_keep requires k = n - 1")
    if not 0 <= kept_index < spec.n:
        raise IllegalMoveError(f"kept index {kept_index} out of range for n={spec.n}")
    if is_terminal(x, spec):
        raise NoMovesError(f"position {x} is terminal")
    piles = list(x.piles)
    for i, v in enumerate(piles):
        if i != kept_index:
            if v == 0:
                raise IllegalMoveError(f"keeping index {kept_index} would reduce empty pile {i}")
            piles[i] = v - 1
    return Position(tuple(sorted(piles)))


def apply_reduce(x: Position, reduced: Iterable[int], spec: GameSpec) -> Position:
    """Play the move that removes one stone from each index in `reduced`."""
    _check_length(x, spec)
    idx = sorted(set(reduced))
    if len(idx) != spec.k:
        raise IllegalMoveError(f"need exactly {spec.k} distinct indices, got {idx}")
    if idx and (idx[0] < 0 or idx[-1] >= spec.n):
        raise IllegalMoveError(f"indices {idx} out of range for n={spec.n}")
    piles = list(x.piles)
    for i in idx:
        if piles[i] == 0:
            raise IllegalMoveError(f"pile {i} is empty")
        piles[i] -= 1
    return Position(tuple(sorted(piles)))


# --- box enumeration and ranking -------------------------------------------
#
# A sorted position (x_0 <= ... <= x_{n-1}) with entries in [0, cap] maps to
# the strictly increasing sequence c_i = x_i + i, a combination of n values
# out of cap + n. Its colexicographic rank is sum_i C(c_i, i + 1); ranks do
# not depend on cap, only box membership does.


def box_size(n: int, cap: int) -> int:
    """Number of canonical n-pile positions with every entry <= cap."""
    if n < 1 or cap < 0:
        raise InvalidSpecError(f"need n >= 1 and cap >= 0, got n={n} cap={cap}")
    return math.comb(cap + n, n)


def enumerate_box(n: int, cap: int) -> Iterator[Position]:
    """Yield every canonical position of the box in colexicographic order."""
    box_size(n, cap)  # validate arguments
    piles = [0] * n
    while True:
        yield Position(tuple(piles))
        # advance the leftmost entry that can grow while staying sorted
        i = 0
        while i < n - 1 and piles[i] == piles[i + 1]:
            i += 1
        if i == n - 1 and piles[i] == cap:
            return
        piles[i] += 1
        for j in range(i):
            piles[j] = 0


def rank(x: Position, cap: int) -> int:
    """Colexicographic rank of x within the (n, cap) box."""
    if x.piles[-1] > cap:
        raise OutOfBoxError(f"entry {x.piles[-1]} exceeds cap {cap}")
    return sum(math.comb(v + i, i + 1) for i, v in enumerate(x.piles))


def decode(r: int, n: int, cap: int) -> Position:
    """Inverse of :func:`rank`: the position at rank r of the (n, cap) box."""
    total = box_size(n, cap)
    if not 0 <= r < total:
        raise OutOfBoxError(f"rank {r} outside box of size {total}")
    piles = [0] * n
    rem = r
    for i in range(n - 1, -1, -1):
        # largest c with C(c, i + 1) <= rem; entry is c - i
        c = i
        while math.comb(c + 1, i + 1) <= rem:
            c += 1
        rem -= math.comb(c, i + 1)
        piles[i] = c - i
    return Position(tuple(piles))
