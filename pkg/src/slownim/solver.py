"""Smith remoteness solver for exact slow NIM.

Remoteness refines win/loss: R(x) is the number of moves the game lasts when
the winner hurries and the loser stalls, both playing perfectly. Terminal
positions score 0 under normal play and 1 under misere play (so that odd
remoteness always means the player to move wins); elsewhere

    R(x) = 1 + min{R(y) : y successor, R(y) even}   if such y exists,
    R(x) = 1 + max{R(y) : y successor}              otherwise.

Two evaluation routes are provided and cross-checked by the test suite: a
memoized per-position recursion (explicit work stack, no call-stack limits)
and a dense table filled retrograde over whole enumeration boxes. Each move
removes exactly k stones, so positions of pile-sum s depend only on pile-sum
s - k, and the table can be filled level by level with vectorized batches.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import (
    CorruptTableError,
    InvalidPositionError,
    NoMovesError,
    OutOfBoxError,
    ResourceLimitError,
    UnsupportedSpecError,
)
from .game import (
    GameSpec,
    MoveChoice,
    Position,
    Version,
    apply_keep,
    box_size,
    enumerate_box,
    is_terminal,
    rank,
    successor_piles,
    successors,
)

DEFAULT_MAX_POSITIONS = 20_000_000


class Winner(str, Enum):
    """Perfect-play outcome for the player about to move."""

    NEXT = "N"
    PREVIOUS = "P"


@dataclass(frozen=True, slots=True)
class SolveRecord:
    """Full verdict for one position."""

    position: Position
    remoteness: int
    winner: Winner
    optimal_keeps: tuple[int, ...] | None  # kept indices, k = n-1 only
    sg: int | None = None  # normal play only

    def to_json(self) -> str:
        return json.dumps(
            {
                "piles": list(self.position.piles),
                "remoteness": self.remoteness,
                "winner": self.winner.value,
            },
            separators=(",", ":"),
        )


# Shared per-spec memo maps. Values are written exactly once and never
# mutated, so concurrent readers are safe.
_memos: dict[GameSpec, dict[tuple[int, ...], int]] = {}
_sg_memos: dict[tuple[int, int], dict[tuple[int, ...], int]] = {}


def clear_memos() -> None:
    """Drop all cached per-position values (mainly for tests)."""
    _memos.clear()
    _sg_memos.clear()
    cached_table.cache_clear()


def _base(spec: GameSpec) -> int:
    return 1 if spec.misere else 0


def remoteness(x: Position, spec: GameSpec) -> int:
    """Smith remoteness of x. Memoized; repeat calls are dictionary lookups."""
    if x.n != spec.n:
        raise InvalidPositionError(f"position has {x.n} piles but spec.n = {spec.n}")
    memo = _memos.setdefault(spec, {})
    got = memo.get(x.piles)
    if got is not None:
        return got
    base = _base(spec)
    k = spec.k
    stack = [x.piles]
    while stack:
        piles = stack[-1]
        if piles in memo:
            stack.pop()
            continue
        succs = successor_piles(piles, k)
        if not succs:
            memo[piles] = base
            stack.pop()
            continue
        pending = [s for s in succs if s not in memo]
        if pending:
            stack.extend(pending)
            continue
        vals = [memo[s] for s in succs]
        evens = [v for v in vals if v % 2 == 0]
        memo[piles] = 1 + (min(evens) if evens else max(vals))
        stack.pop()
    return memo[x.piles]


def winner(x: Position, spec: GameSpec) -> Winner:
    """N when the player to move wins; equivalently, remoteness is odd."""
    return Winner.NEXT if remoteness(x, spec) % 2 == 1 else Winner.PREVIOUS


def optimal_moves(x: Position, spec: GameSpec) -> list[tuple[MoveChoice, Position]]:
    """All moves to successors with remoteness exactly R(x) - 1.

    Winning positions shorten the game along these moves; losing positions
    resist longest. Every non-terminal position has at least one.
    """
    if is_terminal(x, spec):
        raise NoMovesError(f"position {x} is terminal")
    target = remoteness(x, spec) - 1
    return [(mv, y) for mv, y in successors(x, spec) if remoteness(y, spec) == target]


def optimal_keep_indices(x: Position, spec: GameSpec) -> tuple[int, ...]:
    """Every kept index whose keep-move reaches remoteness R(x) - 1.

    Unlike :func:`optimal_moves` this does not merge duplicate successors:
    all tied indices are reported. Requires k = n - 1.
    """
    if spec.k != spec.n - 1:
        raise UnsupportedSpecError("optimal_keep_indices requires k = n - 1")
    if is_terminal(x, spec):
        raise NoMovesError(f"position {x} is terminal")
    target = remoteness(x, spec) - 1
    zeros = sum(1 for v in x.piles if v == 0)
    out = []
    for j in range(spec.n):
        if zeros - (1 if x.piles[j] == 0 else 0) > 0:
            continue  # keeping j would reduce some other empty pile
        if remoteness(apply_keep(x, j, spec), spec) == target:
            out.append(j)
    return tuple(out)


def sg_value(x: Position, spec: GameSpec) -> int:
    """Sprague-Grundy value under normal play (mex over successors)."""
    if spec.misere:
        raise UnsupportedSpecError("Sprague-Grundy values are defined for normal play")
    if x.n != spec.n:
        raise InvalidPositionError(f"position has {x.n} piles but spec.n = {spec.n}")
    memo = _sg_memos.setdefault((spec.n, spec.k), {})
    got = memo.get(x.piles)
    if got is not None:
        return got
    k = spec.k
    stack = [x.piles]
    while stack:
        piles = stack[-1]
        if piles in memo:
            stack.pop()
            continue
        succs = successor_piles(piles, k)
        pending = [s for s in succs if s not in memo]
        if pending:
            stack.extend(pending)
            continue
        seen = {memo[s] for s in succs}
        g = 0
        while g in seen:
            g += 1
        memo[piles] = g
        stack.pop()
    return memo[x.piles]


def solve(x: Position, spec: GameSpec, *, with_sg: bool = False) -> SolveRecord:
    """Bundle remoteness, winner, optimal keeps, and optionally the SG value."""
    r = remoteness(x, spec)
    keeps: tuple[int, ...] | None = None
    if spec.k == spec.n - 1 and not is_terminal(x, spec):
        keeps = optimal_keep_indices(x, spec)
    g = sg_value(x, spec) if with_sg and not spec.misere else None
    return SolveRecord(
        position=x,
        remoteness=r,
        winner=Winner.NEXT if r % 2 else Winner.PREVIOUS,
        optimal_keeps=keeps,
        sg=g,
    )


# --- dense tables -----------------------------------------------------------


def positions_array(n: int, cap: int) -> np.ndarray:
    """All canonical positions of the (n, cap) box, one row per rank.

    Built level by level on the last entry: in colexicographic order the
    positions whose maximum is <= v form a prefix, so the n-pile array is a
    concatenation of capped (n-1)-pile prefixes with a constant column.
    """
    arr = np.arange(cap + 1, dtype=np.int16).reshape(-1, 1)
    for j in range(2, n + 1):
        total = box_size(j, cap)
        out = np.empty((total, j), dtype=np.int16)
        at = 0
        for v in range(cap + 1):
            rows = box_size(j - 1, v)
            out[at : at + rows, : j - 1] = arr[:rows]
            out[at : at + rows, j - 1] = v
            at += rows
        arr = out
    return arr


def _binom_lut(n: int, cap: int) -> np.ndarray:
    """Pascal table C(v, t) for v <= cap + n, t <= n + 1."""
    vmax, tmax = cap + n + 1, n + 2
    lut = np.zeros((vmax, tmax), dtype=np.int64)
    lut[:, 0] = 1
    for v in range(1, vmax):
        lut[v, 1:] = lut[v - 1, 1:] + lut[v - 1, :-1]
    return lut


def _rank_rows(y: np.ndarray, lut: np.ndarray) -> np.ndarray:
    """Vectorized colexicographic ranks of sorted rows."""
    n = y.shape[1]
    r = np.zeros(len(y), dtype=np.int64)
    for t in range(n):
        r += lut[y[:, t].astype(np.int64) + t, t + 1]
    return r


@dataclass
class SolveTable:
    """Dense remoteness for every position of one enumeration box.

    `values[r]` is the remoteness of the position of colexicographic rank r.
    """

    spec: GameSpec
    cap: int
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def remoteness_at(self, r: int) -> int:
        if not 0 <= r < len(self.values):
            raise OutOfBoxError(f"rank {r} outside table of size {len(self.values)}")
        return int(self.values[r])

    def remoteness_of(self, x: Position) -> int:
        if x.n != self.spec.n:
            raise InvalidPositionError(f"position has {x.n} piles but table.n = {self.spec.n}")
        return int(self.values[rank(x, self.cap)])

    def winner_of(self, x: Position) -> Winner:
        return Winner.NEXT if self.remoteness_of(x) % 2 else Winner.PREVIOUS

    def record(self, x: Position) -> SolveRecord:
        """Solve one position from table lookups alone."""
        r = self.remoteness_of(x)
        keeps: tuple[int, ...] | None = None
        spec = self.spec
        if spec.k == spec.n - 1 and not is_terminal(x, spec):
            zeros = sum(1 for v in x.piles if v == 0)
            found = []
            for j in range(spec.n):
                if zeros - (1 if x.piles[j] == 0 else 0) > 0:
                    continue
                if self.remoteness_of(apply_keep(x, j, spec)) == r - 1:
                    found.append(j)
            keeps = tuple(found)
        return SolveRecord(
            position=x,
            remoteness=r,
            winner=Winner.NEXT if r % 2 else Winner.PREVIOUS,
            optimal_keeps=keeps,
        )

    def iter_records(self) -> Iterator[SolveRecord]:
        """Records in rank order, without per-position keep analysis."""
        for pos, val in zip(enumerate_box(self.spec.n, self.cap), self.values):
            r = int(val)
            yield SolveRecord(
                position=pos,
                remoteness=r,
                winner=Winner.NEXT if r % 2 else Winner.PREVIOUS,
                optimal_keeps=None,
            )


def _solve_level(
    pos: np.ndarray,
    rows: np.ndarray,
    values: np.ndarray,
    subsets: list[tuple[int, ...]],
    lut: np.ndarray,
) -> None:
    """Fill `values[rows]` assuming every smaller pile-sum level is done."""
    big = np.int32(1 << 30)
    x = pos[rows]
    min_even = np.full(len(rows), big, dtype=np.int32)
    max_all = np.full(len(rows), -1, dtype=np.int32)
    for s in subsets:
        cols = list(s)
        legal = (x[:, cols] > 0).all(axis=1)
        y = x.copy()
        y[:, cols] -= 1
        np.clip(y, 0, None, out=y)  # illegal rows only; masked out below
        y.sort(axis=1)
        vals = values[_rank_rows(y, lut)].astype(np.int32)
        vals[~legal] = -1
        even = legal & (vals % 2 == 0)
        min_even = np.where(even, np.minimum(min_even, vals), min_even)
        np.maximum(max_all, vals, out=max_all)
    values[rows] = (1 + np.where(min_even < big, min_even, max_all)).astype(values.dtype)


def build_table(
    spec: GameSpec,
    cap: int,
    *,
    threads: int = 1,
    max_positions: int = DEFAULT_MAX_POSITIONS,
) -> SolveTable:
    """Solve the whole (spec.n, cap) box retrograde by pile-sum level.

    Results are identical to per-position :func:`remoteness` calls and do not
    depend on `threads`; workers only split rows within one level.
    """
    n, k = spec.n, spec.k
    count = box_size(n, cap)
    if count > max_positions:
        raise ResourceLimitError(
            f"box n={n} cap={cap} holds {count} positions, over the {max_positions} budget"
        )
    pos = positions_array(n, cap)
    lut = _binom_lut(n, cap)
    subsets = list(itertools.combinations(range(n), k))
    values = np.zeros(count, dtype=np.uint16)
    nonzero = (pos > 0).sum(axis=1)
    terminal = nonzero < k
    values[terminal] = _base(spec)

    sums = pos.sum(axis=1, dtype=np.int32)
    order = np.argsort(sums, kind="stable")
    ordered_sums = sums[order]
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for level in range(k, n * cap + 1):
            lo = np.searchsorted(ordered_sums, level, "left")
            hi = np.searchsorted(ordered_sums, level, "right")
            rows = order[lo:hi]
            rows = rows[~terminal[rows]]
            if rows.size == 0:
                continue
            if executor is not None and rows.size >= 4096:
                chunks = np.array_split(rows, threads)
                futures = [
                    executor.submit(_solve_level, pos, c, values, subsets, lut)
                    for c in chunks
                    if c.size
                ]
                for f in futures:
                    f.result()
            else:
                _solve_level(pos, rows, values, subsets, lut)
    finally:
        if executor is not None:
            executor.shutdown()
    return SolveTable(spec=spec, cap=cap, values=values)


@lru_cache(maxsize=16)
def cached_table(spec: GameSpec, cap: int) -> SolveTable:
    """Process-wide table cache shared by scans and family verification."""
    return build_table(spec, cap)


# --- table files ------------------------------------------------------------
#
# Layout (little-endian): 8-byte magic "SLOWNIM1"; header of n, k, version
# (0 normal / 1 misere), cap as uint16 and count as uint64; count remoteness
# values as uint16 in rank order; 8-byte keyed-hash checksum of everything
# before it.

_MAGIC = b"SLOWNIM1"
_HEADER = struct.Struct("<HHHHQ")


def _checksum(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=8).digest()


def save_table(table: SolveTable, dest: str | Path) -> None:
    """Write the table in the binary interchange format."""
    spec = table.spec
    header = _HEADER.pack(
        spec.n, spec.k, 1 if spec.misere else 0, table.cap, len(table.values)
    )
    body = _MAGIC + header + table.values.astype("<u2").tobytes()
    Path(dest).write_bytes(body + _checksum(body))


def load_table(
    src: str | Path, *, spec: GameSpec | None = None, cap: int | None = None
) -> SolveTable:
    """Read a table file, validating structure, checksum, and expectations.

    Pass `spec`/`cap` to assert what the file must contain; a mismatch is
    reported as corruption, exactly like a damaged header.
    """
    data = Path(src).read_bytes()
    head_len = len(_MAGIC) + _HEADER.size
    if len(data) < head_len + 8:
        raise CorruptTableError(f"{src}: file too short ({len(data)} bytes)")
    if data[: len(_MAGIC)] != _MAGIC:
        raise CorruptTableError(f"{src}: bad magic {data[:8]!r}")
    n, k, ver, file_cap, count = _HEADER.unpack(data[len(_MAGIC) : head_len])
    expected = head_len + 2 * count + 8
    if len(data) != expected:
        raise CorruptTableError(f"{src}: expected {expected} bytes, found {len(data)}")
    if _checksum(data[:-8]) != data[-8:]:
        raise CorruptTableError(f"{src}: checksum mismatch")
    if ver not in (0, 1) or not 1 <= k <= n:
        raise CorruptTableError(f"{src}: nonsense header n={n} k={k} version={ver}")
    if count != box_size(n, file_cap):
        raise CorruptTableError(
            f"{src}: count {count} does not match box n={n} cap={file_cap}"
        )
    file_spec = GameSpec(n, k, Version.MISERE if ver else Version.NORMAL)
    if spec is not None and spec != file_spec:
        raise CorruptTableError(f"{src}: holds {file_spec}, expected {spec}")
    if cap is not None and cap != file_cap:
        raise CorruptTableError(f"{src}: holds cap {file_cap}, expected cap {cap}")
    values = np.frombuffer(data[head_len:-8], dtype="<u2").astype(np.uint16)
    return SolveTable(spec=file_spec, cap=file_cap, values=values)


def export_jsonl(table: SolveTable, dest: str | Path) -> int:
    """Write one JSON object per rank; returns the number of lines."""
    with open(dest, "w", encoding="utf-8") as fh:
        n = 0
        for rec in table.iter_records():
            fh.write(rec.to_json())
            fh.write("\n")
            n += 1
    return n


def export_csv(table: SolveTable, dest: str | Path) -> int:
    """Write rank-ordered rows of piles, remoteness, winner."""
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["piles", "remoteness", "winner"])
        n = 0
        for rec in table.iter_records():
            out.writerow([str(rec.position), rec.remoteness, rec.winner.value])
            n += 1
    return n
