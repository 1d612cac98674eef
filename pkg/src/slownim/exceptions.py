"""Detection and audit of M-rule exceptions.

Under normal play the strict M-rule is optimal: every M-move steps the Smith
remoteness down by exactly one. Under misere play that almost always holds
too; a position where it fails, i.e.

    R(x) - R(M-successor of x) != 1,

is called an exception. This module finds exceptions in enumeration boxes,
diagnoses them (remoteness gap, optimal keeps versus the M-keep, minimal
core), checks the structural properties shared by all known minimal
exceptions, and verifies that appending piles preserves exception status.

Keep-indices in records refer to the canonical sorted position and are
0-based; when several indices hold the same pile size the largest index is
reported, matching the strict M-rule's own tie-break.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from itertools import combinations_with_replacement
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import (
    InvalidPositionError,
    NoMovesError,
    NotAnExceptionError,
    UnsupportedSpecError,
)
from .game import GameSpec, Position, Version, is_terminal
from .mrule import m_keep_index, m_move, round_up_even
from .solver import (
    SolveTable,
    _binom_lut,
    _rank_rows,
    build_table,
    cached_table,
    optimal_keep_indices,
    positions_array,
    remoteness,
)


@dataclass(frozen=True, slots=True)
class ExceptionRecord:
    """One diagnosed exception."""

    position: Position
    version: Version
    r: int
    r_prime: int  # remoteness of the M-successor
    delta: int  # r - r_prime; anything but 1 is exceptional
    optimal_keeps: tuple[int, ...]
    m_keep: int
    minimal: bool
    family_ids: tuple[str, ...] = ()

    def to_json(self) -> str:
        return json.dumps(
            {
                "piles": list(self.position.piles),
                "version": self.version.value,
                "R": self.r,
                "Rprime": self.r_prime,
                "delta": self.delta,
                "optimalKeeps": list(self.optimal_keeps),
                "mKeep": self.m_keep,
                "minimal": self.minimal,
                "families": list(self.family_ids),
            },
            separators=(",", ":"),
        )

    def with_families(self, ids: Iterable[str]) -> "ExceptionRecord":
        return replace(self, family_ids=tuple(ids))


def _require_keep_spec(spec: GameSpec) -> None:
    if spec.k != spec.n - 1:
        raise UnsupportedSpecError("exception analysis requires k = n - 1")


def _r(x: Position, spec: GameSpec, table: SolveTable | None) -> int:
    if table is not None and x.piles[-1] <= table.cap:
        return table.remoteness_of(x)
    return remoteness(x, spec)


def is_exception(x: Position, spec: GameSpec, *, table: SolveTable | None = None) -> bool:
    """True when the strict M-move fails to reduce remoteness by exactly one.

    Terminal positions have no M-move and are never exceptions.
    """
    _require_keep_spec(spec)
    if is_terminal(x, spec):
        return False
    succ = m_move(x, spec).successor
    return _r(x, spec, table) - _r(succ, spec, table) != 1


def _collapse_ties(piles: tuple[int, ...], indices: Sequence[int]) -> tuple[int, ...]:
    """Keep only the largest index for each distinct kept pile size."""
    best: dict[int, int] = {}
    for j in indices:
        v = piles[j]
        best[v] = max(best.get(v, -1), j)
    return tuple(sorted(best.values()))


def _optimal_keeps_via(x: Position, spec: GameSpec, table: SolveTable | None) -> tuple[int, ...]:
    if table is None:
        return optimal_keep_indices(x, spec)
    rec = table.record(x)
    assert rec.optimal_keeps is not None
    return rec.optimal_keeps


def diagnose(
    x: Position,
    spec: GameSpec,
    *,
    table: SolveTable | None = None,
    check_minimal: bool = True,
) -> ExceptionRecord:
    """Full exception report for x; raises NotAnExceptionError otherwise.

    Family tags are left empty here; the families module fills them in.
    """
    _require_keep_spec(spec)
    if is_terminal(x, spec):
        raise NoMovesError(f"position {x} is terminal")
    out = m_move(x, spec)
    r = _r(x, spec, table)
    r_prime = _r(out.successor, spec, table)
    delta = r - r_prime
    if delta == 1:
        raise NotAnExceptionError(f"the M-move is optimal at {x}")
    keeps = _collapse_ties(x.piles, _optimal_keeps_via(x, spec, table))
    minimal = _is_minimal(x, spec, table) if check_minimal else False
    return ExceptionRecord(
        position=x,
        version=spec.version,
        r=r,
        r_prime=r_prime,
        delta=delta,
        optimal_keeps=keeps,
        m_keep=out.kept_index,
        minimal=minimal,
    )


def _is_minimal(x: Position, spec: GameSpec, table: SolveTable | None) -> bool:
    """True when x is not derived from a smaller exception.

    Known exceptions generate further ones two ways: appending piles on the
    right, and raising the largest pile. A record is flagged minimal only if
    neither reduction (dropping to a proper prefix, or lowering the largest
    pile by one) lands on an exception, so the flag marks the roots of the
    construction rather than every prefix-irreducible position.
    """
    if x.n < 3:
        return False
    piles = x.piles
    if piles[-1] > piles[-2] + 1:
        lowered = Position(piles[:-1] + (piles[-1] - 1,))
        if is_exception(lowered, spec, table=table):
            return False
    return _shortest_core_length(x, spec, table) == x.n


def _shortest_core_length(x: Position, spec: GameSpec, table: SolveTable | None) -> int:
    """Length of the shortest exceptional prefix (full length if none shorter)."""
    for j in range(3, x.n):
        prefix = Position(x.piles[:j])
        sub = GameSpec(j, j - 1, spec.version)
        if is_exception(prefix, sub):
            return j
    full_table = table if x.n == spec.n else None
    if is_exception(x, spec, table=full_table):
        return x.n
    raise NotAnExceptionError(f"{x} is not an exception")


def minimal_core(x: Position, spec: GameSpec) -> Position:
    """Shortest exceptional prefix of x (length >= 3); x must be an exception.

    Dropping the largest pile shortens the game spec with it: the prefix of
    length j is judged under the (j, j-1) rules.
    """
    _require_keep_spec(spec)
    j = _shortest_core_length(x, spec, None)
    return Position(x.piles[:j])


# --- box scans ---------------------------------------------------------------


def _exceptional_ranks(table: SolveTable) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized pass over a box: ranks of exceptions and their deltas."""
    spec, cap = table.spec, table.cap
    n = spec.n
    pos = positions_array(n, cap)
    lut = _binom_lut(n, cap)
    values = table.values.astype(np.int32)

    nonterminal = (pos > 0).sum(axis=1) >= spec.k
    even = pos % 2 == 0
    has_even = even.any(axis=1)
    big = np.int16(cap + 1)
    min_even = np.where(even, pos, big).min(axis=1)
    keep = np.zeros(len(pos), dtype=np.int64)
    for t in range(n):  # ascending overwrite leaves the largest tied index
        keep[even[:, t] & (pos[:, t] == min_even)] = t
    keep[~has_even] = n - 1

    succ = pos - 1
    succ[np.arange(len(pos)), keep] += 1
    np.clip(succ, 0, None, out=succ)  # terminal rows only; masked below
    succ.sort(axis=1)
    delta = values - values[_rank_rows(succ, lut)]
    hits = nonterminal & (delta != 1)
    return np.nonzero(hits)[0], delta


def scan_box(
    spec: GameSpec,
    cap: int,
    *,
    threads: int = 1,
    table: SolveTable | None = None,
) -> list[ExceptionRecord]:
    """Diagnose every exception in the (spec.n, cap) box, in rank order.

    `threads` only parallelizes the underlying table build; the result is
    byte-for-byte identical for any thread count.
    """
    _require_keep_spec(spec)
    if table is None:
        table = build_table(spec, cap, threads=threads) if threads > 1 else cached_table(spec, cap)
    ranks, _ = _exceptional_ranks(table)
    pos = positions_array(spec.n, cap)
    out = []
    for r in ranks:
        x = Position(tuple(int(v) for v in pos[r]))
        out.append(diagnose(x, spec, table=table))
    return out


def write_jsonl(records: Iterable[ExceptionRecord], dest: IO[str]) -> int:
    """Serialize records one JSON object per line; returns the line count."""
    n = 0
    for rec in records:
        dest.write(rec.to_json())
        dest.write("\n")
        n += 1
    return n


# --- structural properties of minimal exceptions -----------------------------


@dataclass
class PropertyResult:
    passed: int = 0
    failed: int = 0
    violations: list[Position] = field(default_factory=list)


@dataclass
class PropertyReport:
    """Outcome of :func:`check_properties` over a batch of records."""

    total: int
    results: dict[str, PropertyResult]

    @property
    def all_pass(self) -> bool:
        return all(r.failed == 0 for r in self.results.values())

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "properties": {
                name: {
                    "passed": res.passed,
                    "failed": res.failed,
                    "violations": [list(p.piles) for p in res.violations[:20]],
                }
                for name, res in self.results.items()
            },
        }


PROPERTY_NAMES = (
    "gap_is_one",
    "remoteness_value",
    "remoteness_odd",
    "delta_by_parity",
    "keep_pair",
    "move_sets_disjoint",
)


def check_properties(records: Iterable[ExceptionRecord]) -> PropertyReport:
    """Audit the regularities every known minimal exception satisfies.

    For a minimal exception on piles (x_1 <= ... <= x_n) with second-largest
    entry v = x_{n-1}:

    * gap_is_one:          x_n - v = 1
    * remoteness_value:    R = round_up_even(v) + 1
    * remoteness_odd:      R is odd
    * delta_by_parity:     delta is 0 or 2, and 0 exactly when v is even
    * keep_pair:           the optimal move keeps x_n when v is even and
                           x_{n-1} when v is odd; the M-move keeps the other
    * move_sets_disjoint:  the M-keep is never an optimal keep

    Records are taken at face value (pass the minimal ones); every failure is
    counted and the offending positions listed.
    """
    results = {name: PropertyResult() for name in PROPERTY_NAMES}
    total = 0

    def judge(name: str, ok: bool, pos: Position) -> None:
        res = results[name]
        if ok:
            res.passed += 1
        else:
            res.failed += 1
            res.violations.append(pos)

    for rec in records:
        total += 1
        piles = rec.position.piles
        n = len(piles)
        v = piles[-2]
        judge("gap_is_one", piles[-1] - v == 1, rec.position)
        judge("remoteness_value", rec.r == round_up_even(v) + 1, rec.position)
        judge("remoteness_odd", rec.r % 2 == 1, rec.position)
        judge(
            "delta_by_parity",
            rec.delta in (0, 2) and (rec.delta == 0) == (v % 2 == 0),
            rec.position,
        )
        if v % 2 == 0:
            keep_ok = rec.optimal_keeps == (n - 1,) and rec.m_keep == n - 2
        else:
            keep_ok = rec.optimal_keeps == (n - 2,) and rec.m_keep == n - 1
        judge("keep_pair", keep_ok, rec.position)
        judge("move_sets_disjoint", rec.m_keep not in rec.optimal_keeps, rec.position)
    return PropertyReport(total=total, results=results)


# --- monotone extensions ------------------------------------------------------


def verify_monotone_extension(
    core: Position,
    spec: GameSpec,
    extensions: int = 2,
    cap: int | None = None,
) -> bool:
    """Check that appending piles to an exception preserves it.

    Every extension of `core` by 1..`extensions` piles, each at least the
    current largest pile and at most `cap`, must itself be an exception (for
    the correspondingly enlarged spec), and its optimal keep-indices among
    the original n piles must coincide with the core's.
    """
    _require_keep_spec(spec)
    if cap is None:
        cap = core.piles[-1] + extensions
    n = core.n
    base_keeps = set(optimal_keep_indices(core, spec))
    lo = core.piles[-1]
    if lo > cap:
        raise InvalidPositionError(f"cap {cap} below the core's largest pile {lo}")
    for extra in range(1, extensions + 1):
        big_spec = GameSpec(n + extra, n + extra - 1, spec.version)
        for tail in combinations_with_replacement(range(lo, cap + 1), extra):
            ext = Position(core.piles + tail)
            if not is_exception(ext, big_spec):
                return False
            keeps = set(optimal_keep_indices(ext, big_spec))
            if {j for j in keeps if j < n} != base_keeps:
                return False
    return True
