"""Catalog of misere exception families, with verification against brute force.

Known exceptions organize into families. Some have closed-form descriptions
and are encoded here as parametric patterns; the rest were found by search
and are carried verbatim as fixture tables (src/slownim/fixtures). Every
family describes positions of the shape

    core entries, then a free last entry (>= core max + 1), then optional
    appended extension piles, each at least the largest pile so far.

Within that shape the predictions are uniform: the remoteness of a member is
round_up_even(v) + 1 where v is the core's largest entry, and the optimal
move keeps the last core-level pile exactly when v is even (the strict
M-rule keeps the other one of that pair).

A family record is data, not code: a few affine constraints on the entries
plus parameter ranges, interpreted by one generic generator and matcher.
`verify_family` replays a family against a solved box and reports false
positives, remoteness mismatches, and (for families claimed exhaustive)
misses; `coverage_report` asks how much of a scanned box the whole catalog
explains.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .errors import InvalidSpecError, UnknownFamilyError, UnsupportedSpecError
from .exceptions import ExceptionRecord, _exceptional_ranks, scan_box
from .game import GameSpec, Position, rank
from .mrule import round_up_even
from .solver import SolveTable, cached_table

FIXTURES_FORMAT = "slownim-families"
FIXTURES_VERSION = 1


@dataclass(frozen=True, slots=True)
class Affine:
    """Entry value a*x1 + b*i + c for family parameters x1 and i."""

    a: int
    b: int
    c: int

    def at(self, x1: int, i: int) -> int:
        return self.a * x1 + self.b * i + self.c


@dataclass(frozen=True, slots=True)
class SubPattern:
    """One core shape: fixed head entries, then one value filling to n-1.

    `plateau` may be None for families whose core length is fixed (the head
    is the whole core). Otherwise the plateau value repeats at least once.
    """

    head: tuple[Affine, ...]
    plateau: Affine | None = None


@dataclass(frozen=True, slots=True)
class TableRow:
    raw: str
    entries: tuple[int, ...]
    open_last: bool  # last entry is a lower bound, not an exact value
    r: int | None
    cleaned: bool


@dataclass(frozen=True, slots=True)
class TableColumn:
    x1: int
    n: int
    rows: tuple[TableRow, ...]


@dataclass(frozen=True, slots=True)
class Family:
    """One catalog entry. Parametric families carry sub-patterns; table
    families carry verbatim row columns. `iff_group` names the set of
    families that are jointly claimed to exhaust their region (usually just
    the family itself)."""

    id: str
    kind: str  # "parametric" or "table"
    iff_claimed: bool
    iff_group: str
    applicability: str
    x1_min: int = 0
    x1_max: int | None = None
    x1_parity: int = 0  # required x1 mod 2
    n_half: bool = False  # n = (x1 + n_add) // 2 + n_off, else n = n_off
    n_add: int = 0
    n_off: int = 0
    subpatterns: tuple[SubPattern, ...] = ()
    examples: tuple[TableColumn, ...] = ()  # printed rows, for cross-checks
    columns: tuple[TableColumn, ...] = ()

    def native_n(self, x1: int) -> int:
        if self.n_half:
            return (x1 + self.n_add) // 2 + self.n_off
        return self.n_off

    def x1_ok(self, x1: int) -> bool:
        if x1 < self.x1_min or x1 % 2 != self.x1_parity:
            return False
        return self.x1_max is None or x1 <= self.x1_max


# Core templates for the parametric families. x1 is always the smallest
# entry; i >= 0 is the ladder parameter where a shape has one.
_TEMPLATES: dict[str, dict] = {
    "F_EVEN": dict(
        x1_min=2, x1_parity=0, n_half=True, n_add=0, n_off=3,
        subpatterns=(SubPattern(head=(), plateau=Affine(1, 0, 0)),),
    ),
    "F_ONE": dict(
        x1_min=1, x1_max=1, x1_parity=1, n_half=False, n_off=3,
        subpatterns=(SubPattern(head=(Affine(0, 0, 1),), plateau=Affine(0, 1, 1)),),
    ),
    "F_N4": dict(
        x1_min=5, x1_parity=1, n_half=False, n_off=4,
        subpatterns=tuple(
            SubPattern(head=(Affine(1, 0, 0), Affine(1, 2, 0), Affine(2, 2, -4 + s)))
            for s in (0, 1)
        ),
    ),
    "F_HP2": dict(
        x1_min=3, x1_parity=1, n_half=True, n_add=1, n_off=2,
        subpatterns=(SubPattern(head=(Affine(1, 0, 0),), plateau=Affine(1, 1, 0)),),
    ),
    "F_HP1": dict(
        x1_min=5, x1_parity=1, n_half=True, n_add=1, n_off=1,
        subpatterns=tuple(
            SubPattern(
                head=(Affine(1, 0, 0), Affine(1, 2, 0)), plateau=Affine(1, 2, d)
            )
            for d in (1, 2)
        ),
    ),
    "F_H0A": dict(
        x1_min=7, x1_parity=1, n_half=True, n_add=1, n_off=0,
        subpatterns=tuple(
            SubPattern(
                head=(Affine(1, 0, 0), Affine(1, 2, 0)), plateau=Affine(1, 2, d)
            )
            for d in (3, 4)
        ),
    ),
    "F_H0B": dict(
        x1_min=9, x1_parity=1, n_half=True, n_add=1, n_off=0,
        subpatterns=tuple(
            SubPattern(
                head=(Affine(1, 0, 0), Affine(1, 2, 0), Affine(1, 2, 0)),
                plateau=Affine(1, 2, d),
            )
            for d in (1, 2)
        ),
    ),
}

_IFF_GROUPS = {"F_H0A": "h0", "F_H0B": "h0"}


def _load_fixtures() -> dict:
    text = resources.files("slownim").joinpath("fixtures/families.json").read_text()
    doc = json.loads(text)
    if doc.get("format") != FIXTURES_FORMAT or doc.get("version") != FIXTURES_VERSION:
        raise InvalidSpecError(
            f"unsupported fixtures file: format={doc.get('format')!r} "
            f"version={doc.get('version')!r}"
        )
    return doc


def _column(block: dict) -> TableColumn:
    rows = tuple(
        TableRow(
            raw=r["raw"],
            entries=tuple(r["entries"]),
            open_last=r["open"],
            r=r["r"],
            cleaned=r["cleaned"],
        )
        for r in block["rows"]
    )
    for row in rows:
        if list(row.entries) != sorted(row.entries):
            raise InvalidSpecError(f"fixture row {row.entries} is not sorted")
    return TableColumn(x1=block["x1"], n=block["n"], rows=rows)


@lru_cache(maxsize=1)
def catalog() -> tuple[Family, ...]:
    """The complete, immutable family catalog: parametric entries first."""
    doc = _load_fixtures()
    out: list[Family] = []
    for block in doc["families"]:
        fid = block["id"]
        if block["kind"] == "parametric":
            tpl = _TEMPLATES[fid]
            out.append(
                Family(
                    id=fid,
                    kind="parametric",
                    iff_claimed=block["iff"],
                    iff_group=_IFF_GROUPS.get(fid, fid),
                    applicability=block["applicability"],
                    examples=tuple(_column(c) for c in block["examples"]),
                    **tpl,
                )
            )
        else:
            out.append(
                Family(
                    id=fid,
                    kind="table",
                    iff_claimed=block["iff"],
                    iff_group=fid,
                    applicability=block["applicability"],
                    columns=tuple(_column(c) for c in block["columns"]),
                )
            )
    return tuple(out)


def family_by_id(family_id: str) -> Family:
    for f in catalog():
        if f.id == family_id:
            return f
    raise UnknownFamilyError(f"no family named {family_id!r} in the catalog")


def _norm_bounds(bounds) -> tuple[int, int]:
    """Accept maxEntry alone or (maxEntry, maxExtensions); extensions default 2."""
    if isinstance(bounds, int):
        cap, ext = bounds, 2
    else:
        seq = tuple(bounds)
        if len(seq) == 1:
            cap, ext = seq[0], 2
        elif len(seq) == 2:
            cap, ext = seq
        else:
            raise InvalidSpecError(f"bounds must be (maxEntry, maxExtensions), got {bounds!r}")
    if cap < 0 or ext < 0:
        raise InvalidSpecError(f"bounds must be non-negative, got {bounds!r}")
    return cap, ext


def _core_at(sub: SubPattern, x1: int, i: int, n: int) -> tuple[int, ...] | None:
    vals = [t.at(x1, i) for t in sub.head]
    if sub.plateau is not None:
        fill = (n - 1) - len(vals)
        if fill < 1:
            return None
        vals.extend([sub.plateau.at(x1, i)] * fill)
    if len(vals) != n - 1:
        return None
    if any(v < 0 for v in vals):
        return None
    if any(vals[j] > vals[j + 1] for j in range(len(vals) - 1)):
        return None
    return tuple(vals)


def _uses_i(sub: SubPattern) -> bool:
    terms = sub.head + ((sub.plateau,) if sub.plateau is not None else ())
    return any(t.b != 0 for t in terms)


def _solve_i(sub: SubPattern, x1: int, core: tuple[int, ...]) -> int | None:
    """Recover the ladder parameter from a candidate core, or None."""
    slots: list[tuple[int, Affine]] = list(enumerate(sub.head))
    if sub.plateau is not None and len(core) > len(sub.head):
        slots.append((len(sub.head), sub.plateau))
    for idx, term in slots:
        if term.b != 0:
            num = core[idx] - term.a * x1 - term.c
            if num % term.b != 0:
                return None
            i = num // term.b
            return i if i >= 0 else None
    return 0


def _tails(last: int, cap: int, max_ext: int) -> Iterable[tuple[int, ...]]:
    """All sorted extension suffixes: 0..max_ext piles, each in [last, cap]."""
    yield ()
    for count in range(1, max_ext + 1):
        yield from combinations_with_replacement(range(last, cap + 1), count)


def _parametric_members(f: Family, cap: int, max_ext: int) -> set[tuple[int, ...]]:
    found: set[tuple[int, ...]] = set()
    x1 = f.x1_min
    while x1 <= cap and (f.x1_max is None or x1 <= f.x1_max):
        n = f.native_n(x1)
        for sub in f.subpatterns:
            i = 0
            while True:
                core = _core_at(sub, x1, i, n)
                if core is None or core[-1] + 1 > cap:
                    break
                for last in range(core[-1] + 1, cap + 1):
                    for tail in _tails(last, cap, max_ext):
                        found.add(core + (last,) + tail)
                if not _uses_i(sub):
                    break
                i += 1
        x1 += 2
    return found


def _table_members(f: Family, cap: int, max_ext: int) -> set[tuple[int, ...]]:
    found: set[tuple[int, ...]] = set()
    for col in f.columns:
        for row in col.rows:
            prefix, lo = row.entries[:-1], row.entries[-1]
            if prefix and prefix[-1] > cap:
                continue
            lasts = range(lo, cap + 1) if row.open_last else (lo,)
            for last in lasts:
                if last > cap:
                    continue
                for tail in _tails(last, cap, max_ext):
                    found.add(prefix + (last,) + tail)
    return found


def generate_members(f: Family | str, bounds) -> list[Position]:
    """Every family member within bounds, sorted by pile count then entries.

    `bounds` is (maxEntry, maxExtensions); maxExtensions defaults to 2 when
    only maxEntry is given. Members at several pile counts are mixed in the
    result: native cores come with their free last entry instantiated over
    [min, maxEntry], and each member additionally gets up to maxExtensions
    appended piles (sorted, each at least the largest pile so far).
    """
    if isinstance(f, str):
        f = family_by_id(f)
    cap, max_ext = _norm_bounds(bounds)
    if f.kind == "parametric":
        raw = _parametric_members(f, cap, max_ext)
    else:
        raw = _table_members(f, cap, max_ext)
    return [Position(t) for t in sorted(raw, key=lambda t: (len(t), t))]


def _match(f: Family, piles: tuple[int, ...]) -> int | None:
    """Native pile count under which `piles` matches f, or None."""
    if len(piles) < 3:
        return None
    x1 = piles[0]
    if f.kind == "parametric":
        if not f.x1_ok(x1):
            return None
        n = f.native_n(x1)
        if n < 3 or len(piles) < n:
            return None
        core, last = piles[: n - 1], piles[n - 1]
        if last < core[-1] + 1:
            return None
        for sub in f.subpatterns:
            i = _solve_i(sub, x1, core)
            if i is not None and _core_at(sub, x1, i, n) == core:
                return n
        return None
    for col in f.columns:
        if col.x1 != x1 or len(piles) < col.n:
            continue
        prefix, last = piles[: col.n - 1], piles[col.n - 1]
        for row in col.rows:
            if prefix != row.entries[:-1]:
                continue
            lo = row.entries[-1]
            if (last >= lo) if row.open_last else (last == lo):
                return col.n
    return None


def membership(x: Position) -> list[str]:
    """Identifiers of every catalog family x belongs to (catalog order)."""
    return [f.id for f in catalog() if _match(f, x.piles) is not None]


def _first_match(x: Position) -> tuple[Family, int]:
    for f in catalog():
        n = _match(f, x.piles)
        if n is not None:
            return f, n
    raise UnknownFamilyError(f"position {x} matches no catalog family")


def predicted_remoteness(x: Position) -> int:
    """Family-predicted remoteness: round_up_even of the core max, plus one.

    The core max is the second-largest entry at the matched family's native
    pile count, so the prediction is unchanged by raising the free last
    entry or appending extension piles.
    """
    _, native = _first_match(x)
    return round_up_even(x.piles[native - 2]) + 1


def predicted_keep(x: Position) -> tuple[int, int]:
    """Family-predicted (optimal keep, M-rule keep) index pair.

    With v the core max at index native-2: the optimal move keeps the last
    core-level pile (index native-1) when v is even and keeps v itself when
    v is odd; the strict M-rule keeps the other one of the pair.
    """
    _, native = _first_match(x)
    v = x.piles[native - 2]
    if v % 2 == 0:
        return native - 1, native - 2
    return native - 2, native - 1


def tag_records(records: Iterable[ExceptionRecord]) -> list[ExceptionRecord]:
    """Fill each record's family id list via membership."""
    return [rec.with_families(membership(rec.position)) for rec in records]


# --- verification -------------------------------------------------------------


@dataclass(frozen=True)
class FamilyReport:
    """Outcome of replaying one family against a solved box.

    `misses` is None for families without an exhaustiveness claim; for
    claimed families it lists region exceptions that no family in the same
    iff-group generates.
    """

    family_id: str
    box: tuple[int, int, str]  # (n, cap, version)
    members_checked: int
    true_positives: int
    false_positives: tuple[Position, ...]
    misses: tuple[Position, ...] | None
    remoteness_mismatches: tuple[tuple[Position, int, int], ...]

    @property
    def ok(self) -> bool:
        """No false positives and no remoteness mismatches (misses warn only)."""
        return not self.false_positives and not self.remoteness_mismatches

    def to_dict(self) -> dict:
        return {
            "familyId": self.family_id,
            "box": {"n": self.box[0], "cap": self.box[1], "version": self.box[2]},
            "membersChecked": self.members_checked,
            "truePositives": self.true_positives,
            "falsePositives": [list(p.piles) for p in self.false_positives],
            "misses": None if self.misses is None else [list(p.piles) for p in self.misses],
            "remotenessMismatches": [
                {"piles": list(p.piles), "predicted": pred, "oracle": got}
                for p, pred, got in self.remoteness_mismatches
            ],
        }


def _in_region(f: Family, piles: tuple[int, ...], n: int, minimal: bool) -> bool:
    """Does an oracle exception fall under f's exhaustiveness claim?"""
    x1 = piles[0]
    if f.id == "F_EVEN":
        return x1 % 2 == 0
    if f.id == "F_ONE":
        return n == 3
    # remaining claims are about minimal exceptions at their native n
    return minimal and f.x1_ok(x1) and f.native_n(x1) == n


def verify_family(
    f: Family | str,
    spec: GameSpec,
    bounds,
    *,
    table: SolveTable | None = None,
) -> FamilyReport:
    """Replay one family against brute force over the (spec.n, maxEntry) box.

    Generated members with spec.n piles are checked for being oracle
    exceptions (false positives otherwise) and for predicted versus exact
    remoteness. For families claimed exhaustive, oracle exceptions in the
    family's region that the family's iff-group fails to generate are
    reported as misses.
    """
    if isinstance(f, str):
        f = family_by_id(f)
    if spec.k != spec.n - 1:
        raise UnsupportedSpecError("family verification requires k = n - 1")
    cap, max_ext = _norm_bounds(bounds)
    if table is None:
        table = cached_table(spec, cap)
    exc_ranks, _ = _exceptional_ranks(table)
    exc_set = set(int(r) for r in exc_ranks)

    members = [m for m in generate_members(f, (cap, max_ext)) if m.n == spec.n]
    true_pos = 0
    false_pos: list[Position] = []
    mismatches: list[tuple[Position, int, int]] = []
    for m in members:
        if rank(m, cap) in exc_set:
            true_pos += 1
            pred = predicted_remoteness(m)
            got = table.remoteness_of(m)
            if pred != got:
                mismatches.append((m, pred, got))
        else:
            false_pos.append(m)

    misses: tuple[Position, ...] | None = None
    if f.iff_claimed:
        group = [g for g in catalog() if g.iff_group == f.iff_group]
        generated: set[tuple[int, ...]] = set()
        for g in group:
            generated.update(
                m.piles for m in generate_members(g, (cap, max_ext)) if m.n == spec.n
            )
        missing = []
        for rec in scan_box(spec, cap, table=table):
            piles = rec.position.piles
            if piles in generated:
                continue
            if any(_in_region(g, piles, spec.n, rec.minimal) for g in group):
                missing.append(rec.position)
        misses = tuple(missing)

    return FamilyReport(
        family_id=f.id,
        box=(spec.n, cap, spec.version.value),
        members_checked=len(members),
        true_positives=true_pos,
        false_positives=tuple(false_pos),
        misses=misses,
        remoteness_mismatches=tuple(mismatches),
    )


def applicable_boxes(f: Family | str, cap: int) -> list[int]:
    """Pile counts at which the family has native members within a cap."""
    if isinstance(f, str):
        f = family_by_id(f)
    if f.kind == "table":
        return sorted({col.n for col in f.columns if col.rows[0].entries[-1] <= cap})
    ns = set()
    x1 = f.x1_min
    while x1 <= cap and (f.x1_max is None or x1 <= f.x1_max):
        n = f.native_n(x1)
        for sub in f.subpatterns:
            core = _core_at(sub, x1, 0, n)
            if core is not None and core[-1] + 1 <= cap:
                ns.add(n)
        x1 += 2
    return sorted(ns)


# --- coverage ------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    """How much of a scanned box the catalog explains.

    Coverage is a conjecture, not a theorem, so gaps are data rather than
    failures: `uncovered` lists minimal exceptions matching no family, and
    `uncovered_derived` the non-minimal ones.
    """

    box: tuple[int, int, str]
    total_exceptions: int
    minimal_exceptions: int
    by_family: dict[str, int]
    uncovered: tuple[Position, ...]
    uncovered_derived: tuple[Position, ...]
    unused_families: tuple[str, ...]

    @property
    def fully_covered(self) -> bool:
        return not self.uncovered and not self.uncovered_derived

    def to_dict(self) -> dict:
        return {
            "box": {"n": self.box[0], "cap": self.box[1], "version": self.box[2]},
            "totalExceptions": self.total_exceptions,
            "minimalExceptions": self.minimal_exceptions,
            "byFamily": dict(self.by_family),
            "uncovered": [list(p.piles) for p in self.uncovered],
            "uncoveredDerived": [list(p.piles) for p in self.uncovered_derived],
            "unusedFamilies": list(self.unused_families),
        }


def coverage_report(
    spec: GameSpec,
    cap: int,
    *,
    table: SolveTable | None = None,
    records: Sequence[ExceptionRecord] | None = None,
) -> CoverageReport:
    """Match every exception of the box against the catalog.

    Pass `records` to reuse an existing scan of the same box; otherwise the
    box is scanned here (building or reusing a cached table).
    """
    if spec.k != spec.n - 1:
        raise UnsupportedSpecError("coverage requires k = n - 1")
    if records is None:
        records = scan_box(spec, cap, table=table)
    counts = {f.id: 0 for f in catalog()}
    uncovered: list[Position] = []
    uncovered_derived: list[Position] = []
    minimal_total = 0
    for rec in records:
        fams = membership(rec.position)
        for fid in fams:
            counts[fid] += 1
        if rec.minimal:
            minimal_total += 1
        if not fams:
            (uncovered if rec.minimal else uncovered_derived).append(rec.position)
    unused = tuple(fid for fid, c in counts.items() if c == 0)
    return CoverageReport(
        box=(spec.n, cap, spec.version.value),
        total_exceptions=len(records),
        minimal_exceptions=minimal_total,
        by_family=counts,
        uncovered=tuple(uncovered),
        uncovered_derived=tuple(uncovered_derived),
        unused_families=unused,
    )
