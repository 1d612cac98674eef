"""Command line front end.

Subcommands: solve one position, scan a box for exceptions, build and save
tables, export solved boxes, verify families and coverage, play against the
engine, and inspect the table cache. Every subcommand is deterministic for a
fixed invocation: outputs are ordered by position rank and never depend on
thread count or timing.

Exit codes: 0 success, 1 verification failure (bad table file, or a family
with false positives or remoteness mismatches), 2 usage error, 3 resource
limit.

Set SLOWNIM_CACHE_DIR to persist solved tables between runs; scans and
verifications then load matching tables instead of rebuilding them.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import families as fam
from .errors import (
    CorruptTableError,
    IllegalMoveError,
    ResourceLimitError,
    SlowNimError,
)
from .exceptions import diagnose, scan_box, write_jsonl
from .game import (
    GameSpec,
    Position,
    apply_keep,
    apply_reduce,
    is_terminal,
    rank,
    successors,
)
from .mrule import m_move
from .plots import plot_coverage, plot_scan, plot_verify
from .solver import (
    Winner,
    build_table,
    export_csv,
    export_jsonl,
    load_table,
    optimal_keep_indices,
    remoteness,
    save_table,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _cache_dir() -> Path | None:
    raw = os.environ.get("SLOWNIM_CACHE_DIR")
    return Path(raw) if raw else None


def _table_name(spec: GameSpec, cap: int) -> str:
    return f"slownim-n{spec.n}-k{spec.k}-{spec.version.value}-cap{cap}.tbl"


def _obtain_table(spec: GameSpec, cap: int, threads: int):
    """Load the box table from the cache when possible, else build it.

    A freshly built table is saved back to the cache directory when one is
    configured. Values never depend on the thread count.
    """
    cache = _cache_dir()
    if cache is not None:
        path = cache / _table_name(spec, cap)
        if path.exists():
            return load_table(path, spec=spec, cap=cap)
    table = build_table(spec, cap, threads=threads)
    if cache is not None:
        cache.mkdir(parents=True, exist_ok=True)
        save_table(table, cache / _table_name(spec, cap))
    return table


def _spec(n: int, k: int | None, version: str) -> GameSpec:
    return GameSpec(n, n - 1 if k is None else k, version)


def _fmt_indices(piles: tuple[int, ...], indices) -> str:
    return ", ".join(f"[{j}]={piles[j]}" for j in indices)


# --- solve ---------------------------------------------------------------------


def run_solve(args) -> int:
    x = Position.from_text(args.piles)
    spec = _spec(x.n, args.k, args.version)
    r = remoteness(x, spec)
    print(f"position: {x}")
    print(f"spec: n={spec.n} k={spec.k} {spec.version.value}")
    print(f"remoteness: {r}")
    if r % 2:
        print("winner: N (the player to move wins)")
    else:
        print("winner: P (the player to move loses)")
    if is_terminal(x, spec):
        print("terminal: no moves available")
        return EXIT_OK
    if spec.k != spec.n - 1:
        return EXIT_OK
    keeps = optimal_keep_indices(x, spec)
    print(f"optimal keeps: {_fmt_indices(x.piles, keeps)}")
    out = m_move(x, spec)
    print(
        f"M-move: keep [{out.kept_index}]={x.piles[out.kept_index]}"
        f" (rule {out.rule_used}) -> {out.successor}"
    )
    r_succ = remoteness(out.successor, spec)
    if r - r_succ == 1:
        print("exception: no (the M-move is optimal)")
    else:
        rec = diagnose(x, spec)
        ids = fam.membership(x)
        rec = rec.with_families(ids)
        print(
            f"exception: yes (delta {rec.delta}, minimal {str(rec.minimal).lower()},"
            f" families {','.join(ids) if ids else '-'})"
        )
    return EXIT_OK


# --- scan ----------------------------------------------------------------------


def _scan_summary(records) -> list[str]:
    minimal = sum(1 for r in records if r.minimal)
    lines = [
        f"exceptions: {len(records)} (minimal {minimal}, derived {len(records) - minimal})"
    ]
    by_family: dict[str, int] = {}
    uncovered = 0
    for rec in records:
        if rec.family_ids:
            for fid in rec.family_ids:
                by_family[fid] = by_family.get(fid, 0) + 1
        else:
            uncovered += 1
    if by_family:
        ordered = [f.id for f in fam.catalog() if f.id in by_family]
        lines.append(
            "family matches: " + " ".join(f"{fid}={by_family[fid]}" for fid in ordered)
        )
    lines.append(f"uncovered: {uncovered}")
    return lines


def run_scan(args) -> int:
    spec = _spec(args.n, args.k, args.version)
    table = _obtain_table(spec, args.max, args.threads)
    records = fam.tag_records(scan_box(spec, args.max, table=table))
    if args.out:
        out = Path(args.out)
        with open(out, "w", encoding="utf-8") as fh:
            write_jsonl(records, fh)
        figures = plot_scan(records, out.with_suffix(""))
        for line in _scan_summary(records):
            print(line)
        print(f"wrote {out}")
        for p in figures:
            print(f"wrote {p}")
    else:
        write_jsonl(records, sys.stdout)
        for line in _scan_summary(records):
            print(line, file=sys.stderr)
    return EXIT_OK


# --- table / export --------------------------------------------------------------


def run_table(args) -> int:
    spec = _spec(args.n, args.k, args.version)
    table = build_table(spec, args.max, threads=args.threads)
    if args.out:
        dest = Path(args.out)
    else:
        cache = _cache_dir()
        if cache is None:
            print("need --out or SLOWNIM_CACHE_DIR to know where to save", file=sys.stderr)
            return EXIT_USAGE
        cache.mkdir(parents=True, exist_ok=True)
        dest = cache / _table_name(spec, args.max)
    save_table(table, dest)
    print(
        f"table: n={spec.n} k={spec.k} {spec.version.value} cap={args.max}"
        f" positions={len(table)} -> {dest}"
    )
    return EXIT_OK


def run_export(args) -> int:
    spec = _spec(args.n, args.k, args.version)
    table = _obtain_table(spec, args.max, args.threads)
    count = export_csv(table, args.out) if args.format == "csv" else export_jsonl(table, args.out)
    print(f"wrote {count} records -> {args.out}")
    return EXIT_OK


# --- families ---------------------------------------------------------------------


def run_families_verify(args) -> int:
    if args.id:
        ids = [s.strip() for s in args.id.split(",") if s.strip()]
    else:
        ids = [f.id for f in fam.catalog()]
    bounds = (args.max, args.extensions)
    reports = []
    for fid in ids:
        family = fam.family_by_id(fid)
        if args.n is not None:
            boxes = [args.n]
        else:
            boxes = fam.applicable_boxes(family, args.max)
            if args.n_max is not None:
                boxes = [n for n in boxes if n <= args.n_max]
        for n in boxes:
            spec = GameSpec(n, n - 1, args.version)
            table = _obtain_table(spec, args.max, args.threads)
            rep = fam.verify_family(family, spec, bounds, table=table)
            reports.append(rep)
            gaps = len(rep.misses or ())
            status = "OK" if rep.ok else "FAIL"
            if rep.ok and gaps:
                status = "GAPS"
            print(
                f"{fid} n={n} cap={args.max}: members={rep.members_checked}"
                f" confirmed={rep.true_positives}"
                f" falsePositives={len(rep.false_positives)}"
                f" remotenessMismatches={len(rep.remoteness_mismatches)}"
                f" misses={'-' if rep.misses is None else gaps} {status}"
            )
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps([r.to_dict() for r in reports], indent=1) + "\n")
        print(f"wrote {out}")
        for p in plot_verify(reports, out.with_suffix("")):
            print(f"wrote {p}")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_VERIFY


def run_families_coverage(args) -> int:
    spec = _spec(args.n, None, args.version)
    table = _obtain_table(spec, args.max, args.threads)
    cov = fam.coverage_report(spec, args.max, table=table)
    print(
        f"coverage n={spec.n} cap={args.max} {spec.version.value}:"
        f" exceptions={cov.total_exceptions} minimal={cov.minimal_exceptions}"
    )
    matched = [(fid, c) for fid, c in cov.by_family.items() if c > 0]
    for fid, c in matched:
        print(f"  {fid}: {c}")
    if cov.uncovered or cov.uncovered_derived:
        print(f"uncovered minimal: {[str(p) for p in cov.uncovered]}")
        print(f"uncovered derived: {len(cov.uncovered_derived)}")
        for p in cov.uncovered_derived[:20]:
            print(f"  {p}")
    else:
        print("uncovered: none")
    if cov.unused_families:
        print("families without members in this box: " + ", ".join(cov.unused_families))
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps(cov.to_dict(), indent=1) + "\n")
        print(f"wrote {out}")
        for p in plot_coverage(cov, out.with_suffix("")):
            print(f"wrote {p}")
    return EXIT_OK


# --- play -------------------------------------------------------------------------


def _engine_choice(x: Position, spec: GameSpec):
    """Deterministic engine move: hurry when winning, stall when losing.

    On a winning (odd remoteness) position, step to a successor one below;
    on a losing one, step to a successor of maximal remoteness. Ties break
    toward the lowest-ranked successor position.
    """
    r = remoteness(x, spec)
    best = None
    for mv, y in successors(x, spec):
        ry = remoteness(y, spec)
        if r % 2 == 1:
            if ry != r - 1:
                continue
            key = (0, rank(y, y.piles[-1]))
        else:
            key = (-ry, rank(y, y.piles[-1]))
        if best is None or key < best[0]:
            best = (key, mv, y)
    assert best is not None
    return best[1], best[2]


def _read_human_move(x: Position, spec: GameSpec) -> Position | None:
    """Prompt until a legal move is entered; None means the input ended."""
    while True:
        try:
            line = input("your move (keep <i> | reduce <i,j,...> | quit)> ")
        except EOFError:
            return None
        words = line.strip().split(None, 1)
        if not words:
            continue
        cmd = words[0].lower()
        if cmd == "quit":
            return None
        try:
            if cmd == "keep":
                if len(words) != 2:
                    raise IllegalMoveError("keep needs one index")
                return apply_keep(x, int(words[1]), spec)
            if cmd == "reduce":
                if len(words) != 2:
                    raise IllegalMoveError("reduce needs indices")
                idx = [int(s) for s in words[1].replace(",", " ").split()]
                return apply_reduce(x, idx, spec)
            print("unknown command; use keep, reduce, or quit")
        except ValueError:
            print("indices must be integers")
        except SlowNimError as err:
            print(f"illegal move: {err}")


def run_play(args) -> int:
    x = Position.from_text(args.piles)
    spec = _spec(x.n, args.k, args.version)
    side = args.first
    print(f"spec: n={spec.n} k={spec.k} {spec.version.value}")
    while True:
        print(f"position: {_fmt_indices(x.piles, range(x.n))}")
        if is_terminal(x, spec):
            if spec.misere:
                print(f"{side} cannot move and wins (misere)")
            else:
                other = "engine" if side == "human" else "human"
                print(f"{side} cannot move and loses; {other} wins")
            return EXIT_OK
        if side == "engine":
            mv, y = _engine_choice(x, spec)
            if spec.k == spec.n - 1:
                j = mv.kept_index
                print(f"engine: keep [{j}]={x.piles[j]} -> {y}")
            else:
                print(f"engine: reduce {','.join(map(str, mv.reduced))} -> {y}")
            x = y
            side = "human"
        else:
            nxt = _read_human_move(x, spec)
            if nxt is None:
                print("session ended")
                return EXIT_OK
            x = nxt
            side = "engine"


# --- cache --------------------------------------------------------------------------


def run_cache_info(args) -> int:
    cache = _cache_dir()
    if cache is None:
        print("SLOWNIM_CACHE_DIR is not set; tables live in memory only")
        return EXIT_OK
    print(f"cache dir: {cache}")
    if not cache.is_dir():
        print("(directory does not exist yet)")
        return EXIT_OK
    total = 0
    for path in sorted(cache.glob("*.tbl")):
        size = path.stat().st_size
        total += size
        try:
            table = load_table(path)
        except CorruptTableError as err:
            print(f"  {path.name}: corrupt ({err})")
            continue
        spec = table.spec
        print(
            f"  {path.name}: n={spec.n} k={spec.k} {spec.version.value}"
            f" cap={table.cap} positions={len(table)} bytes={size}"
        )
    print(f"total bytes: {total}")
    return EXIT_OK


# --- parser -----------------------------------------------------------------------


def _add_spec_flags(sp, *, need_n: bool) -> None:
    if need_n:
        sp.add_argument("--n", type=int, required=True, help="number of piles")
    sp.add_argument("--k", type=int, help="piles reduced per move (default n-1)")
    sp.add_argument(
        "--version", choices=["normal", "misere"], default="misere", help="play convention"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slownim",
        description="Exact slow NIM: remoteness solver, M-rule audit, exception families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve one position")
    sp.add_argument("--piles", required=True, help="comma-separated pile sizes")
    sp.add_argument("--k", type=int, help="piles reduced per move (default n-1)")
    sp.add_argument("--version", choices=["normal", "misere"], default="misere")
    sp.set_defaults(func=run_solve)

    sp = sub.add_parser("scan", help="list every exception in a box as JSONL")
    _add_spec_flags(sp, need_n=True)
    sp.add_argument("--max", type=int, required=True, help="largest pile size")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="JSONL destination (stdout if omitted)")
    sp.set_defaults(func=run_scan)

    sp = sub.add_parser("table", help="solve a box and save the binary table")
    _add_spec_flags(sp, need_n=True)
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="table destination (default: the cache dir)")
    sp.set_defaults(func=run_table)

    sp = sub.add_parser("export", help="export a solved box as JSONL or CSV")
    _add_spec_flags(sp, need_n=True)
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=run_export)

    sp = sub.add_parser("families", help="verify the exception-family catalog")
    fsub = sp.add_subparsers(dest="families_command", required=True)

    fv = fsub.add_parser("verify", help="replay families against brute force")
    fv.add_argument("--id", help="comma-separated family ids (default: all)")
    fv.add_argument("--n", type=int, help="verify one box only")
    fv.add_argument("--n-max", type=int, dest="n_max", help="largest native box to verify")
    fv.add_argument("--max", type=int, required=True, help="largest pile size")
    fv.add_argument("--extensions", type=int, default=2, help="appended piles to include")
    fv.add_argument("--version", choices=["normal", "misere"], default="misere")
    fv.add_argument("--threads", type=int, default=1)
    fv.add_argument("--out", help="JSON report destination")
    fv.set_defaults(func=run_families_verify)

    fc = fsub.add_parser("coverage", help="match scanned exceptions against the catalog")
    fc.add_argument("--n", type=int, required=True)
    fc.add_argument("--max", type=int, required=True)
    fc.add_argument("--version", choices=["normal", "misere"], default="misere")
    fc.add_argument("--threads", type=int, default=1)
    fc.add_argument("--out", help="JSON report destination")
    fc.set_defaults(func=run_families_coverage)

    sp = sub.add_parser("play", help="play against the engine in the terminal")
    sp.add_argument("--piles", required=True)
    sp.add_argument("--k", type=int, help="piles reduced per move (default n-1)")
    sp.add_argument("--version", choices=["normal", "misere"], default="misere")
    sp.add_argument("--first", choices=["human", "engine"], default="human")
    sp.set_defaults(func=run_play)

    sp = sub.add_parser("cache", help="inspect the table cache")
    csub = sp.add_subparsers(dest="cache_command", required=True)
    ci = csub.add_parser("info", help="list cached tables")
    ci.set_defaults(func=run_cache_info)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as err:
        print(f"resource limit: {err} (try a smaller --max)", file=sys.stderr)
        return EXIT_RESOURCE
    except CorruptTableError as err:
        print(f"table validation failed: {err}", file=sys.stderr)
        return EXIT_VERIFY
    except SlowNimError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
