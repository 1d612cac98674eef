"""Report figures rendered next to the CLI's delimited outputs.

Everything draws through the Agg backend and writes PNG files, so the
functions work headless and never open a window. Inputs are the same record
and report objects the delimited outputs are built from, and ordering is
fixed, so a rerun reproduces the same figures.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .exceptions import ExceptionRecord
from .families import CoverageReport, FamilyReport
from .mrule import round_up_even


def plot_scan(records: Sequence[ExceptionRecord], out_base: Path) -> list[Path]:
    """Two figures for a box scan: delta counts and remoteness structure.

    Returns the written paths ({base}-delta.png and {base}-remoteness.png).
    An empty scan still renders (empty axes), so callers need no special
    case for clean boxes.
    """
    paths = []

    deltas_min = Counter(r.delta for r in records if r.minimal)
    deltas_der = Counter(r.delta for r in records if not r.minimal)
    keys = sorted(set(deltas_min) | set(deltas_der))
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = range(len(keys))
    ax.bar(xs, [deltas_min[k] for k in keys], width=0.6, label="minimal", color="#2b6e46")
    ax.bar(
        xs,
        [deltas_der[k] for k in keys],
        width=0.6,
        bottom=[deltas_min[k] for k in keys],
        label="derived",
        color="#8abf9e",
    )
    ax.set_xticks(list(xs), [str(k) for k in keys])
    ax.set_xlabel("remoteness drop of the M-move (1 would be optimal)")
    ax.set_ylabel("exceptions")
    ax.set_title("Exception deltas")
    ax.legend()
    fig.tight_layout()
    p = out_base.with_name(out_base.name + "-delta.png")
    fig.savefig(p)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    xs_m = [r.position.piles[-2] for r in records if r.minimal]
    ys_m = [r.r for r in records if r.minimal]
    xs_d = [r.position.piles[-2] for r in records if not r.minimal]
    ys_d = [r.r for r in records if not r.minimal]
    ax.scatter(xs_d, ys_d, s=12, color="#8abf9e", label="derived", zorder=2)
    ax.scatter(xs_m, ys_m, s=18, color="#2b6e46", label="minimal", zorder=3)
    if xs_m or xs_d:
        lo = min(xs_m + xs_d)
        hi = max(xs_m + xs_d)
        vs = list(range(lo, hi + 1))
        ax.plot(
            vs,
            [round_up_even(v) + 1 for v in vs],
            color="#555555",
            linewidth=1,
            linestyle="--",
            label="round_up_even(v)+1",
            zorder=1,
        )
    ax.set_xlabel("second-largest pile v")
    ax.set_ylabel("remoteness")
    ax.set_title("Remoteness of exceptions")
    ax.legend()
    fig.tight_layout()
    p = out_base.with_name(out_base.name + "-remoteness.png")
    fig.savefig(p)
    plt.close(fig)
    paths.append(p)
    return paths


def plot_verify(reports: Sequence[FamilyReport], out_base: Path) -> list[Path]:
    """Stacked horizontal bars per verified family and box."""
    labels = [f"{r.family_id} n={r.box[0]} cap={r.box[1]}" for r in reports]
    tp = [r.true_positives for r in reports]
    fp = [len(r.false_positives) for r in reports]
    miss = [len(r.misses or ()) for r in reports]
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.4 * len(reports) + 1)))
    ys = range(len(reports))
    ax.barh(ys, tp, color="#2b6e46", label="confirmed members")
    ax.barh(ys, fp, left=tp, color="#b3402e", label="false positives")
    ax.barh(
        ys,
        miss,
        left=[a + b for a, b in zip(tp, fp)],
        color="#d9a036",
        label="misses",
    )
    ax.set_yticks(list(ys), labels)
    ax.invert_yaxis()
    ax.set_xlabel("positions")
    ax.set_title("Family verification")
    ax.legend()
    fig.tight_layout()
    p = out_base.with_name(out_base.name + "-families.png")
    fig.savefig(p)
    plt.close(fig)
    return [p]


def plot_coverage(report: CoverageReport, out_base: Path) -> list[Path]:
    """Matched-exception counts per family, with any uncovered bar last."""
    items = [(fid, c) for fid, c in report.by_family.items() if c > 0]
    labels = [fid for fid, _ in items]
    counts = [c for _, c in items]
    colors = ["#2b6e46"] * len(items)
    gaps = len(report.uncovered) + len(report.uncovered_derived)
    if gaps:
        labels.append("uncovered")
        counts.append(gaps)
        colors.append("#b3402e")
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.35 * len(labels) + 1)))
    ys = range(len(labels))
    ax.barh(ys, counts, color=colors)
    ax.set_yticks(list(ys), labels)
    ax.invert_yaxis()
    ax.set_xlabel("matched exceptions (families overlap, so sums exceed the total)")
    n, cap, version = report.box
    ax.set_title(f"Coverage of n={n} cap={cap} {version}")
    fig.tight_layout()
    p = out_base.with_name(out_base.name + "-coverage.png")
    fig.savefig(p)
    plt.close(fig)
    return [p]
