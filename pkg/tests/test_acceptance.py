"""The ten acceptance checks.

Each test prints one verdict line of the form

    [acceptance] criterion NN: PASS <what was established>

directly to the terminal (bypassing capture), or a FAIL line when the
underlying assertions trip. The checks are ordered and self-contained, so a
single failed criterion points at the area that regressed.
"""

import json
import random
from contextlib import contextmanager

from slownim import (
    GameSpec,
    Position,
    cached_table,
    check_properties,
    coverage_report,
    decode,
    diagnose,
    enumerate_box,
    generate_members,
    is_exception,
    is_terminal,
    m_move,
    m_sequence,
    remoteness,
    scan_box,
    sg_value,
    verify_family,
    verify_monotone_extension,
)
from slownim.families import catalog, applicable_boxes
from slownim.game import box_size
from slownim.cli import main


@contextmanager
def verdict(capsys, num, summary):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"[acceptance] criterion {num:02d}: FAIL ({summary})")
        raise
    with capsys.disabled():
        print(f"[acceptance] criterion {num:02d}: PASS {summary}")


def test_criterion_01_misere_base_calibration(capsys):
    with verdict(capsys, 1, "misere R(1,2,3)=3 and R(1,3,4)=5"):
        spec = GameSpec(3, 2, "misere")
        assert remoteness(Position((1, 2, 3)), spec) == 3
        assert remoteness(Position((1, 3, 4)), spec) == 5


def test_criterion_02_normal_play_m_equals_r(capsys):
    checked = 0
    with verdict(capsys, 2, "normal play: M = R and every M-step lowers R by 1"):
        for n in (3, 4, 5):
            spec = GameSpec(n, n - 1, "normal")
            table = cached_table(spec, 12)
            for x in enumerate_box(n, 12):
                r = table.remoteness_of(x)
                _, count = m_sequence(x, spec)
                assert count == r, x
                if not is_terminal(x, spec):
                    succ = m_move(x, spec).successor
                    assert r - table.remoteness_of(succ) == 1, x
                checked += 1
        assert checked == 455 + 1820 + 6188


def test_criterion_03_even_first_pile_family_iff(capsys):
    with verdict(capsys, 3, "F_EVEN is exact for n in {4,5,6}, entries <= 14, R = x1+1"):
        expected = {4: 12, 5: 88, 6: 427}
        for n in (4, 5, 6):
            spec = GameSpec(n, n - 1)
            rep = verify_family("F_EVEN", spec, (14, 2))
            assert rep.ok
            assert rep.false_positives == ()
            assert rep.misses == ()
            assert rep.remoteness_mismatches == ()
            assert rep.true_positives == rep.members_checked == expected[n]
            table = cached_table(spec, 14)
            for x in generate_members("F_EVEN", (14, 2)):
                if x.n != n:
                    continue
                assert x.piles[0] % 2 == 0
                assert table.remoteness_of(x) == x.piles[0] + 1, x


def test_criterion_04_first_pile_one_family_iff(capsys):
    with verdict(capsys, 4, "F_ONE is exact for n=3, entries <= 30, R and unique keep"):
        spec = GameSpec(3, 2)
        rep = verify_family("F_ONE", spec, (30, 2))
        assert rep.ok
        assert rep.false_positives == ()
        assert rep.misses == ()
        assert rep.remoteness_mismatches == ()
        table = cached_table(spec, 30)
        members = [x for x in generate_members("F_ONE", (30, 2)) if x.n == 3]
        assert rep.true_positives == rep.members_checked == len(members) == 435
        for x in members:
            x2 = x.piles[1]
            # keep indices collapse ties: equal piles reach the same successor
            keeps = diagnose(x, spec, check_minimal=False).optimal_keeps
            if x2 % 2 == 0:
                assert table.remoteness_of(x) == x2 + 1, x
                assert keeps == (2,), x
            else:
                assert table.remoteness_of(x) == x2 + 2, x
                assert keeps == (1,), x


def test_criterion_05_table_row_regressions(capsys):
    rows = {
        (5, 5, 6, 7): 7,
        (5, 5, 7, 8): 9,
        (7, 7, 10, 11): 11,
        (9, 9, 14, 15): 15,
        (11, 11, 18, 19): 19,
        (13, 13, 22, 23): 23,
        (3, 3, 3, 4): 5,
        (5, 5, 5, 5, 6): 7,
    }
    with verdict(capsys, 5, "eight exact misere remoteness rows plus one exception"):
        for piles, r in rows.items():
            spec = GameSpec(len(piles), len(piles) - 1)
            assert remoteness(Position(piles), spec) == r, piles
        assert is_exception(Position((7, 7, 8, 8, 9)), GameSpec(5, 4))


def test_criterion_06_property_suite(capsys):
    total = 0
    with verdict(capsys, 6, "all six regularities hold for every minimal exception, cap 14"):
        for n in (3, 4, 5):
            spec = GameSpec(n, n - 1)
            minimal = [r for r in scan_box(spec, 14) if r.minimal]
            report = check_properties(minimal)
            assert report.all_pass, report.to_dict()
            total += report.total
        assert total == 59


def test_criterion_07_monotone_extensions(capsys):
    with verdict(capsys, 7, "200 sampled minimal exceptions survive 1- and 2-pile extensions"):
        pool = []
        for n, cap in ((3, 30), (4, 30), (5, 20)):
            spec = GameSpec(n, n - 1)
            pool.extend((rec.position, spec) for rec in scan_box(spec, cap) if rec.minimal)
        assert len(pool) >= 200
        rng = random.Random(20260816)
        sample = rng.sample(pool, 200)
        for core, spec in sample:
            assert verify_monotone_extension(core, spec, extensions=2), core


def test_criterion_08_coverage_reports(capsys):
    boxes = ((4, 20), (5, 16))
    summary = []
    with verdict(capsys, 8, "coverage reports for (n=4, cap 20) and (n=5, cap 16); "
                            "iff families show zero false positives and mismatches"):
        for n, cap in boxes:
            spec = GameSpec(n, n - 1)
            cov = coverage_report(spec, cap)
            assert cov.total_exceptions > 0
            summary.append((n, cap, cov.total_exceptions, len(cov.uncovered)))
            for fam in catalog():
                if not fam.iff_claimed or n not in applicable_boxes(fam, cap):
                    continue
                rep = verify_family(fam, spec, (cap, 2))
                assert rep.false_positives == (), (fam.id, n)
                assert rep.remoteness_mismatches == (), (fam.id, n)
    with capsys.disabled():
        for n, cap, total, gaps in summary:
            print(f"[acceptance]   coverage n={n} cap={cap}: {total} exceptions, {gaps} uncovered minimal")


def test_criterion_09_solver_internal_consistency(capsys):
    plans = {(3, 2): 30, (4, 3): 16, (5, 4): 12}
    with verdict(capsys, 9, "tables match recursion on 10k random positions per spec; sg parity"):
        rng = random.Random(97)
        for (n, k), cap in plans.items():
            for version in ("normal", "misere"):
                spec = GameSpec(n, k, version)
                table = cached_table(spec, cap)
                size = box_size(n, cap)
                for _ in range(10_000):
                    r = rng.randrange(size)
                    x = decode(r, n, cap)
                    assert table.remoteness_at(r) == remoteness(x, spec), (spec, x)
        spec = GameSpec(4, 3, "normal")
        table = cached_table(spec, 12)
        for x in enumerate_box(4, 12):
            assert (sg_value(x, spec) == 0) == (table.remoteness_of(x) % 2 == 0), x


def test_criterion_10_scan_determinism(capsys, tmp_path):
    with verdict(capsys, 10, "scan JSONL is byte-identical for --threads 1 and --threads 8"):
        outs = []
        for threads in ("1", "8"):
            dest = tmp_path / f"scan-t{threads}.jsonl"
            code = main([
                "scan", "--n", "5", "--max", "10",
                "--threads", threads, "--out", str(dest),
            ])
            assert code == 0
            outs.append(dest.read_bytes())
        capsys.readouterr()
        assert outs[0] == outs[1]
        assert outs[0]
        first = json.loads(outs[0].splitlines()[0])
        assert first["version"] == "misere"
