"""End-to-end runs of the command line interface, in process."""

import io
import json

import pytest

from slownim import GameSpec, load_table
from slownim.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_no_arguments_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_solve_exception_position(capsys):
    code, out, err = run(capsys, "solve", "--piles", "1,2,3", "--version", "misere")
    assert code == 0
    assert "remoteness: 3" in out
    assert "winner: N" in out
    assert "optimal keeps: [2]=3" in out
    assert "exception: yes" in out
    assert "F_ONE" in out


def test_solve_normal_play_is_not_exceptional(capsys):
    code, out, err = run(capsys, "solve", "--piles", "1,2,3", "--version", "normal")
    assert code == 0
    assert "remoteness: 3" in out
    assert "winner: N" in out
    assert "exception: no" in out


def test_solve_terminal_and_general_k(capsys):
    code, out, _ = run(capsys, "solve", "--piles", "0,0,5")
    assert code == 0
    assert "terminal" in out

    code, out, _ = run(capsys, "solve", "--piles", "1,2,3", "--k", "1")
    assert code == 0
    assert "remoteness:" in out
    assert "M-move" not in out


def test_solve_bad_piles(capsys):
    code, out, err = run(capsys, "solve", "--piles", "1,two,3")
    assert code == 2
    assert "error" in err


def test_scan_stdout_and_summary(capsys):
    code, out, err = run(capsys, "scan", "--n", "3", "--max", "6")
    assert code == 0
    lines = out.splitlines()
    payloads = [json.loads(line) for line in lines]
    assert all(p["version"] == "misere" for p in payloads)
    assert ["piles", "version", "R", "Rprime", "delta"] == list(payloads[0])[:5]
    assert "exceptions:" in err
    assert [1, 1, 2] in [p["piles"] for p in payloads]


def test_scan_to_file_is_thread_deterministic(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    code1, out1, _ = run(capsys, "scan", "--n", "4", "--max", "10", "--threads", "1", "--out", str(a))
    code2, out2, _ = run(capsys, "scan", "--n", "4", "--max", "10", "--threads", "8", "--out", str(b))
    assert code1 == code2 == 0
    assert a.read_bytes() == b.read_bytes()
    assert "exceptions:" in out1
    assert (tmp_path / "a-delta.png").exists()
    assert (tmp_path / "a-remoteness.png").exists()


def test_scan_normal_play_finds_nothing(tmp_path, capsys):
    out_file = tmp_path / "none.jsonl"
    code, out, _ = run(capsys, "scan", "--n", "4", "--max", "9", "--version", "normal", "--out", str(out_file))
    assert code == 0
    assert "exceptions: 0" in out
    assert out_file.read_text() == ""


def test_table_needs_a_destination(capsys, monkeypatch):
    monkeypatch.delenv("SLOWNIM_CACHE_DIR", raising=False)
    code, out, err = run(capsys, "table", "--n", "3", "--max", "5")
    assert code == 2
    assert "SLOWNIM_CACHE_DIR" in err


def test_table_to_explicit_path(tmp_path, capsys):
    dest = tmp_path / "t.tbl"
    code, out, _ = run(capsys, "table", "--n", "3", "--max", "5", "--out", str(dest))
    assert code == 0
    table = load_table(dest, spec=GameSpec(3, 2), cap=5)
    assert len(table) == 56


def test_table_into_cache_and_info(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SLOWNIM_CACHE_DIR", str(tmp_path / "cache"))
    code, out, _ = run(capsys, "table", "--n", "3", "--max", "4", "--version", "normal")
    assert code == 0
    code, out, _ = run(capsys, "cache", "info")
    assert code == 0
    assert "slownim-n3-k2-normal-cap4.tbl" in out
    assert "positions=35" in out


def test_cache_info_without_configuration(capsys, monkeypatch):
    monkeypatch.delenv("SLOWNIM_CACHE_DIR", raising=False)
    code, out, _ = run(capsys, "cache", "info")
    assert code == 0
    assert "not set" in out


def test_resource_limit_exit_code(capsys):
    code, out, err = run(capsys, "table", "--n", "6", "--max", "60", "--out", "/tmp/never.tbl")
    assert code == 3
    assert "smaller --max" in err


def test_corrupt_cached_table_fails_verification(tmp_path, capsys, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv("SLOWNIM_CACHE_DIR", str(cache))
    code, _, _ = run(capsys, "table", "--n", "3", "--max", "4")
    assert code == 0
    victim = next(cache.glob("*.tbl"))
    raw = bytearray(victim.read_bytes())
    raw[-1] ^= 0xFF
    victim.write_bytes(bytes(raw))
    code, out, err = run(capsys, "export", "--n", "3", "--max", "4", "--out", str(tmp_path / "x.jsonl"))
    assert code == 1
    assert "validation failed" in err


def test_export_formats(tmp_path, capsys):
    j = tmp_path / "box.jsonl"
    c = tmp_path / "box.csv"
    code, out, _ = run(capsys, "export", "--n", "3", "--max", "3", "--out", str(j))
    assert code == 0
    assert "wrote 20 records" in out
    assert json.loads(j.read_text().splitlines()[0])["piles"] == [0, 0, 0]

    code, out, _ = run(capsys, "export", "--n", "3", "--max", "3", "--format", "csv", "--out", str(c))
    assert code == 0
    assert c.read_text().splitlines()[0] == "piles,remoteness,winner"


def test_families_verify_single_box(tmp_path, capsys):
    report = tmp_path / "rep.json"
    code, out, _ = run(
        capsys,
        "families", "verify",
        "--id", "F_EVEN",
        "--n", "4",
        "--max", "10",
        "--out", str(report),
    )
    assert code == 0
    assert "F_EVEN n=4 cap=10" in out
    assert "OK" in out
    payload = json.loads(report.read_text())
    assert payload[0]["familyId"] == "F_EVEN"
    assert payload[0]["falsePositives"] == []
    assert (tmp_path / "rep-families.png").exists()


def test_families_verify_applicable_boxes_capped(capsys):
    code, out, _ = run(
        capsys, "families", "verify", "--id", "F_EVEN", "--n-max", "5", "--max", "10"
    )
    assert code == 0
    assert "n=4" in out
    assert "n=5" in out
    assert "n=6" not in out


def test_families_verify_unknown_id(capsys):
    code, out, err = run(capsys, "families", "verify", "--id", "F_NOPE", "--max", "8")
    assert code == 2
    assert "F_NOPE" in err


def test_families_coverage(tmp_path, capsys):
    report = tmp_path / "cov.json"
    code, out, _ = run(
        capsys, "families", "coverage", "--n", "3", "--max", "8", "--out", str(report)
    )
    assert code == 0
    assert "coverage n=3 cap=8" in out
    payload = json.loads(report.read_text())
    assert payload["box"] == {"n": 3, "cap": 8, "version": "misere"}
    assert payload["uncovered"] == []
    assert (tmp_path / "cov-coverage.png").exists()


def play(capsys, monkeypatch, moves, *argv):
    monkeypatch.setattr("sys.stdin", io.StringIO("".join(m + "\n" for m in moves)))
    return run(capsys, "play", *argv)


def test_play_forced_misere_win(capsys, monkeypatch):
    code, out, _ = play(
        capsys, monkeypatch, ["reduce 1,2"], "--piles", "0,1,1", "--version", "misere"
    )
    assert code == 0
    assert "engine cannot move and wins" in out


def test_play_engine_moves_first_and_keeps_the_odd_pile(capsys, monkeypatch):
    code, out, _ = play(
        capsys,
        monkeypatch,
        ["nonsense", "keep 9", "quit"],
        "--piles", "2,2,2,3",
        "--first", "engine",
    )
    assert code == 0
    assert "engine: keep [3]=3 -> 1,1,1,3" in out
    assert "unknown command" in out
    assert "illegal move" in out
    assert "session ended" in out


def test_play_full_game_to_the_end(capsys, monkeypatch):
    # (1,2,3) misere: keep the 3, engine is forced into (0,0,2), human wins
    code, out, _ = play(
        capsys, monkeypatch, ["keep 2"], "--piles", "1,2,3", "--version", "misere"
    )
    assert code == 0
    assert "engine:" in out
    assert "human cannot move and wins (misere)" in out
