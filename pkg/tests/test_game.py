"""Position handling, moves, and box ranking."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slownim import (
    GameSpec,
    IllegalMoveError,
    InvalidPositionError,
    InvalidSpecError,
    NoMovesError,
    OutOfBoxError,
    Position,
    UnsupportedSpecError,
    Version,
    apply_keep,
    apply_reduce,
    box_size,
    canonicalize,
    decode,
    enumerate_box,
    is_terminal,
    rank,
    successors,
)
from oracles import oracle_successors, oracle_terminal

sorted_piles = st.lists(st.integers(0, 9), min_size=2, max_size=6).map(
    lambda vs: tuple(sorted(vs))
)


def test_position_basics():
    x = Position((1, 2, 3))
    assert x.n == 3
    assert x.stones == 6
    assert str(x) == "1,2,3"
    assert Position.from_text("3, 1,2") == x
    assert canonicalize([3, 1, 2]) == x


def test_position_rejects_garbage():
    with pytest.raises(InvalidPositionError):
        Position((2, 1))
    with pytest.raises(InvalidPositionError):
        Position((-1, 0))
    with pytest.raises(InvalidPositionError):
        Position(())
    with pytest.raises(InvalidPositionError):
        Position.from_text("1,x,3")


def test_spec_validation():
    spec = GameSpec(3, 2)
    assert spec.misere
    assert GameSpec(3, 2, "normal").version is Version.NORMAL
    assert GameSpec(3, 3).k == 3  # reducing every pile is allowed
    with pytest.raises(InvalidSpecError):
        GameSpec(2, 0)
    with pytest.raises(InvalidSpecError):
        GameSpec(3, 4)


def test_terminal_counts_nonempty_piles():
    spec = GameSpec(3, 2)
    assert is_terminal(Position((0, 0, 5)), spec)
    assert not is_terminal(Position((0, 1, 5)), spec)
    assert is_terminal(Position((0, 0, 0)), spec)


@given(piles=sorted_piles, data=st.data())
@settings(max_examples=200, deadline=None)
def test_successors_match_oracle(piles, data):
    n = len(piles)
    k = data.draw(st.integers(1, n - 1))
    spec = GameSpec(n, k, "normal")
    got = {y.piles for _, y in successors(Position(piles), spec)}
    assert got == oracle_successors(piles, k)
    assert (len(got) == 0) == oracle_terminal(piles, k)


def test_apply_keep_matches_named_successor():
    spec = GameSpec(4, 3)
    x = Position((2, 2, 2, 3))
    assert apply_keep(x, 3, spec) == Position((1, 1, 1, 3))
    assert apply_keep(x, 0, spec) == Position((1, 1, 2, 2))
    with pytest.raises(IllegalMoveError):
        apply_keep(x, 7, spec)
    with pytest.raises(NoMovesError):
        apply_keep(Position((0, 0, 0, 9)), 3, spec)
    with pytest.raises(IllegalMoveError):
        apply_keep(Position((0, 1, 1, 1)), 3, spec)
    with pytest.raises(UnsupportedSpecError):
        apply_keep(x, 0, GameSpec(4, 2))


def test_apply_reduce_checks_indices():
    spec = GameSpec(4, 2)
    x = Position((0, 1, 2, 3))
    assert apply_reduce(x, [1, 3], spec) == Position((0, 0, 2, 2))
    with pytest.raises(IllegalMoveError):
        apply_reduce(x, [0, 1], spec)  # pile 0 is empty
    with pytest.raises(IllegalMoveError):
        apply_reduce(x, [1], spec)  # wrong count
    with pytest.raises(IllegalMoveError):
        apply_reduce(x, [1, 1], spec)  # duplicates collapse to wrong count


def test_box_enumeration_is_ranked():
    n, cap = 3, 4
    box = list(enumerate_box(n, cap))
    assert len(box) == box_size(n, cap)
    assert len(set(box)) == len(box)
    for r, x in enumerate(box):
        assert rank(x, cap) == r
        assert decode(r, n, cap) == x


@given(piles=sorted_piles)
@settings(max_examples=200, deadline=None)
def test_rank_decode_roundtrip(piles):
    x = Position(piles)
    cap = piles[-1]
    r = rank(x, cap)
    assert decode(r, x.n, cap) == x


def test_rank_validates_cap():
    with pytest.raises(OutOfBoxError):
        rank(Position((0, 5)), 4)
    with pytest.raises(OutOfBoxError):
        decode(box_size(3, 4), 3, 4)
