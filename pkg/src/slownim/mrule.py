"""The strict M-rule: a deterministic keep-one-pile heuristic for k = n-1.

The rule inspects the canonical sorted position and keeps exactly one pile,
reducing all others by a stone:

* rule "e": if any pile is even (zero counts as even), keep a smallest even
  pile;
* rule "o": if every pile is odd, keep a largest pile.

The strict variant breaks ties toward the largest index, which makes the
successor tuple already sorted without re-sorting. Under normal play the
number of M-rule moves to exhaustion equals the Smith remoteness; under
misere play it usually does too, and the positions where it does not are the
"exceptions" studied by :mod:`slownim.exceptions`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoMovesError, UnsupportedSpecError
from .game import GameSpec, Position, apply_keep, is_terminal


def round_up_even(v: int) -> int:
    """Smallest even integer >= v."""
    return v + (v & 1)


def round_up_odd(v: int) -> int:
    """Smallest odd integer >= v."""
    return v | 1


@dataclass(frozen=True, slots=True)
class MRuleOutcome:
    """Result of one strict M-rule move."""

    kept_index: int
    rule_used: str  # "e" or "o"
    successor: Position


def m_keep_index(piles: tuple[int, ...]) -> tuple[int, str]:
    """Keep-index and rule tag chosen by the strict M-rule on sorted piles."""
    best = -1
    best_val = -1
    for i, v in enumerate(piles):
        if v % 2 == 0 and (best < 0 or v <= best_val):
            best, best_val = i, v
    if best >= 0:
        return best, "e"
    return len(piles) - 1, "o"


def m_move(x: Position, spec: GameSpec) -> MRuleOutcome:
    """Apply one strict M-rule move.

    Requires k = n - 1 and a non-terminal position. A non-terminal position
    has at most one empty pile, and the rule keeps that pile if present, so
    the chosen move is always legal.
    """
    if spec.k != spec.n - 1:
        raise UnsupportedSpecError("the M-rule is defined for k = n - 1")
    if is_terminal(x, spec):
        raise NoMovesError(f"position {x} is terminal")
    kept, rule = m_keep_index(x.piles)
    return MRuleOutcome(kept_index=kept, rule_used=rule, successor=apply_keep(x, kept, spec))


def m_sequence(x: Position, spec: GameSpec) -> tuple[list[Position], int]:
    """Follow the M-rule until the game ends.

    Returns the visited positions (starting with x, ending terminal) and the
    move count M(x). A terminal input yields ([x], 0).
    """
    if spec.k != spec.n - 1:
        raise UnsupportedSpecError("the M-rule is defined for k = n - 1")
    path = [x]
    cur = x
    while not is_terminal(cur, spec):
        cur = m_move(cur, spec).successor
        path.append(cur)
    return path, len(path) - 1
