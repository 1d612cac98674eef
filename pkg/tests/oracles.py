"""Independent brute-force reference implementations used only by the tests.

Everything here works on plain sorted tuples and deliberately avoids importing
the package under test, so disagreements point at the package, not at a shared
bug. Speed does not matter; clarity does.
"""

from __future__ import annotations

import itertools
from functools import lru_cache


def oracle_successors(piles: tuple[int, ...], k: int) -> set[tuple[int, ...]]:
    """All distinct sorted positions reachable by one move.

    A move removes one stone from each of exactly k piles; every chosen pile
    must be nonempty.
    """
    out = set()
    indices = [i for i, v in enumerate(piles) if v > 0]
    for combo in itertools.combinations(indices, k):
        nxt = list(piles)
        for i in combo:
            nxt[i] -= 1
        out.add(tuple(sorted(nxt)))
    return out


def oracle_terminal(piles: tuple[int, ...], k: int) -> bool:
    return sum(1 for v in piles if v > 0) < k


@lru_cache(maxsize=None)
def oracle_remoteness(piles: tuple[int, ...], k: int, misere: bool) -> int:
    """Smith remoteness, straight from the definition.

    Terminal positions score 0 under normal play and 1 under misere play.
    Otherwise, with E the successor values of even remoteness:
    1 + min(E) when E is nonempty, else 1 + max over all successors.
    """
    if oracle_terminal(piles, k):
        return 1 if misere else 0
    vals = [oracle_remoteness(s, k, misere) for s in oracle_successors(piles, k)]
    evens = [v for v in vals if v % 2 == 0]
    return 1 + (min(evens) if evens else max(vals))


@lru_cache(maxsize=None)
def oracle_sg(piles: tuple[int, ...], k: int) -> int:
    """Sprague-Grundy value under normal play (mex of successor values)."""
    seen = {oracle_sg(s, k) for s in oracle_successors(piles, k)}
    g = 0
    while g in seen:
        g += 1
    return g


def oracle_m_keep(piles: tuple[int, ...]) -> int:
    """Keep-index chosen by the strict M-rule on a sorted position.

    Keep the smallest even pile (zero counts as even), breaking ties toward
    the largest index; if every pile is odd, keep a largest pile, again at
    the largest index.
    """
    evens = [i for i, v in enumerate(piles) if v % 2 == 0]
    if evens:
        smallest = min(piles[i] for i in evens)
        return max(i for i in evens if piles[i] == smallest)
    return len(piles) - 1


def oracle_keep(piles: tuple[int, ...], kept: int) -> tuple[int, ...]:
    """Reduce every pile except `kept` by one stone and resort."""
    assert all(v > 0 for i, v in enumerate(piles) if i != kept)
    return tuple(sorted(v - 1 if i != kept else v for i, v in enumerate(piles)))


def oracle_is_exception(piles: tuple[int, ...], misere: bool) -> bool:
    """True when the strict M-move fails to step remoteness down by one."""
    k = len(piles) - 1
    if oracle_terminal(piles, k):
        return False
    succ = oracle_keep(piles, oracle_m_keep(piles))
    return oracle_remoteness(piles, k, misere) - oracle_remoteness(succ, k, misere) != 1
