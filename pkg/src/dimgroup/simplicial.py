"""Rank-``k`` integer lattices with product order and a strict order unit.

``r_value`` and ``l_value`` compute, for an element ``d`` and the order unit
``u``, the least rational ``q`` with ``q*u >= d`` and the greatest rational
``q`` with ``q*u <= d``; both are exact.  ``embedding_criterion`` is the
sufficient structural test for a nonnegative matrix to be an order embedding
(a private positive coordinate per column), and
``brute_force_order_embedding`` checks the defining property exhaustively on
a finite coordinate box.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .boxcheck import EnumerationBudgetError, find_violation

__all__ = [
    "SimplicialLevel",
    "RatBoundPair",
    "EnumerationBudgetError",
    "r_value",
    "l_value",
    "bound_pair",
    "embedding_criterion",
    "brute_force_order_embedding",
    "find_order_embedding_violation",
    "nonadditivity_witness",
]

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class SimplicialLevel:
    """``Z^rank`` with coordinatewise order and strictly positive unit."""

    rank: int
    unit: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rank < 1 or len(self.unit) != self.rank:
            raise ValueError("unit length must equal a positive rank")
        if any(not isinstance(c, int) or c <= 0 for c in self.unit):
            raise ValueError("order unit coordinates must be positive integers")


class RatBoundPair(NamedTuple):
    r: Fraction
    l: Fraction


def _check_vec(d: Sequence[int], level: SimplicialLevel) -> None:
    if len(d) != level.rank:
        raise ValueError(f"vector of length {len(d)} at rank {level.rank}")


def r_value(d: Sequence[int], level: SimplicialLevel) -> Fraction:
    """Least rational ``q`` with ``q * unit >= d`` coordinatewise."""
    _check_vec(d, level)
    return max(Fraction(di, ui) for di, ui in zip(d, level.unit))


def l_value(d: Sequence[int], level: SimplicialLevel) -> Fraction:
    """Greatest rational ``q`` with ``q * unit <= d`` coordinatewise."""
    _check_vec(d, level)
    return min(Fraction(di, ui) for di, ui in zip(d, level.unit))


def bound_pair(d: Sequence[int], level: SimplicialLevel) -> RatBoundPair:
    return RatBoundPair(r_value(d, level), l_value(d, level))


def embedding_criterion(
    matrix: Sequence[Sequence[int | Fraction]],
    dom_rank: int | None = None,
    cod_rank: int | None = None,
) -> bool:
    """Structural order-embedding test for a matrix acting on columns.

    True iff every entry is nonnegative and every column has a private
    positive coordinate: a row where it is positive and all other columns
    vanish.  This is sufficient for the map to embed the product orders.
    """
    rows = [list(r) for r in matrix]
    if not rows:
        raise ValueError("empty matrix")
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("matrix rows have unequal lengths")
    if dom_rank is not None and dom_rank != ncols:
        raise ValueError(f"dom_rank {dom_rank} != {ncols} columns")
    if cod_rank is not None and cod_rank != len(rows):
        raise ValueError(f"cod_rank {cod_rank} != {len(rows)} rows")
    for r in rows:
        if any(a < 0 for a in r):
            return False
    for j in range(ncols):
        ok = False
        for r in rows:
            if r[j] > 0 and all(r[k] == 0 for k in range(ncols) if k != j):
                ok = True
                break
        if not ok:
            return False
    return True


def find_order_embedding_violation(
    matrix: Sequence[Sequence[int]], box: int
) -> tuple[int, ...] | None:
    """A box vector ``x`` with ``(x >= 0) != (M x >= 0)``, or None."""
    return find_violation(matrix, box)


def brute_force_order_embedding(
    matrix: Sequence[Sequence[int]], box: int
) -> bool:
    """Exhaustive order-embedding check over ``[-box, box]^dom``."""
    return find_violation(matrix, box) is None


def nonadditivity_witness(
    level: SimplicialLevel,
) -> tuple[IntVec, IntVec] | None:
    """A pair of standard basis vectors on which ``r + l`` fails to be
    additive, or None (ranks 1 and 2 admit none).
    """

    def standard(i: int) -> IntVec:
        return tuple(1 if k == i else 0 for k in range(level.rank))

    def rl_sum(d: IntVec) -> Fraction:
        return r_value(d, level) + l_value(d, level)

    for i in range(level.rank):
        for j in range(i + 1, level.rank):
            a, b = standard(i), standard(j)
            s = tuple(x + y for x, y in zip(a, b))
            if rl_sum(s) != rl_sum(a) + rl_sum(b):
                return a, b
    return None
