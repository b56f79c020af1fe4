"""Pure-Python kernel for the box-enumeration order-embedding oracle.

Semantics (shared with the compiled kernel): given an integer matrix ``M``
and a bound ``B``, find some ``x`` in ``[-B, B]^cols`` with
``(x >= 0) != (M @ x >= 0)``, or report that none exists.  Arbitrary-size
integers are fine here, which is why this kernel also serves as the escape
hatch when entries are too large for the compiled int64 path.

The search is exact but pruned: a negative matrix entry yields an immediate
unit-vector witness, and otherwise a depth-first scan over coordinates cuts
any branch whose partial row sums can no longer return to nonnegative.
"""

from __future__ import annotations

from typing import Sequence


def find_violation(
    rows: Sequence[Sequence[int]], bound: int
) -> tuple[int, ...] | None:
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    if ncols == 0 or bound <= 0:
        return None
    for row in rows:
        for j, a in enumerate(row):
            if a < 0:
                # x = e_j is >= 0 while (M x)_i = a < 0
                return tuple(1 if k == j else 0 for k in range(ncols))
    # All entries nonnegative: x >= 0 now implies M x >= 0, so a violation
    # is an x with a negative coordinate and M x >= 0.
    cols = [[rows[i][j] for i in range(nrows)] for j in range(ncols)]
    suffix = [[0] * nrows for _ in range(ncols + 1)]
    for j in range(ncols - 1, -1, -1):
        for i in range(nrows):
            suffix[j][i] = suffix[j + 1][i] + bound * rows[i][j]
    x = [0] * ncols

    def descend(j: int, partial: list[int], has_neg: bool) -> bool:
        if j == ncols:
            return has_neg
        col = cols[j]
        suf = suffix[j + 1]
        for v in range(-bound, bound + 1):
            nxt = [partial[i] + col[i] * v for i in range(nrows)]
            if all(nxt[i] + suf[i] >= 0 for i in range(nrows)):
                x[j] = v
                if descend(j + 1, nxt, has_neg or v < 0):
                    return True
        return False

    if descend(0, [0] * nrows, False):
        return tuple(x)
    return None
