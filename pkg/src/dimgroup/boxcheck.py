"""Dispatch layer for the box-enumeration oracle.

Picks the compiled kernel when it imported cleanly and the arithmetic fits
in int64, otherwise the pure-Python kernel.  Setting the environment
variable ``DIMGROUP_PURE_PYTHON=1`` forces the fallback (useful for
benchmarks and for testing kernel parity).
"""

from __future__ import annotations

import os
from typing import Sequence

from . import _pyboxkernel

try:
    from . import _boxkernel  # compiled; absent when built without Cython
except ImportError:  # pragma: no cover - depends on build environment
    _boxkernel = None

MAX_POINTS = 10_000_000
_INT64_SAFE = 1 << 62


class EnumerationBudgetError(RuntimeError):
    """The requested box has more points than the enumeration budget."""


def have_compiled_kernel() -> bool:
    return _boxkernel is not None


def backend_name() -> str:
    if _boxkernel is not None and not os.environ.get("DIMGROUP_PURE_PYTHON"):
        return "compiled"
    return "python"


def enumeration_points(ncols: int, bound: int) -> int:
    return (2 * bound + 1) ** ncols


def _as_int_matrix(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    rows = []
    width = None
    for row in matrix:
        cleaned = []
        for a in row:
            if isinstance(a, bool) or not isinstance(a, int):
                raise TypeError(f"matrix entries must be integers, got {a!r}")
            cleaned.append(a)
        if width is None:
            width = len(cleaned)
        elif len(cleaned) != width:
            raise ValueError("matrix rows have unequal lengths")
        rows.append(cleaned)
    return rows


def _fits_int64(rows: list[list[int]], bound: int) -> bool:
    for row in rows:
        if sum(abs(a) for a in row) * bound >= _INT64_SAFE:
            return False
    return True


def find_violation(
    matrix: Sequence[Sequence[int]],
    bound: int,
    force_python: bool | None = None,
) -> tuple[int, ...] | None:
    """Some x in the box witnessing that ``matrix`` is not an order
    embedding (``x >= 0`` iff ``M x >= 0`` fails), or None if the box holds
    no witness.

    Raises :class:`EnumerationBudgetError` when the box exceeds
    ``MAX_POINTS`` points.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    rows = _as_int_matrix(matrix)
    ncols = len(rows[0]) if rows else 0
    if enumeration_points(ncols, bound) > MAX_POINTS:
        raise EnumerationBudgetError(
            f"box of {enumeration_points(ncols, bound)} points exceeds the "
            f"budget of {MAX_POINTS}"
        )
    if force_python is None:
        force_python = bool(os.environ.get("DIMGROUP_PURE_PYTHON"))
    if (
        _boxkernel is not None
        and not force_python
        and _fits_int64(rows, max(bound, 1))
    ):
        import array

        flat = array.array("q", [a for row in rows for a in row])
        idx = _boxkernel.check_box(flat, len(rows), ncols, bound)
        if idx < 0:
            return None
        # odometer index -> coordinates (mixed radix, most significant first)
        base = 2 * bound + 1
        digits = [0] * ncols
        for j in range(ncols - 1, -1, -1):
            digits[j] = idx % base - bound
            idx //= base
        return tuple(digits)
    return _pyboxkernel.find_violation(rows, bound)
