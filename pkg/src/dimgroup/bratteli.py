"""Chains of multi-matrix algebras and their ordered K-theory data.

An ultramatricial presentation is a finite chain of block-size vectors
joined by nonnegative integer multiplicity matrices that are *unital*:
multiplicities weighted by source block sizes reproduce the destination
sizes.  Its ordered K-theory datum is the chain of simplicial groups
``Z^blocks`` with the block-size vector as order unit and the same matrices
as connecting maps; a map that carries a private positive coordinate per
column is a certified order embedding, others are flagged.

``presentation_from_truncation`` extracts this dictionary from a diagram
truncation by composing the connecting matrices between consecutive levels
with integral unit, where the composed matrices are integer matrices.
``localization_model`` builds the stationary chain whose limit inverts a
fixed set of primes, which gives an independent model for unit-orbit
questions about subgroups generated by those primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Mapping, Sequence

from .diagram import DiagramTruncation, compose, is_integral_level
from .ratlattice import factor_integer
from .simplicial import SimplicialLevel, embedding_criterion

IntMatrix = tuple[tuple[int, ...], ...]


def _as_int_matrix(rows: Iterable[Iterable[int]]) -> IntMatrix:
    out = tuple(tuple(r) for r in rows)
    if not out:
        raise ValueError("empty matrix")
    width = len(out[0])
    for r in out:
        if len(r) != width:
            raise ValueError("ragged matrix")
        for a in r:
            if isinstance(a, bool) or not isinstance(a, int):
                raise ValueError(f"entry {a!r} is not an integer")
            if a < 0:
                raise ValueError(f"negative multiplicity {a}")
    return out


def _mat_vec(m: IntMatrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def _mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if len(b) and len(a[0]) != len(b):
        raise ValueError("shape mismatch in matrix product")
    return tuple(
        tuple(
            sum(a[i][k] * b[k][j] for k in range(len(b)))
            for j in range(len(b[0]))
        )
        for i in range(len(a))
    )


def _identity(n: int) -> IntMatrix:
    return tuple(
        tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
    )


@dataclass(frozen=True)
class MultiMatrixLevel:
    """Block sizes of one finite-dimensional multi-matrix algebra."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.sizes or any(
            not isinstance(s, int) or s <= 0 for s in self.sizes
        ):
            raise ValueError("block sizes must be positive integers")


@dataclass(frozen=True)
class UltramatricialPresentation:
    """A finite unital chain of multi-matrix algebras.

    ``maps[j]`` has one row per block of level ``j + 1`` and one column per
    block of level ``j``; unitality ``maps[j] @ sizes[j] == sizes[j + 1]``
    is enforced on construction.  The K-theory class of the identity at
    level ``j`` is exactly ``sizes[j]``.
    """

    levels: tuple[MultiMatrixLevel, ...]
    maps: tuple[IntMatrix, ...]

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("need at least one level")
        if len(self.maps) != len(self.levels) - 1:
            raise ValueError("need exactly one map per consecutive pair")
        for j, m in enumerate(self.maps):
            m = _as_int_matrix(m)
            src = self.levels[j].sizes
            dst = self.levels[j + 1].sizes
            if len(m[0]) != len(src) or len(m) != len(dst):
                raise ValueError(f"map {j} has the wrong shape")
            if _mat_vec(m, src) != dst:
                raise ValueError(
                    f"map {j} is not unital: {m} @ {src} != {dst}"
                )

    def compose_range(self, a: int, b: int) -> IntMatrix:
        """Composite multiplicity matrix from level ``a`` to level ``b``."""
        if not 0 <= a <= b < len(self.levels):
            raise ValueError("bad level range")
        out = _identity(len(self.levels[a].sizes))
        for j in range(a, b):
            out = _mat_mul(self.maps[j], out)
        return out


def k0(
    p: UltramatricialPresentation,
) -> tuple[tuple[SimplicialLevel, ...], tuple[IntMatrix, ...], tuple[bool, ...]]:
    """Ordered K-theory of the chain.

    Returns the simplicial levels (block count, sizes vector as unit), the
    connecting matrices, and one flag per matrix telling whether it passes
    the structural order-embedding test.
    """
    levels = tuple(
        SimplicialLevel(rank=len(lv.sizes), unit=lv.sizes) for lv in p.levels
    )
    flags = tuple(embedding_criterion(m) for m in p.maps)
    return levels, p.maps, flags


def morita_scale(
    p: UltramatricialPresentation, n: int
) -> UltramatricialPresentation:
    """The same diagram with every block (hence the unit class) scaled."""
    if not isinstance(n, int) or n <= 0:
        raise ValueError("scale must be a positive integer")
    return UltramatricialPresentation(
        levels=tuple(
            MultiMatrixLevel(sizes=tuple(n * s for s in lv.sizes))
            for lv in p.levels
        ),
        maps=p.maps,
    )


# --------------------------------------------------------------------------
# intertwinings


@dataclass(frozen=True)
class IntertwiningCertificate:
    """An interleaved ladder of unital maps between two chains.

    ``forward[i]`` maps level ``a_levels[i]`` of the first chain to level
    ``b_levels[i]`` of the second; ``backward[i]`` maps ``b_levels[i]`` to
    ``a_levels[i + 1]``.  Validity means every triangle commutes with the
    chains' own composite maps.
    """

    a_levels: tuple[int, ...]
    b_levels: tuple[int, ...]
    forward: tuple[IntMatrix, ...]
    backward: tuple[IntMatrix, ...]


def verify_intertwining(
    pa: UltramatricialPresentation,
    pb: UltramatricialPresentation,
    cert: IntertwiningCertificate,
) -> bool:
    """Exact commutation check of an intertwining ladder.

    Structural defects (bad indices, wrong shapes) raise ``ValueError``;
    a well-formed ladder that fails to commute or to respect the unit
    classes returns False.
    """
    k = len(cert.forward)
    if k == 0 or len(cert.a_levels) != k or len(cert.b_levels) != k:
        raise ValueError("ladder lengths are inconsistent")
    if len(cert.backward) != k - 1:
        raise ValueError("need one backward map between consecutive rungs")
    if any(
        cert.a_levels[i] > cert.a_levels[i + 1] for i in range(k - 1)
    ) or any(cert.b_levels[i] > cert.b_levels[i + 1] for i in range(k - 1)):
        raise ValueError("ladder levels must be nondecreasing")
    if cert.a_levels[0] < 0 or cert.a_levels[-1] >= len(pa.levels):
        raise ValueError("first-chain level out of range")
    if cert.b_levels[0] < 0 or cert.b_levels[-1] >= len(pb.levels):
        raise ValueError("second-chain level out of range")
    fwd = [_as_int_matrix(m) for m in cert.forward]
    bwd = [_as_int_matrix(m) for m in cert.backward]
    for i in range(k):
        a_sizes = pa.levels[cert.a_levels[i]].sizes
        b_sizes = pb.levels[cert.b_levels[i]].sizes
        if len(fwd[i]) != len(b_sizes) or len(fwd[i][0]) != len(a_sizes):
            raise ValueError(f"forward map {i} has the wrong shape")
        if _mat_vec(fwd[i], a_sizes) != b_sizes:
            return False
    for i in range(k - 1):
        b_sizes = pb.levels[cert.b_levels[i]].sizes
        a_next = pa.levels[cert.a_levels[i + 1]].sizes
        if len(bwd[i]) != len(a_next) or len(bwd[i][0]) != len(b_sizes):
            raise ValueError(f"backward map {i} has the wrong shape")
        if _mat_vec(bwd[i], b_sizes) != a_next:
            return False
        lhs = _mat_mul(bwd[i], fwd[i])
        rhs = pa.compose_range(cert.a_levels[i], cert.a_levels[i + 1])
        if lhs != rhs:
            return False
        lhs = _mat_mul(fwd[i + 1], bwd[i])
        rhs = pb.compose_range(cert.b_levels[i], cert.b_levels[i + 1])
        if lhs != rhs:
            return False
    return True


def identity_intertwining(
    p: UltramatricialPresentation,
) -> IntertwiningCertificate:
    """The tautological self-intertwining of a chain."""
    k = len(p.levels)
    idx = tuple(range(k))
    return IntertwiningCertificate(
        a_levels=idx,
        b_levels=idx,
        forward=tuple(_identity(len(lv.sizes)) for lv in p.levels),
        backward=tuple(p.maps),
    )


# --------------------------------------------------------------------------
# dictionary with the diagram truncation


def presentation_from_truncation(
    truncation: DiagramTruncation,
) -> UltramatricialPresentation:
    """The multi-matrix chain carried by the integral levels.

    Composites of the connecting matrices between consecutive integral
    levels have integer entries; together with the integral unit
    coordinates as block sizes they form a unital chain whose ordered
    K-theory reproduces the truncation's order data on those levels.
    """
    spots = [
        j for j, lv in enumerate(truncation.levels) if is_integral_level(lv)
    ]
    if not spots:
        raise ValueError("truncation has no integral level")
    levels = []
    for j in spots:
        lv = truncation.levels[j]
        levels.append(
            MultiMatrixLevel(sizes=tuple(int(c) for c in lv.u_coords))
        )
    maps: list[IntMatrix] = []
    for a, b in zip(spots, spots[1:]):
        comp = truncation.embeddings[a]
        for j in range(a + 1, b):
            comp = compose(truncation.embeddings[j], comp)
        dense = comp.to_rows()
        rows = []
        for row in dense:
            out_row = []
            for val in row:
                v = Fraction(val)
                if v.denominator != 1:
                    raise ArithmeticError(
                        "composite between integral levels has a "
                        f"non-integer entry {v}"
                    )
                out_row.append(int(v))
            rows.append(tuple(out_row))
        maps.append(tuple(rows))
    return UltramatricialPresentation(levels=tuple(levels), maps=tuple(maps))


def localization_model(
    primes: Sequence[int], depth: int
) -> UltramatricialPresentation:
    """Stationary chain whose limit inverts the given primes.

    Level ``j`` is a single block; the map into the next level multiplies
    by the primes in cyclic order.  With an empty prime list the chain is
    constant.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    ps = list(primes)
    for p in ps:
        if not isinstance(p, int) or p < 2 or factor_integer(p) != {p: 1}:
            raise ValueError(f"{p!r} is not a prime")
    sizes = [1]
    maps = []
    for j in range(depth - 1):
        mult = ps[j % len(ps)] if ps else 1
        maps.append(((mult,),))
        sizes.append(sizes[-1] * mult)
    return UltramatricialPresentation(
        levels=tuple(MultiMatrixLevel(sizes=(s,)) for s in sizes),
        maps=tuple(maps),
    )


def localized_unit_orbit(
    model: UltramatricialPresentation, n: int, m: int
) -> bool:
    """Do ``n * unit`` and ``m * unit`` agree in the limit of the model?

    In the localization inverting a prime set ``S`` this holds iff ``n`` and
    ``m`` agree after stripping all factors from ``S``; the primes are read
    off the model's own multipliers.
    """
    if n <= 0 or m <= 0:
        raise ValueError("expected positive integers")
    primes: set[int] = set()
    for mp in model.maps:
        for row in mp:
            for a in row:
                if a > 1:
                    primes.update(factor_integer(a))

    def strip(x: int) -> int:
        for p in primes:
            while x % p == 0:
                x //= p
        return x

    return strip(n) == strip(m)


# --------------------------------------------------------------------------
# serialisation


def presentation_to_json(p: UltramatricialPresentation) -> dict:
    return {
        "schema_version": 1,
        "levels": [list(lv.sizes) for lv in p.levels],
        "maps": [[list(r) for r in m] for m in p.maps],
    }


def presentation_from_json(data: Mapping) -> UltramatricialPresentation:
    return UltramatricialPresentation(
        levels=tuple(
            MultiMatrixLevel(sizes=tuple(s)) for s in data["levels"]
        ),
        maps=tuple(tuple(tuple(r) for r in m) for m in data["maps"]),
    )


def presentation_dot(p: UltramatricialPresentation) -> str:
    """Graphviz rendering: one node per block, multiplicities as edges."""
    lines = ["digraph bratteli {", "  rankdir=LR;"]
    for j, lv in enumerate(p.levels):
        for b, size in enumerate(lv.sizes):
            lines.append(f'  L{j}B{b} [label="{size}"];')
    for j, m in enumerate(p.maps):
        for i, row in enumerate(m):
            for b, mult in enumerate(row):
                if mult > 0:
                    attr = f' [label="{mult}"]' if mult > 1 else ""
                    lines.append(f"  L{j}B{b} -> L{j + 1}B{i}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
