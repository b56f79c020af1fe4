"""Ordered level groups and the positive matrices connecting them.

A level is indexed by a stage ``n`` and a finite subset ``F`` of the acting
subgroup.  Its group is ``Z^rank`` with the product order; the order basis
is, in this order,

* ``V`` -- the distinguished level generator,
* ``XY(h, y)`` for ``h in F`` and each 0/1 sequence ``y`` of length ``n``,
* ``XC(h, i)`` for ``h in F`` and ``1 <= i <= n``,

and the order unit has coordinates ``k_n`` on ``V``, ``k_n**2 / h`` on
``XY(h, y)`` and ``k_n * l_n / h`` on ``XC(h, i)``.

The connecting matrix into stage ``n + 1`` (over any ``F'`` containing ``F``
and every translate ``F * F_i``, ``i <= n``) has three column shapes:

* ``XY(h, y)`` maps to ``XY(h, y+(0,)) + s_n**2 * XY(h, y+(1,))``;
* ``XC(h, i)`` maps to ``s_n * t_n * XC(h, i)`` plus, for every carry
  residue at ``(t, y0)``, the residue times ``XY(h*t, y0)``;
* ``V`` maps to ``s_n * V`` plus correction terms whose nonnegativity is
  exactly the growth inequality built into the scale parameters.

Every column keeps a private positive coordinate (``XY(h, y+(1,))``,
``XC(h, i)``, ``V`` respectively), which is the structural reason these
matrices are order embeddings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .groupring import (
    EnumB,
    GroupRingElt,
    ParamSeq,
    ResidueTable,
    WDiffs,
    default_enumeration,
    make_params,
    run_carry,
    sample_wdiffs,
)
from .ratlattice import SubgroupH, contains, ensure_positive_rational
from .simplicial import RatBoundPair, SimplicialLevel, bound_pair

Label = tuple
V_LABEL: Label = ("V",)
Bits = tuple[int, ...]


class ClosureError(ValueError):
    """Destination support set misses a required translate."""


def xy_label(h: Fraction, bits: Bits) -> Label:
    return ("XY", h, bits)


def xc_label(h: Fraction, i: int) -> Label:
    return ("XC", h, i)


@dataclass(frozen=True)
class LevelIndex:
    """Stage ``n`` together with its sorted support set ``F``."""

    n: int
    F: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("negative stage")
        if not self.F:
            raise ValueError("support set must be nonempty")
        ordered = tuple(sorted(ensure_positive_rational(h) for h in self.F))
        if ordered != self.F:
            object.__setattr__(self, "F", ordered)
        if len(set(self.F)) != len(self.F):
            raise ValueError("support set has repeats")


def order_basis(index: LevelIndex) -> list[Label]:
    basis: list[Label] = [V_LABEL]
    for h in index.F:
        for bits in product((0, 1), repeat=index.n):
            basis.append(xy_label(h, bits))
    for h in index.F:
        for i in range(1, index.n + 1):
            basis.append(xc_label(h, i))
    return basis


@dataclass
class LevelGroup:
    """A materialised level: basis order, unit coordinates, parameters."""

    index: LevelIndex
    basis: list[Label]
    pos: dict[Label, int]
    u_coords: tuple[Fraction, ...]
    params: ParamSeq

    @property
    def rank(self) -> int:
        return len(self.basis)


def build_level(
    index: LevelIndex, params: ParamSeq, subgroup: SubgroupH | None = None
) -> LevelGroup:
    """Materialise the level at ``index``.

    When ``subgroup`` is given, every element of ``F`` must belong to it.
    """
    if index.n > params.depth:
        raise ValueError(
            f"stage {index.n} exceeds the parameter depth {params.depth}"
        )
    if subgroup is not None:
        for h in index.F:
            if not contains(subgroup, h):
                raise ValueError(f"{h} is not an element of the subgroup")
    kn = params.k[index.n]
    ln = params.l[index.n]
    basis = order_basis(index)
    coords: list[Fraction] = []
    for label in basis:
        if label == V_LABEL:
            coords.append(Fraction(kn))
        elif label[0] == "XY":
            coords.append(Fraction(kn * kn) / label[1])
        else:
            coords.append(Fraction(kn * ln) / label[1])
    return LevelGroup(
        index=index,
        basis=basis,
        pos={lab: i for i, lab in enumerate(basis)},
        u_coords=tuple(coords),
        params=params,
    )


def is_integral_level(level: LevelGroup) -> bool:
    """True when every unit coordinate is an integer, i.e. when the
    numerator of each ``h in F`` divides both ``k_n`` and ``l_n``."""
    kn = level.params.k[level.index.n]
    ln = level.params.l[level.index.n]
    return all(
        (Fraction(kn) / h).denominator == 1
        and (Fraction(ln) / h).denominator == 1
        for h in level.index.F
    )


def to_simplicial(level: LevelGroup) -> SimplicialLevel:
    if not is_integral_level(level):
        raise ValueError("level unit is not integral")
    return SimplicialLevel(
        rank=level.rank, unit=tuple(int(c) for c in level.u_coords)
    )


def rl_at_level(coords: Sequence[int], level: LevelGroup) -> RatBoundPair:
    """Exact least/greatest rational multiples of the unit bounding an
    integral element given by its basis coordinates."""
    return bound_pair(coords, to_simplicial(level))


# --------------------------------------------------------------------------
# labelled matrices


@dataclass
class LabeledMatrix:
    """Column-sparse matrix between two levels, keyed by basis labels."""

    src: LevelGroup
    dst: LevelGroup
    cols: dict[Label, dict[Label, Fraction]]

    def entry(self, row: Label, col: Label) -> Fraction:
        return self.cols.get(col, {}).get(row, Fraction(0))

    def apply(self, vec: Sequence[Fraction]) -> list[Fraction]:
        if len(vec) != self.src.rank:
            raise ValueError("vector length mismatch")
        out = [Fraction(0)] * self.dst.rank
        for col, column in self.cols.items():
            c = vec[self.src.pos[col]]
            if c == 0:
                continue
            for row, a in column.items():
                out[self.dst.pos[row]] += a * c
        return out

    def to_rows(self) -> list[list[Fraction]]:
        dense = [
            [Fraction(0)] * self.src.rank for _ in range(self.dst.rank)
        ]
        for col, column in self.cols.items():
            j = self.src.pos[col]
            for row, a in column.items():
                dense[self.dst.pos[row]][j] = Fraction(a)
        return dense

    def same_entries(self, other: "LabeledMatrix") -> bool:
        def norm(m: "LabeledMatrix") -> dict:
            return {
                c: {r: Fraction(a) for r, a in col.items() if a != 0}
                for c, col in m.cols.items()
                if any(a != 0 for a in col.values())
            }

        return norm(self) == norm(other)


def identity_matrix(level: LevelGroup) -> LabeledMatrix:
    return LabeledMatrix(
        src=level,
        dst=level,
        cols={lab: {lab: Fraction(1)} for lab in level.basis},
    )


def compose(after: LabeledMatrix, before: LabeledMatrix) -> LabeledMatrix:
    if after.src.index != before.dst.index:
        raise ValueError("matrices are not composable")
    cols: dict[Label, dict[Label, Fraction]] = {}
    for col, column in before.cols.items():
        acc: dict[Label, Fraction] = {}
        for mid, a in column.items():
            for row, b in after.cols.get(mid, {}).items():
                key = row
                val = acc.get(key, Fraction(0)) + Fraction(a) * b
                acc[key] = val
        cols[col] = {r: v for r, v in acc.items() if v != 0}
    return LabeledMatrix(src=before.src, dst=after.dst, cols=cols)


def labeled_criterion(M: LabeledMatrix) -> bool:
    """The private-positive-coordinate order-embedding test, sparse form."""
    usage: dict[Label, int] = {}
    for column in M.cols.values():
        for row, a in column.items():
            if a < 0:
                return False
            if a != 0:
                usage[row] = usage.get(row, 0) + 1
    for label in M.src.basis:
        column = M.cols.get(label, {})
        if not any(a > 0 and usage[row] == 1 for row, a in column.items()):
            return False
    return True


# --------------------------------------------------------------------------
# support-set closure


def closure_step(
    F: Iterable[Fraction], n: int, supports: Sequence[Iterable[Fraction]]
) -> tuple[Fraction, ...]:
    """Minimal admissible support set one stage up: ``F`` together with
    every translate ``F * F_i`` for ``i <= n``."""
    out = set(F)
    base = tuple(out)
    for i in range(1, n + 1):
        for t in supports[i - 1]:
            out.update(f * t for f in base)
    return tuple(sorted(out))


def cofinal_extension(
    index: LevelIndex, m: int, supports: Sequence[Iterable[Fraction]]
) -> LevelIndex:
    """Index of the stage-``m`` level reached by iterating the minimal
    closure from ``index``."""
    if m < index.n:
        raise ValueError("target stage below the current one")
    F = index.F
    for n in range(index.n, m):
        F = closure_step(F, n, supports)
    return LevelIndex(n=m, F=F)


# --------------------------------------------------------------------------
# connecting matrices


def embedding_matrix(
    src: LevelGroup,
    dst: LevelGroup,
    residues: ResidueTable,
    supports: Sequence[Iterable[Fraction]],
) -> LabeledMatrix:
    """The connecting matrix of ``src`` into ``dst`` (one stage up).

    Requires ``dst.F`` to contain ``src.F`` and all translates
    ``src.F * F_i`` for ``i <= n``; raises :class:`ClosureError` otherwise.
    A negative entry can only arise from corrupted scale parameters and
    raises :class:`ArithmeticError`.
    """
    n = src.index.n
    if dst.index.n != n + 1:
        raise ValueError("destination must be one stage up")
    params = src.params
    needed = set(closure_step(src.index.F, n, supports))
    if not needed.issubset(set(dst.index.F)):
        missing = sorted(needed - set(dst.index.F))
        raise ClosureError(f"destination support misses {missing}")
    sn, tn = params.s[n], params.t[n]
    kn, ln = params.k[n], params.l[n]
    ln1 = params.l[n + 1]
    src_F = set(src.index.F)
    cols: dict[Label, dict[Label, Fraction]] = {}

    for h in src.index.F:
        for bits in product((0, 1), repeat=n):
            cols[xy_label(h, bits)] = {
                xy_label(h, bits + (0,)): Fraction(1),
                xy_label(h, bits + (1,)): Fraction(sn * sn),
            }
        for i in range(1, n + 1):
            column: dict[Label, Fraction] = {
                xc_label(h, i): Fraction(sn * tn)
            }
            for (t, bits), value in residues.at(i, n).items():
                key = xy_label(h * t, bits)
                column[key] = column.get(key, Fraction(0)) + Fraction(value)
            cols[xc_label(h, i)] = column

    vcol: dict[Label, Fraction] = {V_LABEL: Fraction(sn)}
    for g in dst.index.F:
        vcol[xc_label(g, n + 1)] = Fraction(sn * ln1) / g
        if g not in src_F:
            for i in range(1, n + 1):
                vcol[xc_label(g, i)] = Fraction(sn * ln1) / g
            for bits in product((0, 1), repeat=n + 1):
                vcol[xy_label(g, bits)] = Fraction(kn * sn * sn) / g
        else:
            for bits in product((0, 1), repeat=n):
                vcol[xy_label(g, bits + (0,))] = (
                    Fraction(kn * (sn * sn - 1)) / g
                )
    for h in src.index.F:
        for i in range(1, n + 1):
            for (t, bits), value in residues.at(i, n).items():
                key = xy_label(h * t, bits)
                vcol[key] = vcol.get(key, Fraction(0)) - Fraction(ln * value) / h
    for row, a in vcol.items():
        if a < 0:
            raise ArithmeticError(
                f"negative connecting entry {a} at {row}; "
                "scale parameters violate the growth inequality"
            )
    cols[V_LABEL] = {r: a for r, a in vcol.items() if a != 0}
    return LabeledMatrix(src=src, dst=dst, cols=cols)


@dataclass
class EmbeddingReport:
    """Outcome of the structural checks on one connecting matrix."""

    violations: list[str]
    checked: dict[str, int]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_embedding(E: LabeledMatrix) -> EmbeddingReport:
    """Nonnegativity, designated private coordinates, unit preservation."""
    violations: list[str] = []
    entries = 0
    usage: dict[Label, int] = {}
    for col, column in E.cols.items():
        for row, a in column.items():
            entries += 1
            if a != 0:
                usage[row] = usage.get(row, 0) + 1
            if a < 0:
                violations.append(f"negative entry {a} at ({row}, {col})")

    def private_row(col: Label) -> Label:
        if col == V_LABEL:
            return V_LABEL
        kind, h, tail = col
        if kind == "XY":
            return xy_label(h, tail + (1,))
        return col

    for col in E.src.basis:
        row = private_row(col)
        if E.entry(row, col) <= 0:
            violations.append(f"column {col}: designated row {row} not positive")
        elif usage.get(row, 0) != 1:
            violations.append(f"column {col}: designated row {row} is shared")
    image = E.apply(E.src.u_coords)
    if tuple(image) != tuple(E.dst.u_coords):
        violations.append("unit coordinates are not preserved")
    return EmbeddingReport(
        violations=violations,
        checked={"entries": entries, "columns": E.src.rank},
    )


# --------------------------------------------------------------------------
# subgroup action


def h_action(
    h: Fraction | int,
    level: LevelGroup,
    subgroup: SubgroupH | None = None,
) -> LabeledMatrix:
    """The monomial matrix of the action of ``h``: ``V`` scales by ``h``
    into the translated level, ``XY``/``XC`` labels translate."""
    h = ensure_positive_rational(h)
    if subgroup is not None and not contains(subgroup, h):
        raise ValueError(f"{h} is not an element of the subgroup")
    dst_index = LevelIndex(
        n=level.index.n, F=tuple(sorted(h * g for g in level.index.F))
    )
    dst = build_level(dst_index, level.params, subgroup)
    cols: dict[Label, dict[Label, Fraction]] = {
        V_LABEL: {V_LABEL: Fraction(h)}
    }
    for g in level.index.F:
        for bits in product((0, 1), repeat=level.index.n):
            cols[xy_label(g, bits)] = {xy_label(h * g, bits): Fraction(1)}
        for i in range(1, level.index.n + 1):
            cols[xc_label(g, i)] = {xc_label(h * g, i): Fraction(1)}
    return LabeledMatrix(src=level, dst=dst, cols=cols)


# --------------------------------------------------------------------------
# the truncation


@dataclass
class DiagramTruncation:
    """Everything materialised for one finite run of the construction."""

    subgroup: SubgroupH
    depth: int
    seed: int
    f0: tuple[Fraction, ...]
    enum: EnumB
    params: ParamSeq
    wdiffs: WDiffs
    residues: ResidueTable
    b_table: Mapping[tuple[int, int], GroupRingElt]
    levels: list[LevelGroup]
    embeddings: list[LabeledMatrix]

    def supports(self) -> list[frozenset[Fraction]]:
        return self.enum.supports()


def build_truncation(
    subgroup: SubgroupH, depth: int = 4, seed: int = 0
) -> DiagramTruncation:
    """Deterministically build the depth-``depth`` truncation for ``seed``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    f0 = (Fraction(1),)
    enum = default_enumeration(subgroup, depth, seed)
    supports = enum.supports()
    params = make_params(supports, depth)
    wrng = random.Random(seed * 1_000_003 + 7919)
    wdiffs = sample_wdiffs(params, depth, wrng)
    residues, b_table = run_carry(enum, params, wdiffs, depth)
    indices = [LevelIndex(n=0, F=f0)]
    for n in range(depth):
        indices.append(
            LevelIndex(
                n=n + 1, F=closure_step(indices[n].F, n, supports)
            )
        )
    levels = [build_level(ix, params, subgroup) for ix in indices]
    embeddings = [
        embedding_matrix(levels[n], levels[n + 1], residues, supports)
        for n in range(depth)
    ]
    return DiagramTruncation(
        subgroup=subgroup,
        depth=depth,
        seed=seed,
        f0=f0,
        enum=enum,
        params=params,
        wdiffs=wdiffs,
        residues=residues,
        b_table=b_table,
        levels=levels,
        embeddings=embeddings,
    )


# --------------------------------------------------------------------------
# unit-orbit certificates


@dataclass(frozen=True)
class OrbitActionCheck:
    level_n: int
    src_F: tuple[Fraction, ...]
    dst_F: tuple[Fraction, ...]
    criterion_ok: bool
    inverse_ok: bool
    unit_scaled: bool
    roundtrip_identity: bool

    @property
    def ok(self) -> bool:
        return (
            self.criterion_ok
            and self.inverse_ok
            and self.unit_scaled
            and self.roundtrip_identity
        )


@dataclass(frozen=True)
class OrbitCertificate:
    """Witness that the classes of ``n * unit`` and ``m * unit`` agree.

    ``h = m / n`` is the acting element; the per-level checks confirm its
    action matrix and the inverse are order embeddings carrying ``n * unit``
    to ``m * unit`` exactly.
    """

    n: int
    m: int
    h: Fraction
    checks: tuple[OrbitActionCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "h": str(self.h),
            "levels": [
                {
                    "stage": c.level_n,
                    "src_F": [str(x) for x in c.src_F],
                    "dst_F": [str(x) for x in c.dst_F],
                    "ok": c.ok,
                }
                for c in self.checks
            ],
        }


def orbit_certificate(
    n: int, m: int, truncation: DiagramTruncation
) -> OrbitCertificate | None:
    """Certificate that ``n/m`` lies in the subgroup, hence the scaled units
    share an orbit -- or None when it does not."""
    if n <= 0 or m <= 0:
        raise ValueError("expected positive integers")
    if not contains(truncation.subgroup, Fraction(n, m)):
        return None
    h = Fraction(m, n)
    checks = []
    for level in truncation.levels:
        act = h_action(h, level, truncation.subgroup)
        inv = h_action(1 / h, act.dst, truncation.subgroup)
        image = act.apply(level.u_coords)
        expected = [h * c for c in act.dst.u_coords]
        roundtrip = compose(inv, act)
        checks.append(
            OrbitActionCheck(
                level_n=level.index.n,
                src_F=level.index.F,
                dst_F=act.dst.index.F,
                criterion_ok=labeled_criterion(act),
                inverse_ok=labeled_criterion(inv),
                unit_scaled=image == expected,
                roundtrip_identity=roundtrip.same_entries(
                    identity_matrix(level)
                ),
            )
        )
    return OrbitCertificate(n=n, m=m, h=h, checks=tuple(checks))
