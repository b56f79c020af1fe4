"""Expansion of level data into a common deepest-stage coordinate system.

Every basis vector of every level of a truncation can be written, using only
the defining identities (the stage rewrite ``y -> y+(0,) + s**2 * y+(1,)``,
the carry identity for the ``c_i``, and the defining formula for the level
generator ``V``), as an exact rational combination of *atoms*: the order
unit ``U``, the deepest-stage symbols ``AY(h, y)`` with ``len(y) == depth``,
and ``AC(h, i)`` standing for ``x_h * c_i^(depth)``.

This gives a route to the connecting matrices that is independent of their
closed-form construction: a matrix is correct iff each source basis vector
and its image expand to the same atom combination.  The subgroup action is
likewise checkable atom by atom (``U`` scales by ``h``, symbols translate).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Mapping

from .diagram import DiagramTruncation, LabeledMatrix, Label, LevelIndex
from .groupring import GroupRingElt

Atom = tuple
U_ATOM: Atom = ("U",)

AtomVec = dict[Atom, Fraction]


def _add_into(acc: AtomVec, other: Mapping[Atom, Fraction], scale: Fraction) -> None:
    if scale == 0:
        return
    for atom, c in other.items():
        v = acc.get(atom, Fraction(0)) + scale * c
        if v:
            acc[atom] = v
        else:
            acc.pop(atom, None)


class AmbientExpander:
    """Expands basis vectors of a truncation's levels into atoms."""

    def __init__(self, truncation: DiagramTruncation):
        self.t = truncation
        self._xc_cache: dict[tuple[int, int], AtomVec] = {}

    def xy(self, h: Fraction, bits: tuple[int, ...]) -> AtomVec:
        elt = GroupRingElt.monomial(h, bits).lift_to(self.t.depth, self.t.params)
        return {
            ("AY", g, b): Fraction(c) for (g, b), c in elt.terms.items()
        }

    def _xc_base(self, i: int, n: int) -> AtomVec:
        """Expansion of ``c_i^(n)`` itself (no group translate)."""
        key = (i, n)
        cached = self._xc_cache.get(key)
        if cached is not None:
            return cached
        if n == self.t.depth:
            out: AtomVec = {("AC", Fraction(1), i): Fraction(1)}
        else:
            scale = Fraction(self.t.params.s[n] * self.t.params.t[n])
            out = {}
            _add_into(out, self._xc_base(i, n + 1), scale)
            for (g, bits), value in self.t.residues.at(i, n).items():
                _add_into(out, self.xy(g, bits), Fraction(value))
        self._xc_cache[key] = out
        return out

    @staticmethod
    def translate(h: Fraction, atoms: Mapping[Atom, Fraction]) -> AtomVec:
        """Apply the group element ``h``: the unit scales, symbols shift."""
        out: AtomVec = {}
        for atom, c in atoms.items():
            if atom == U_ATOM:
                out[U_ATOM] = out.get(U_ATOM, Fraction(0)) + c * h
            else:
                kind, g, tail = atom
                key = (kind, h * g, tail)
                out[key] = out.get(key, Fraction(0)) + c
        return {a: c for a, c in out.items() if c}

    def xc(self, h: Fraction, i: int, n: int) -> AtomVec:
        return self.translate(h, self._xc_base(i, n))

    def v(self, index: LevelIndex) -> AtomVec:
        n = index.n
        kn = self.t.params.k[n]
        ln = self.t.params.l[n]
        out: AtomVec = {U_ATOM: Fraction(1, kn)}
        for h in index.F:
            inv = Fraction(1) / h
            for bits in product((0, 1), repeat=n):
                _add_into(out, self.xy(h, bits), -inv * kn)
            for i in range(1, n + 1):
                _add_into(out, self.xc(h, i, n), -inv * ln)
        return out

    def label(self, label: Label, index: LevelIndex) -> AtomVec:
        if label == ("V",):
            return self.v(index)
        kind, h, tail = label
        if kind == "XY":
            return self.xy(h, tail)
        return self.xc(h, tail, index.n)

    # ------------------------------------------------------------------
    # consistency checks built on the expansion

    def embedding_mismatches(self, E: LabeledMatrix) -> list[Label]:
        """Source basis labels whose expansion differs from the expansion
        of their image column.  Empty means the matrix is the genuine
        change of coordinates between the two levels."""
        bad = []
        for col in E.src.basis:
            direct = self.label(col, E.src.index)
            via: AtomVec = {}
            for row, a in E.cols.get(col, {}).items():
                _add_into(via, self.label(row, E.dst.index), Fraction(a))
            if direct != via:
                bad.append(col)
        return bad

    def action_mismatch(self, h: Fraction, index: LevelIndex) -> bool:
        """True when ``h . V(n, F)`` fails to equal ``h * V(n, h F)``."""
        lhs = self.translate(h, self.v(index))
        target = LevelIndex(n=index.n, F=tuple(sorted(h * g for g in index.F)))
        rhs: AtomVec = {}
        _add_into(rhs, self.v(target), Fraction(h))
        return lhs != rhs

    def unit_mismatch(self, index: LevelIndex, u_coords, basis) -> bool:
        """True when the stored unit coordinates fail to assemble the order
        unit atom exactly."""
        acc: AtomVec = {}
        for label, c in zip(basis, u_coords):
            _add_into(acc, self.label(label, index), Fraction(c))
        return acc != {U_ATOM: Fraction(1)}
