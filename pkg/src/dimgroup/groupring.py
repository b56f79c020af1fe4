"""Staged group-ring data feeding the level construction.

Stage ``n`` works in the free abelian group on symbols ``x_h * y`` where
``h`` is a positive rational (an element of the acting subgroup) and ``y``
is a 0/1 sequence of length ``n``.  Three pieces of machinery live here:

* ``rebase`` -- the identification of stage ``n`` inside stage ``n + 1``:
  every sequence ``y`` is rewritten as ``y+(0,)`` plus ``s_n**2`` times
  ``y+(1,)``.

* ``make_params`` -- the scale sequences ``s_n, t_n`` and their running
  products ``k_n = s_0*...*s_{n-1}``, ``l_n = t_0*...*t_{n-1}``.  The policy
  keeps ``t_n`` a multiple of ``max(n, 1)``, keeps ``t_n`` a divisor of
  ``s_n``, makes ``(n+1)!`` divide ``l_{n+1}`` (so every integer eventually
  divides both running products), and picks ``s_n`` minimal with the growth
  inequality ``k_n*(s_n**2 - 1) >= l_n*s_n*t_n * sum of all support values``
  needed later for positivity of the connecting matrices.

* the carry recursion -- given enumerated elements ``b_1, b_2, ...`` and
  per-step offsets ``d``, repeatedly divide ``d * b_i + b_i^(n)``, rebased
  one stage up, by ``s_n * t_n``.  Quotients become the next ``b_i^(n+1)``;
  remainders are the canonical residues in ``[0, s_n*t_n)`` consumed by the
  connecting matrices.  Coefficients of sequences ending in 1 pick up a
  factor ``s_n**2`` from the rebase, and since ``t_n`` divides ``s_n`` they
  leave no remainder; the recursion checks this invariant and only emits
  residues on sequences ending in 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd, lcm
from typing import Iterable, Mapping, Sequence

from .ratlattice import SubgroupH, ensure_positive_rational

Bits = tuple[int, ...]
TermKey = tuple[Fraction, Bits]


class CarryConsistencyError(ArithmeticError):
    """A coefficient that must be divisible by ``s_n * t_n`` was not."""


# --------------------------------------------------------------------------
# group-ring elements


class GroupRingElt:
    """Finitely supported integer combination of symbols ``x_h * y``.

    Immutable in practice: every operation returns a fresh element.  Terms
    with zero coefficient are dropped on construction.
    """

    __slots__ = ("stage", "terms")

    def __init__(self, stage: int, terms: Mapping[TermKey, int] | None = None):
        if not isinstance(stage, int) or stage < 0:
            raise ValueError(f"bad stage {stage!r}")
        clean: dict[TermKey, int] = {}
        for (h, bits), c in (terms or {}).items():
            if not isinstance(c, int):
                raise TypeError(f"coefficient {c!r} is not an integer")
            if c == 0:
                continue
            h = ensure_positive_rational(h)
            bits = tuple(bits)
            if len(bits) != stage or any(b not in (0, 1) for b in bits):
                raise ValueError(f"bad sequence {bits!r} at stage {stage}")
            clean[(h, bits)] = c
        self.stage = stage
        self.terms = clean

    # construction helpers
    @classmethod
    def zero(cls, stage: int) -> "GroupRingElt":
        return cls(stage, {})

    @classmethod
    def monomial(
        cls, h: Fraction | int, bits: Bits, coeff: int = 1
    ) -> "GroupRingElt":
        return cls(len(bits), {(Fraction(h), tuple(bits)): coeff})

    # predicates and views
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> frozenset[Fraction]:
        """The group elements carrying a nonzero coefficient."""
        return frozenset(h for h, _ in self.terms)

    def coefficient(self, h: Fraction | int, bits: Bits) -> int:
        return self.terms.get((Fraction(h), tuple(bits)), 0)

    # arithmetic
    def _binop(self, other: "GroupRingElt", sign: int) -> "GroupRingElt":
        if self.stage != other.stage:
            raise ValueError("stage mismatch")
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + sign * c
        return GroupRingElt(self.stage, out)

    def __add__(self, other: "GroupRingElt") -> "GroupRingElt":
        return self._binop(other, 1)

    def __sub__(self, other: "GroupRingElt") -> "GroupRingElt":
        return self._binop(other, -1)

    def __neg__(self) -> "GroupRingElt":
        return self.scaled(-1)

    def scaled(self, c: int) -> "GroupRingElt":
        return GroupRingElt(
            self.stage, {k: c * v for k, v in self.terms.items()}
        )

    def shifted(self, h: Fraction | int) -> "GroupRingElt":
        """Left multiplication by the group element ``h``."""
        h = ensure_positive_rational(h)
        return GroupRingElt(
            self.stage,
            {(h * g, bits): c for (g, bits), c in self.terms.items()},
        )

    def rebase(self, params: "ParamSeq") -> "GroupRingElt":
        """Rewrite at the next stage: ``y -> y+(0,) + s_n**2 * y+(1,)``."""
        n = self.stage
        if n >= len(params.s):
            raise ValueError(f"stage {n} is at the truncation limit")
        sq = params.s[n] ** 2
        out: dict[TermKey, int] = {}
        for (h, bits), c in self.terms.items():
            out[(h, bits + (0,))] = c
            out[(h, bits + (1,))] = c * sq
        return GroupRingElt(n + 1, out)

    def lift_to(self, stage: int, params: "ParamSeq") -> "GroupRingElt":
        out = self
        while out.stage < stage:
            out = out.rebase(params)
        if out.stage != stage:
            raise ValueError(f"cannot lower stage {self.stage} to {stage}")
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GroupRingElt)
            and self.stage == other.stage
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.stage, frozenset(self.terms.items())))

    def sorted_terms(self) -> list[tuple[Fraction, Bits, int]]:
        return sorted(
            ((h, bits, c) for (h, bits), c in self.terms.items()),
            key=lambda t: (t[0], t[1]),
        )

    def __repr__(self) -> str:
        if not self.terms:
            return f"<0 @ stage {self.stage}>"
        bits_str = lambda b: "".join(map(str, b)) or "()"
        body = " + ".join(
            f"{c}*x[{h}]·{bits_str(bits)}" for h, bits, c in self.sorted_terms()
        )
        return f"<{body} @ stage {self.stage}>"


# --------------------------------------------------------------------------
# scale parameters


@dataclass(frozen=True)
class ParamSeq:
    """Scale sequences ``s, t`` with running products ``k, l``.

    ``len(k) == len(l) == len(s) + 1``; ``k[0] == l[0] == 1``;
    ``k[n+1] == s[n]*k[n]`` and ``l[n+1] == t[n]*l[n]``.
    """

    s: tuple[int, ...]
    t: tuple[int, ...]
    k: tuple[int, ...]
    l: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.t) != len(self.s) or len(self.k) != len(self.s) + 1:
            raise ValueError("parameter sequences have inconsistent lengths")
        if len(self.l) != len(self.k):
            raise ValueError("parameter sequences have inconsistent lengths")
        if self.k[0] != 1 or self.l[0] != 1:
            raise ValueError("running products must start at 1")
        for n, (sn, tn) in enumerate(zip(self.s, self.t)):
            if sn < 2 or tn < 1:
                raise ValueError(f"bad scales s_{n}={sn}, t_{n}={tn}")
            if self.k[n + 1] != sn * self.k[n] or self.l[n + 1] != tn * self.l[n]:
                raise ValueError("running products disagree with scales")

    @property
    def depth(self) -> int:
        return len(self.s)


def check_params(
    params: ParamSeq, supports: Sequence[Iterable[Fraction]]
) -> list[str]:
    """All violated parameter invariants, as human-readable strings.

    ``supports[i-1]`` is the support set of the ``i``-th enumerated element;
    the growth inequality at step ``n`` sums the supports with index
    ``i <= n``.
    """
    problems = []
    for n in range(params.depth):
        sn, tn = params.s[n], params.t[n]
        if tn % max(n, 1) != 0:
            problems.append(f"t_{n}={tn} is not a multiple of {max(n, 1)}")
        if sn % tn != 0:
            problems.append(f"t_{n}={tn} does not divide s_{n}={sn}")
        total = sum(
            (sum(f, Fraction(0)) for f in supports[: n]), Fraction(0)
        )
        lhs = Fraction(params.k[n] * (sn * sn - 1))
        rhs = Fraction(params.l[n] * sn * tn) * total
        if lhs < rhs:
            problems.append(
                f"growth inequality fails at n={n}: {lhs} < {rhs}"
            )
    return problems


def make_params(
    supports: Sequence[Iterable[Fraction]], depth: int
) -> ParamSeq:
    """Scale sequences for ``depth`` steps over the given supports.

    ``t_n`` is the least common multiple of ``max(n, 1)`` and whatever factor
    makes ``(n+1)!`` divide ``l_{n+1}``; ``s_n`` is the least multiple of
    ``t_n`` that is at least 2 and satisfies the growth inequality.
    """
    supports = [tuple(f) for f in supports]
    if len(supports) < max(depth - 1, 0):
        raise ValueError(
            f"need at least {depth - 1} support sets for depth {depth}"
        )
    s: list[int] = []
    t: list[int] = []
    k = [1]
    l = [1]
    for n in range(depth):
        fact = factorial(n + 1)
        tn = lcm(max(n, 1), fact // gcd(l[n], fact))
        total = sum(
            (sum(f, Fraction(0)) for f in supports[:n]), Fraction(0)
        )
        m = 1
        while True:
            sn = tn * m
            if sn >= 2 and Fraction(k[n] * (sn * sn - 1)) >= Fraction(
                l[n] * sn * tn
            ) * total:
                break
            m += 1
        s.append(sn)
        t.append(tn)
        k.append(sn * k[n])
        l.append(tn * l[n])
    return ParamSeq(s=tuple(s), t=tuple(t), k=tuple(k), l=tuple(l))


# --------------------------------------------------------------------------
# enumeration and offsets


@dataclass(frozen=True)
class EnumB:
    """Elements ``b_1, ..., b_N`` with ``b_i`` living at stage <= ``i``."""

    elements: tuple[GroupRingElt, ...]

    def __post_init__(self) -> None:
        for i, b in enumerate(self.elements, start=1):
            if b.is_zero():
                raise ValueError(f"b_{i} must be nonzero")
            if b.stage > i:
                raise ValueError(f"b_{i} lives at stage {b.stage} > {i}")

    def supports(self) -> list[frozenset[Fraction]]:
        return [b.support() for b in self.elements]


def _word_ball(generators: Sequence[Fraction]) -> list[Fraction]:
    """Products of generator powers with every exponent in {-1, 0, 1}."""
    values = {Fraction(1)}
    for g in generators:
        values = {v * g**e for v in values for e in (-1, 0, 1)}
    return sorted(values)


def default_enumeration(H: SubgroupH, depth: int, seed: int) -> EnumB:
    """A deterministic, seed-dependent enumeration prefix of length ``depth``.

    ``b_1`` is always the single symbol ``x_1`` on the empty sequence (its
    support {1} keeps the first few levels small); later elements draw one
    or two terms with group parts from the radius-1 word ball and small
    nonzero coefficients.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    rng = random.Random(seed)
    ball = _word_ball(H.generators)
    elements = [GroupRingElt.monomial(Fraction(1), ())]
    for i in range(2, depth + 1):
        while True:
            nterms = 2 if rng.randrange(3) == 0 else 1
            terms: dict[TermKey, int] = {}
            for _ in range(nterms):
                h = ball[rng.randrange(len(ball))]
                bits = tuple(rng.randrange(2) for _ in range(i))
                coeff = rng.choice((-3, -2, -1, 1, 2, 3))
                key = (h, bits)
                terms[key] = terms.get(key, 0) + coeff
            cand = GroupRingElt(i, terms)
            if not cand.is_zero():
                elements.append(cand)
                break
    return EnumB(elements=tuple(elements))


@dataclass(frozen=True)
class WDiffs:
    """Per-step integer offsets ``d[(i, n)]`` for the carry recursion."""

    entries: Mapping[tuple[int, int], int]

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self.entries[key]


def sample_wdiffs(params: ParamSeq, depth: int, rng: random.Random) -> WDiffs:
    """Offsets drawn uniformly from ``[0, s_n * t_n)`` in sorted key order."""
    entries: dict[tuple[int, int], int] = {}
    for i in range(1, depth):
        for n in range(i, depth):
            entries[(i, n)] = rng.randrange(params.s[n] * params.t[n])
    return WDiffs(entries=entries)


# --------------------------------------------------------------------------
# carry recursion


def step_b(
    b_i: GroupRingElt,
    b_cur: GroupRingElt,
    n: int,
    params: ParamSeq,
    diff: int,
) -> tuple[GroupRingElt, dict[TermKey, int]]:
    """One carry step at stage ``n``.

    Rebases ``diff * b_i + b_cur`` to stage ``n + 1`` and divides every
    coefficient by ``s_n * t_n`` with remainder in ``[0, s_n*t_n)``.  Returns
    the quotient (the next ``b_i^(n+1)``) and the residues, keyed by symbol.
    Sequences ending in 1 must divide exactly; anything else means the scale
    parameters are corrupt.
    """
    if b_cur.stage != n:
        raise ValueError(f"state lives at stage {b_cur.stage}, expected {n}")
    lifted = (b_i.lift_to(n, params).scaled(diff) + b_cur).rebase(params)
    modulus = params.s[n] * params.t[n]
    quotient: dict[TermKey, int] = {}
    residues: dict[TermKey, int] = {}
    for (h, bits), c in lifted.terms.items():
        q, r = divmod(c, modulus)
        if r and bits[-1] == 1:
            raise CarryConsistencyError(
                f"coefficient {c} at {h}, {bits} not divisible by {modulus}"
            )
        if q:
            quotient[(h, bits)] = q
        if r:
            residues[(h, bits)] = r
    return GroupRingElt(n + 1, quotient), residues


@dataclass(frozen=True)
class ResidueTable:
    """Residues ``[(i, n)] -> {(h, bits): value}`` from the carry recursion."""

    residues: Mapping[tuple[int, int], Mapping[TermKey, int]]

    def at(self, i: int, n: int) -> Mapping[TermKey, int]:
        return self.residues.get((i, n), {})


def run_carry(
    enum: EnumB, params: ParamSeq, wdiffs: WDiffs, depth: int
) -> tuple[ResidueTable, dict[tuple[int, int], GroupRingElt]]:
    """Run the recursion for every ``1 <= i <= n < depth``.

    Returns the residue table and the table of intermediate states
    ``b_i^(n)`` for ``i <= n <= depth`` (``b_i^(i)`` starts at zero).
    """
    residues: dict[tuple[int, int], dict[TermKey, int]] = {}
    b_table: dict[tuple[int, int], GroupRingElt] = {}
    for i in range(1, depth + 1):
        b_i = enum.elements[i - 1]
        cur = GroupRingElt.zero(i)
        b_table[(i, i)] = cur
        for n in range(i, depth):
            cur, res = step_b(b_i, cur, n, params, wdiffs[(i, n)])
            residues[(i, n)] = res
            b_table[(i, n + 1)] = cur
    return ResidueTable(residues=residues), b_table
