"""Finitely generated subgroups of the positive rationals.

A positive rational is determined by its prime exponent vector, so a finitely
generated subgroup ``H`` of the multiplicative group of positive rationals is
the same thing as an integer lattice inside ``Z^primes``.  Everything this
module does -- membership, the induced equivalence on positive integers
(``n ~ m`` iff ``n/m in H``), canonical comparison of subgroups -- reduces to
exact integer linear algebra on a Hermite-normal-form basis of that lattice.

Rationals are handled as :class:`fractions.Fraction` throughout; the parser
accepts ``"p"`` and ``"p/q"`` with positive integer parts.
"""

from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence


class RationalParseError(ValueError):
    """Raised for text that does not denote a positive rational."""


# --------------------------------------------------------------------------
# integer factoring (desk-scale inputs; deterministic)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_LIMIT = 1 << 16


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n below 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of odd composite ``n`` (Brent's variant)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"failed to split {n}")


def factor_integer(n: int) -> dict[int, int]:
    """Prime factorisation of a positive integer as ``{prime: exponent}``."""
    if not isinstance(n, int) or n <= 0:
        raise ValueError(f"expected a positive integer, got {n!r}")
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    while f * f <= n and f < _TRIAL_LIMIT:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    # whatever survives trial division is prime or gets split recursively
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return out


def factor(q: Fraction | int) -> dict[int, int]:
    """Exponent vector of a positive rational: ``{prime: exponent}``.

    Exponents of denominator primes are negative; the vector of 1 is empty.
    """
    q = ensure_positive_rational(q)
    out = factor_integer(q.numerator)
    for p, e in factor_integer(q.denominator).items():
        out[p] = out.get(p, 0) - e  # numerator and denominator are coprime
    return dict(sorted(out.items()))


def ensure_positive_rational(q: Fraction | int) -> Fraction:
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"expected a positive rational, got {q}")
    return q


def parse_positive_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` with positive integer parts.

    Malformed input raises :class:`RationalParseError` naming the first
    offending column (1-based).
    """
    m = re.fullmatch(r"\s*(\d+)\s*(?:/\s*(\d+)\s*)?", text)
    if not m:
        col = 1
        for i, ch in enumerate(text):
            if not (ch.isdigit() or ch == "/" or ch.isspace()):
                col = i + 1
                break
            if ch == "/" and "/" in text[:i]:
                col = i + 1
                break
        else:
            col = len(text) + 1
        raise RationalParseError(
            f"invalid positive rational {text!r} at column {col}"
        )
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if num == 0 or den == 0:
        raise RationalParseError(f"zero in rational {text!r}; must be positive")
    return Fraction(num, den)


# --------------------------------------------------------------------------
# Hermite normal form over the integers (row style)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(x, y, g) with a*x + b*y == g == gcd(a, b), g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -x0, -y0, -a
    return x0, y0, a


def hermite_normal_form(
    rows: Iterable[Sequence[int]], width: int
) -> tuple[tuple[int, ...], ...]:
    """Canonical basis of the integer span of ``rows``.

    The result is in row-style Hermite normal form: pivot columns strictly
    increase, pivots are positive, and every entry above a pivot is reduced
    into ``[0, pivot)``.  Two row sets span the same lattice iff their normal
    forms are identical.
    """
    basis: list[list[int]] = []
    pivots: list[int] = []
    for row in rows:
        vec = list(row)
        if len(vec) != width:
            raise ValueError("row width mismatch")
        while True:
            j = next((c for c, v in enumerate(vec) if v), None)
            if j is None:
                break
            k = bisect_left(pivots, j)
            if k == len(pivots) or pivots[k] != j:
                if vec[j] < 0:
                    vec = [-v for v in vec]
                basis.insert(k, vec)
                pivots.insert(k, j)
                break
            head = basis[k]
            a, b = head[j], vec[j]
            if b % a == 0:
                q = b // a
                vec = [v - q * w for v, w in zip(vec, head)]
            else:
                x, y, g = _xgcd(a, b)
                basis[k] = [x * w + y * v for w, v in zip(head, vec)]
                vec = [(a // g) * v - (b // g) * w for v, w in zip(vec, head)]
    for k in range(len(basis)):
        p = pivots[k]
        piv = basis[k][p]
        for above in range(k):
            q = basis[above][p] // piv
            if q:
                basis[above] = [
                    v - q * w for v, w in zip(basis[above], basis[k])
                ]
    return tuple(tuple(r) for r in basis)


def _in_row_span(
    hnf: Sequence[Sequence[int]], vec: Sequence[int]
) -> bool:
    """Exact-division membership test against an HNF basis."""
    v = list(vec)
    for row in hnf:
        p = next(c for c, x in enumerate(row) if x)
        q, r = divmod(v[p], row[p])
        if r:
            return False
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


# --------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class SubgroupH:
    """A finitely generated subgroup of the positive rationals.

    ``primes`` lists, in increasing order, every prime occurring in some
    generator; ``hnf`` is the canonical lattice basis of the exponent
    vectors over those primes.  Structural equality of two instances with
    the same prime list is subgroup equality.
    """

    generators: tuple[Fraction, ...]
    primes: tuple[int, ...]
    hnf: tuple[tuple[int, ...], ...]

    def contains(self, q: Fraction | int) -> bool:
        return contains(self, q)

    def equiv(self, n: int, m: int) -> bool:
        return equiv(self, n, m)


def subgroup_from_generators(gens: Iterable[Fraction | int]) -> SubgroupH:
    """Canonical representation of the subgroup generated by ``gens``."""
    gens = tuple(ensure_positive_rational(g) for g in gens)
    vectors = [factor(g) for g in gens]
    primes = tuple(sorted({p for v in vectors for p in v}))
    index = {p: i for i, p in enumerate(primes)}
    rows = []
    for v in vectors:
        row = [0] * len(primes)
        for p, e in v.items():
            row[index[p]] = e
        rows.append(row)
    hnf = hermite_normal_form(rows, len(primes))
    # drop primes whose column is entirely zero so the prime list is minimal
    used = [i for i in range(len(primes)) if any(r[i] for r in hnf)]
    if len(used) != len(primes):
        primes = tuple(primes[i] for i in used)
        hnf = tuple(tuple(r[i] for i in used) for r in hnf)
    return SubgroupH(generators=gens, primes=primes, hnf=hnf)


def contains(H: SubgroupH, q: Fraction | int) -> bool:
    """Is the positive rational ``q`` an element of ``H``?"""
    vec = factor(q)
    index = {p: i for i, p in enumerate(H.primes)}
    row = [0] * len(H.primes)
    for p, e in vec.items():
        if p not in index:
            return False
        row[index[p]] = e
    return _in_row_span(H.hnf, row)


def equiv(H: SubgroupH, n: int, m: int) -> bool:
    """The equivalence induced on positive integers: ``n/m in H``."""
    if not (isinstance(n, int) and isinstance(m, int)) or n <= 0 or m <= 0:
        raise ValueError(f"expected positive integers, got {n!r}, {m!r}")
    return contains(H, Fraction(n, m))


@dataclass(frozen=True)
class EquivRelSpec:
    """A finite list of positive-integer pairs declared equivalent."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for n, m in self.pairs:
            if not (isinstance(n, int) and isinstance(m, int)) or n <= 0 or m <= 0:
                raise ValueError(f"invalid pair ({n!r}, {m!r})")


def subgroup_from_equiv_pairs(spec: EquivRelSpec) -> SubgroupH:
    """Smallest subgroup whose induced equivalence contains every pair.

    The multiplicative closure of ``n ~ m`` is generated by the ratios
    ``n/m``, so this is just :func:`subgroup_from_generators` on those.
    """
    return subgroup_from_generators(
        Fraction(n, m) for n, m in spec.pairs if n != m
    )


# --------------------------------------------------------------------------
# JSON form


def subgroup_to_json(H: SubgroupH) -> dict:
    return {
        "generators": [str(g) for g in H.generators],
        "primes": list(H.primes),
        "hnf": [list(r) for r in H.hnf],
    }


def subgroup_from_json(data: Mapping) -> SubgroupH:
    gens = [parse_positive_rational(g) for g in data["generators"]]
    H = subgroup_from_generators(gens)
    if list(H.primes) != list(data["primes"]) or [
        list(r) for r in H.hnf
    ] != [list(r) for r in data["hnf"]]:
        raise ValueError("stored lattice data disagrees with its generators")
    return H
