"""Invariant suites over a materialised truncation.

Every finitely checkable assertion the construction makes is re-checked
here from the stored data: scale-parameter arithmetic, the carry
reconstruction identity, support closure, unit formulas (in coordinates and
in ambient atoms), structural and ambient correctness of every connecting
matrix, the subgroup action (scaling, criterion, composition, commutation
with the connecting matrices), the least/greatest-bound calculus on
integral levels, and byte-level rebuild determinism.  An optional
box-enumeration pass cross-checks small connecting matrices against the
exhaustive order-embedding oracle.

All sampled checks draw from a generator seeded from the truncation's own
seed, so reports are deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable

from . import bundle as bundle_mod
from .ambient import AmbientExpander
from .boxcheck import MAX_POINTS, enumeration_points, find_violation
from .diagram import (
    DiagramTruncation,
    build_truncation,
    closure_step,
    compose,
    embedding_matrix,
    h_action,
    is_integral_level,
    labeled_criterion,
    rl_at_level,
    to_simplicial,
    verify_embedding,
)
from .groupring import GroupRingElt, check_params
from .ratlattice import contains, subgroup_from_generators
from .simplicial import nonadditivity_witness, r_value, l_value

_BITS = lambda b: "".join(map(str, b))


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    checked: int
    witness: str | None = None


@dataclass
class VerifyReport:
    checks: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "overall": "pass" if self.ok else "fail",
            "checks": [
                {
                    "name": c.name,
                    "status": "pass" if c.ok else "fail",
                    "checked": c.checked,
                    "witness": c.witness,
                }
                for c in self.checks
            ],
        }

    def human_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            if c.ok:
                lines.append(f"PASS {c.name} ({c.checked} checked)")
            else:
                lines.append(f"FAIL {c.name}: {c.witness}")
        lines.append(f"overall: {'PASS' if self.ok else 'FAIL'}")
        return lines


def run_verification(
    t: DiagramTruncation,
    oracle_box: int | None = None,
    rl_samples: int = 1000,
    stability_samples: int = 200,
) -> VerifyReport:
    rng = random.Random(t.seed * 2_147_483_629 + 101)
    supports = t.supports()
    expander = AmbientExpander(t)
    results: list[CheckResult] = []

    def run(name: str, fn: Callable[[], tuple[bool, int, str | None]]) -> None:
        try:
            ok, count, witness = fn()
        except Exception as exc:  # a corrupted bundle may break anything
            ok, count, witness = False, 0, f"exception: {exc}"
        results.append(
            CheckResult(name=name, ok=ok, checked=count, witness=witness)
        )

    # ---------------- parameters ----------------
    def params_check():
        problems = check_params(t.params, supports)
        return (not problems, t.params.depth, problems[0] if problems else None)

    run("scale-parameters", params_check)

    def slack_check():
        count = 0
        for n in range(t.depth):
            total = sum(
                (sum(f, Fraction(0)) for f in supports[:n]), Fraction(0)
            )
            slack = Fraction(
                t.params.k[n] * (t.params.s[n] ** 2 - 1)
            ) - Fraction(t.params.l[n] * t.params.s[n] * t.params.t[n]) * total
            count += 1
            if slack < 0:
                return False, count, f"negative slack {slack} at n={n}"
        return True, count, None

    run("positivity-slack", slack_check)

    # ---------------- subgroup ----------------
    def subgroup_check():
        fresh = subgroup_from_generators(t.subgroup.generators)
        ok = (
            fresh.primes == t.subgroup.primes and fresh.hnf == t.subgroup.hnf
        )
        return ok, 1, None if ok else "stored lattice differs from generators"

    run("subgroup-canonical", subgroup_check)

    # ---------------- enumeration ----------------
    def enum_check():
        count = 0
        for i, b in enumerate(t.enum.elements, start=1):
            count += 1
            if b.is_zero():
                return False, count, f"b_{i} is zero"
            if b.stage > i:
                return False, count, f"b_{i} at stage {b.stage}"
            for h in b.support():
                if not contains(t.subgroup, h):
                    return False, count, f"b_{i} support {h} outside subgroup"
        return True, count, None

    run("enumeration-wellformed", enum_check)

    def offsets_check():
        count = 0
        for (i, n), v in sorted(t.wdiffs.entries.items()):
            count += 1
            modulus = t.params.s[n] * t.params.t[n]
            if not 0 <= v < modulus:
                return False, count, f"offset {v} at (i={i}, n={n})"
        return True, count, None

    run("offset-range", offsets_check)

    # ---------------- carry data ----------------
    def residue_range_check():
        count = 0
        for (i, n), table in sorted(t.residues.residues.items()):
            modulus = t.params.s[n] * t.params.t[n]
            for (h, bits), v in sorted(table.items()):
                count += 1
                if not 0 < v < modulus:
                    return (
                        False,
                        count,
                        f"residue {v} at i={i} n={n} h={h} y={_BITS(bits)}",
                    )
        return True, count, None

    run("residue-range", residue_range_check)

    def residue_placement_check():
        count = 0
        for (i, n), table in sorted(t.residues.residues.items()):
            support = t.enum.elements[i - 1].support()
            for (h, bits), _ in sorted(table.items()):
                count += 1
                if len(bits) != n + 1 or bits[-1] != 0:
                    return (
                        False,
                        count,
                        f"residue key i={i} n={n} h={h} y={_BITS(bits)}",
                    )
                if h not in support:
                    return (
                        False,
                        count,
                        f"residue at i={i} n={n} on {h} outside the support",
                    )
        return True, count, None

    run("residue-placement", residue_placement_check)

    def reconstruction_check():
        count = 0
        for i in range(1, t.depth + 1):
            b_i = t.enum.elements[i - 1]
            for n in range(i, t.depth):
                count += 1
                lhs = (
                    b_i.lift_to(n, t.params).scaled(t.wdiffs[(i, n)])
                    + t.b_table[(i, n)]
                ).rebase(t.params)
                modulus = t.params.s[n] * t.params.t[n]
                rhs = t.b_table[(i, n + 1)].scaled(modulus)
                for (h, bits), v in t.residues.at(i, n).items():
                    rhs = rhs + GroupRingElt.monomial(h, bits, v)
                if lhs != rhs:
                    diff = lhs - rhs
                    (h, bits), _ = next(iter(diff.terms.items()))
                    return (
                        False,
                        count,
                        f"mismatch at i={i} n={n} h={h} y={_BITS(bits)}",
                    )
        return True, count, None

    run("carry-reconstruction", reconstruction_check)

    def carry_support_check():
        count = 0
        for (i, n), elt in sorted(t.b_table.items()):
            support = t.enum.elements[i - 1].support()
            count += 1
            if not elt.support() <= support:
                return False, count, f"state (i={i}, n={n}) leaves the support"
        return True, count, None

    run("carry-support", carry_support_check)

    # ---------------- levels ----------------
    def closure_check():
        count = 0
        for n in range(len(t.levels) - 1):
            count += 1
            needed = set(closure_step(t.levels[n].index.F, n, supports))
            if not needed.issubset(set(t.levels[n + 1].index.F)):
                return False, count, f"support closure fails into stage {n+1}"
        return True, count, None

    run("support-closure", closure_check)

    def unit_formula_check():
        count = 0
        for lv in t.levels:
            kn = t.params.k[lv.index.n]
            ln = t.params.l[lv.index.n]
            for label, c in zip(lv.basis, lv.u_coords):
                count += 1
                if label == ("V",):
                    expected = Fraction(kn)
                elif label[0] == "XY":
                    expected = Fraction(kn * kn) / label[1]
                else:
                    expected = Fraction(kn * ln) / label[1]
                if c != expected or c <= 0:
                    return (
                        False,
                        count,
                        f"unit coordinate {c} at {label} of stage {lv.index.n}",
                    )
        return True, count, None

    run("unit-coordinates", unit_formula_check)

    def unit_ambient_check():
        count = 0
        for lv in t.levels:
            count += 1
            if expander.unit_mismatch(lv.index, lv.u_coords, lv.basis):
                return False, count, f"stage {lv.index.n} unit expansion"
        return True, count, None

    run("unit-ambient", unit_ambient_check)

    def integral_check():
        count = 0
        for lv in t.levels:
            if is_integral_level(lv):
                count += 1
                simp = to_simplicial(lv)
                if any(u <= 0 for u in simp.unit):
                    return False, count, f"stage {lv.index.n}"
        return True, count, None

    run("integral-units", integral_check)

    # ---------------- connecting matrices ----------------
    def embedding_structure_check():
        count = 0
        for j, e in enumerate(t.embeddings):
            report = verify_embedding(e)
            count += report.checked["entries"]
            if not report.ok:
                return False, count, f"map {j}->{j+1}: {report.violations[0]}"
        return True, count, None

    run("embedding-structure", embedding_structure_check)

    def embedding_ambient_check():
        count = 0
        for j, e in enumerate(t.embeddings):
            bad = expander.embedding_mismatches(e)
            count += e.src.rank
            if bad:
                return False, count, f"map {j}->{j+1} column {bad[0]}"
        return True, count, None

    run("embedding-ambient", embedding_ambient_check)

    # ---------------- subgroup action ----------------
    def action_scaling_check():
        count = 0
        for lv in t.levels:
            for h in lv.index.F:
                count += 1
                act = h_action(h, lv, t.subgroup)
                if act.apply(lv.u_coords) != [
                    h * c for c in act.dst.u_coords
                ]:
                    return False, count, f"unit scaling h={h} stage {lv.index.n}"
                if expander.action_mismatch(h, lv.index):
                    return False, count, f"ambient action h={h} stage {lv.index.n}"
                inv = h_action(1 / h, act.dst, t.subgroup)
                if not (labeled_criterion(act) and labeled_criterion(inv)):
                    return False, count, f"criterion h={h} stage {lv.index.n}"
        return True, count, None

    run("action-scaling", action_scaling_check)

    def action_composition_check():
        count = 0
        for lv in t.levels:
            pool = list(lv.index.F)
            pairs = [(g, h) for g in pool for h in pool][:6]
            for g, h in pairs:
                count += 1
                first = h_action(h, lv, t.subgroup)
                second = h_action(g, first.dst, t.subgroup)
                direct = h_action(g * h, lv, t.subgroup)
                if not compose(second, first).same_entries(direct):
                    return False, count, f"g={g} h={h} stage {lv.index.n}"
        return True, count, None

    run("action-composition", action_composition_check)

    def action_square_check():
        count = 0
        for j, e in enumerate(t.embeddings):
            for h in e.src.index.F:
                count += 1
                a_src = h_action(h, e.src, t.subgroup)
                a_dst = h_action(h, e.dst, t.subgroup)
                translated = embedding_matrix(
                    a_src.dst, a_dst.dst, t.residues, supports
                )
                if not compose(a_dst, e).same_entries(
                    compose(translated, a_src)
                ):
                    return False, count, f"map {j}->{j+1}, h={h}"
        return True, count, None

    run("action-embedding-square", action_square_check)

    # ---------------- bound calculus ----------------
    def bound_defining_check():
        count = 0
        for lv in t.levels:
            if not is_integral_level(lv):
                continue
            simp = to_simplicial(lv)
            for _ in range(max(1, rl_samples // max(1, len(t.levels)))):
                d = tuple(rng.randrange(-9, 10) for _ in range(lv.rank))
                q = Fraction(rng.randrange(-40, 41), rng.randrange(1, 13))
                r = r_value(d, simp)
                l = l_value(d, simp)
                count += 1
                if (q >= r) != all(
                    q * u >= di for di, u in zip(d, simp.unit)
                ):
                    return False, count, f"r defining fails stage {lv.index.n}"
                if (q <= l) != all(
                    q * u <= di for di, u in zip(d, simp.unit)
                ):
                    return False, count, f"l defining fails stage {lv.index.n}"
                if r_value(tuple(-x for x in d), simp) != -l:
                    return False, count, f"negation law stage {lv.index.n}"
                c = rng.randrange(-5, 6)
                shifted = tuple(
                    di + c * u for di, u in zip(d, simp.unit)
                )
                if r_value(shifted, simp) != r + c:
                    return False, count, f"unit shift law stage {lv.index.n}"
                if (r == 0 and l == 0) != all(x == 0 for x in d):
                    return False, count, f"zero law stage {lv.index.n}"
        return True, count, None

    run("bound-defining", bound_defining_check)

    def bound_stability_check():
        spots = [
            j for j, lv in enumerate(t.levels) if is_integral_level(lv)
        ]
        count = 0
        for a, b in zip(spots, spots[1:]):
            comp = t.embeddings[a]
            for j in range(a + 1, b):
                comp = compose(t.embeddings[j], comp)
            src = t.levels[a]
            dst = t.levels[b]
            for _ in range(max(1, stability_samples // max(1, len(spots)))):
                d = tuple(rng.randrange(-6, 7) for _ in range(src.rank))
                image = comp.apply([Fraction(x) for x in d])
                if any(v.denominator != 1 for v in image):
                    return False, count, f"non-integral image {a}->{b}"
                image_i = tuple(int(v) for v in image)
                count += 1
                if rl_at_level(d, src) != rl_at_level(image_i, dst):
                    return False, count, f"bounds move across {a}->{b}"
        return True, count, None

    run("bound-stability", bound_stability_check)

    def nonadditivity_check():
        count = 0
        for lv in t.levels:
            if not is_integral_level(lv) or lv.rank < 3:
                continue
            count += 1
            if nonadditivity_witness(to_simplicial(lv)) is None:
                return False, count, f"no witness at stage {lv.index.n}"
        return True, count, None

    run("bound-nonadditivity", nonadditivity_check)

    # ---------------- determinism ----------------
    def determinism_check():
        fresh = build_truncation(
            subgroup_from_generators(t.subgroup.generators),
            depth=t.depth,
            seed=t.seed,
        )
        same = bundle_mod.canonical_bytes(
            bundle_mod.to_bundle(fresh)
        ) == bundle_mod.canonical_bytes(bundle_mod.to_bundle(t))
        return same, 1, None if same else "rebuild differs from stored data"

    run("rebuild-determinism", determinism_check)

    # ---------------- optional box oracle ----------------
    if oracle_box is not None:
        def box_check():
            count = 0
            for j, e in enumerate(t.embeddings):
                if e.src.rank > 7:
                    continue
                if enumeration_points(e.src.rank, oracle_box) > MAX_POINTS:
                    continue
                rows = []
                for row in e.to_rows():
                    denom = lcm(*(v.denominator for v in row), 1)
                    rows.append([int(v * denom) for v in row])
                count += 1
                witness = find_violation(rows, oracle_box)
                agrees = (witness is None) == labeled_criterion(e)
                if witness is not None or not agrees:
                    return False, count, f"map {j}->{j+1} witness {witness}"
            return True, count, None

        run("box-oracle", box_check)

    return VerifyReport(checks=results)
