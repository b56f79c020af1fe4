"""Self-contained JSON bundles for diagram truncations.

A bundle records the full run: configuration (generators, depth, seed),
the canonical subgroup data, scale parameters, the enumeration, offsets,
carry states and residues, every level with its unit coordinates, and every
connecting matrix entry.  Serialisation is canonical -- sorted keys, fixed
indentation, exact ``p/q`` strings -- so identical runs produce identical
bytes.

Loading is deliberately forgiving about *values* (a hand-edited residue or
matrix entry loads fine); coherence is the verifier's job.  Structural
problems (missing keys, malformed shapes) raise
:class:`BundleFormatError`.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping

from .diagram import (
    DiagramTruncation,
    LabeledMatrix,
    LevelGroup,
    LevelIndex,
    order_basis,
    is_integral_level,
)
from .groupring import (
    EnumB,
    GroupRingElt,
    ParamSeq,
    ResidueTable,
    WDiffs,
)
from .ratlattice import SubgroupH, subgroup_to_json

SCHEMA_VERSION = 1


class BundleFormatError(ValueError):
    """The on-disk object is not a structurally valid bundle."""


def _bits_str(bits: tuple[int, ...]) -> str:
    return "".join(map(str, bits))


def _parse_bits(text: str) -> tuple[int, ...]:
    if not isinstance(text, str) or any(c not in "01" for c in text):
        raise BundleFormatError(f"bad bit sequence {text!r}")
    return tuple(int(c) for c in text)


def _elt_terms(elt: GroupRingElt) -> list[list]:
    return [
        [str(h), _bits_str(bits), c] for h, bits, c in elt.sorted_terms()
    ]


def _parse_elt(stage: int, terms: list) -> GroupRingElt:
    out = {}
    for h, bits, c in terms:
        out[(Fraction(h), _parse_bits(bits))] = int(c)
    return GroupRingElt(stage, out)


def to_bundle(t: DiagramTruncation) -> dict:
    """Canonical dictionary form of a truncation."""
    levels = []
    for lv in t.levels:
        levels.append(
            {
                "n": lv.index.n,
                "F": [str(h) for h in lv.index.F],
                "rank": lv.rank,
                "unit": [str(c) for c in lv.u_coords],
                "integral": is_integral_level(lv),
            }
        )
    embeddings = []
    for j, e in enumerate(t.embeddings):
        entries = []
        for col, column in e.cols.items():
            cj = e.src.pos[col]
            for row, a in column.items():
                if a != 0:
                    entries.append([e.dst.pos[row], cj, str(Fraction(a))])
        entries.sort(key=lambda item: (item[1], item[0]))
        embeddings.append({"src": j, "dst": j + 1, "entries": entries})
    return {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "generators": [str(g) for g in t.subgroup.generators],
            "depth": t.depth,
            "seed": t.seed,
            "f0": [str(h) for h in t.f0],
        },
        "subgroup": subgroup_to_json(t.subgroup),
        "params": {
            "s": list(t.params.s),
            "t": list(t.params.t),
            "k": list(t.params.k),
            "l": list(t.params.l),
        },
        "enumeration": [
            {"stage": b.stage, "terms": _elt_terms(b)} for b in t.enum.elements
        ],
        "wdiffs": [
            [i, n, v] for (i, n), v in sorted(t.wdiffs.entries.items())
        ],
        "b_table": [
            [i, n, _elt_terms(elt)]
            for (i, n), elt in sorted(t.b_table.items())
        ],
        "residues": [
            [i, n, str(h), _bits_str(bits), v]
            for (i, n), table in sorted(t.residues.residues.items())
            for (h, bits), v in sorted(table.items())
        ],
        "levels": levels,
        "embeddings": embeddings,
    }


def canonical_bytes(bundle: Mapping) -> bytes:
    return (
        json.dumps(bundle, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
    ).encode("utf-8")


def from_bundle(data: Mapping) -> DiagramTruncation:
    """Rebuild a truncation object from its bundle dictionary.

    Stored values are preserved verbatim (including any corruption);
    run the verifier to establish coherence.
    """
    try:
        if data["schema_version"] != SCHEMA_VERSION:
            raise BundleFormatError(
                f"unsupported schema_version {data['schema_version']!r}"
            )
        config = data["config"]
        depth = int(config["depth"])
        seed = int(config["seed"])
        f0 = tuple(Fraction(x) for x in config["f0"])
        sub = data["subgroup"]
        subgroup = SubgroupH(
            generators=tuple(Fraction(g) for g in sub["generators"]),
            primes=tuple(int(p) for p in sub["primes"]),
            hnf=tuple(tuple(int(x) for x in row) for row in sub["hnf"]),
        )
        params = ParamSeq(
            s=tuple(int(x) for x in data["params"]["s"]),
            t=tuple(int(x) for x in data["params"]["t"]),
            k=tuple(int(x) for x in data["params"]["k"]),
            l=tuple(int(x) for x in data["params"]["l"]),
        )
        enum = EnumB(
            elements=tuple(
                _parse_elt(int(b["stage"]), b["terms"])
                for b in data["enumeration"]
            )
        )
        wdiffs = WDiffs(
            entries={
                (int(i), int(n)): int(v) for i, n, v in data["wdiffs"]
            }
        )
        b_table = {
            (int(i), int(n)): _parse_elt(int(n), terms)
            for i, n, terms in data["b_table"]
        }
        residues: dict[tuple[int, int], dict] = {}
        for i, n, h, bits, v in data["residues"]:
            residues.setdefault((int(i), int(n)), {})[
                (Fraction(h), _parse_bits(bits))
            ] = int(v)
        table = ResidueTable(residues=residues)
        levels = []
        for lv in data["levels"]:
            index = LevelIndex(
                n=int(lv["n"]), F=tuple(Fraction(h) for h in lv["F"])
            )
            basis = order_basis(index)
            if len(basis) != int(lv["rank"]):
                raise BundleFormatError(
                    f"level {index.n}: stored rank {lv['rank']} != "
                    f"{len(basis)} basis vectors"
                )
            unit = tuple(Fraction(c) for c in lv["unit"])
            if len(unit) != len(basis):
                raise BundleFormatError(
                    f"level {index.n}: unit has wrong length"
                )
            levels.append(
                LevelGroup(
                    index=index,
                    basis=basis,
                    pos={lab: i for i, lab in enumerate(basis)},
                    u_coords=unit,
                    params=params,
                )
            )
        embeddings = []
        for emb in data["embeddings"]:
            src = levels[int(emb["src"])]
            dst = levels[int(emb["dst"])]
            cols: dict = {}
            for r, c, v in emb["entries"]:
                row = dst.basis[int(r)]
                col = src.basis[int(c)]
                cols.setdefault(col, {})[row] = Fraction(v)
            embeddings.append(LabeledMatrix(src=src, dst=dst, cols=cols))
    except BundleFormatError:
        raise
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise BundleFormatError(f"malformed bundle: {exc}") from exc
    return DiagramTruncation(
        subgroup=subgroup,
        depth=depth,
        seed=seed,
        f0=f0,
        enum=enum,
        params=params,
        wdiffs=wdiffs,
        residues=table,
        b_table=b_table,
        levels=levels,
        embeddings=embeddings,
    )


def loads(payload: bytes | str) -> DiagramTruncation:
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise BundleFormatError(f"not JSON: {exc}") from exc
    return from_bundle(data)


def truncation_dot(t: DiagramTruncation) -> str:
    """Graphviz rendering of the level chain, ranks as node labels."""
    lines = ["digraph truncation {", "  rankdir=LR;"]
    for lv in t.levels:
        lines.append(
            f'  L{lv.index.n} [label="n={lv.index.n} rank={lv.rank}"];'
        )
    for j in range(len(t.levels) - 1):
        lines.append(f"  L{j} -> L{j + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"
