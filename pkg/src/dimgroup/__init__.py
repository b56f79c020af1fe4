"""Exact dimension-group truncations from subgroups of the positive rationals.

The pipeline: represent a finitely generated subgroup ``H`` of the positive
rationals as an integer exponent lattice (:mod:`dimgroup.ratlattice`); run
the staged group-ring carry recursion that produces scale parameters and
residues (:mod:`dimgroup.groupring`); assemble ordered level groups and the
positive connecting matrices between them (:mod:`dimgroup.diagram`); check
every finitely checkable invariant, including an exhaustive box oracle for
order embeddings (:mod:`dimgroup.simplicial`, :mod:`dimgroup.verify`); and
translate to chains of multi-matrix algebras via ordered K-theory
(:mod:`dimgroup.bratteli`).  :mod:`dimgroup.cli` exposes the whole thing as
the ``dimgroup`` command.
"""

from .boxcheck import backend_name, have_compiled_kernel
from .bratteli import (
    IntertwiningCertificate,
    MultiMatrixLevel,
    UltramatricialPresentation,
    k0,
    localization_model,
    localized_unit_orbit,
    morita_scale,
    presentation_from_truncation,
    verify_intertwining,
)
from .diagram import (
    DiagramTruncation,
    LevelGroup,
    LevelIndex,
    build_level,
    build_truncation,
    cofinal_extension,
    embedding_matrix,
    h_action,
    is_integral_level,
    orbit_certificate,
    rl_at_level,
    verify_embedding,
)
from .groupring import (
    EnumB,
    GroupRingElt,
    ParamSeq,
    ResidueTable,
    WDiffs,
    default_enumeration,
    make_params,
    step_b,
)
from .ratlattice import (
    EquivRelSpec,
    SubgroupH,
    contains,
    equiv,
    factor,
    subgroup_from_equiv_pairs,
    subgroup_from_generators,
)
from .simplicial import (
    RatBoundPair,
    SimplicialLevel,
    brute_force_order_embedding,
    embedding_criterion,
    l_value,
    nonadditivity_witness,
    r_value,
)
from .verify import VerifyReport, run_verification

__version__ = "0.1.0"
