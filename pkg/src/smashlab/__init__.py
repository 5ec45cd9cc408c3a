"""smashlab: a calculator for equivariant Bousfield classes.

Evaluates formal equivariant spectrum expressions to chromatic support
data via geometric-fixed-point rules, decides Bousfield equality and
smashing-ness within the chromatic fragment, emits induced-localization
formulas, constructs and verifies the smashing spectra classified by
admissible level sequences over cyclic p-groups, and computes coinduced
admissibility upgrades for equivariant algebra structures.
"""

from .chrom import BOT, TOP, ChromLevel, Prime, join, leq, level, meet, tate_vanishes
from .errors import SmashlabError
from .expr import annotate, to_text
from .groups import (
    Family,
    FiniteGroup,
    Homomorphism,
    Subgroup,
    check_homomorphism,
    conjugate_subgroup,
    cyclic,
    dihedral8,
    direct_product,
    double_cosets,
    family_generated,
    intersect,
    is_subconjugate,
    subgroups,
    symmetric,
    trivial_group,
)
from .ideals import construct, enumerate_sequences, validate_sequence, verify
from .ninfty import (
    GSet,
    IndexingSystem,
    coinduce,
    is_admissible,
    norm_closure_check,
    preservation_propagation,
    restrict_gset,
)
from .parser import Environment, parse_definitions, parse_expr
from .smashing import (
    IdempotentPair,
    Verdict,
    characterize_locals,
    combine_idempotents,
    derive_smashing,
    emit_localization_formula,
    fixed_points_class,
)
from .support import ChromSupport, bousfield_equal, class_leq, is_acyclic, support

__version__ = "0.1.0"
