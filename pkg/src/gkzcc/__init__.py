"""Exact combinatorics for characteristic cycles of GKZ hypergeometric sheaves."""

from .matrix import (
    CharacterVector,
    GKZError,
    IntMatrix,
    PreconditionError,
    ReductionTranscript,
    character_transform,
    column_submatrix,
    hat,
    is_non_confluent,
    is_p_nondegenerate,
    is_sub_non_confluent,
    p_divide_row,
    rank_mod_p,
    rank_rational,
    square_reduce,
)
from .fan import (
    BlowupRecord,
    Cone,
    GenerableSet,
    b_good_blowup_step,
    default_complete_fan,
    dual_basis,
    edge_pairing,
    is_complete,
    is_generable,
    is_sigma_good,
    mu_nu,
    resolve,
    sigma_bad,
    standard_blowup,
)
from .divisor import (
    direct_image_support,
    enumerate_epsilon,
    exponent_table,
    n_components,
    snc_witness,
    theta_of,
)
from .conormal import (
    DimReport,
    GeneratorSet,
    box_generators,
    dim_report,
    l_generators,
    membership_sample,
    xi_generators,
)
from .cycle import (
    Cycle,
    CycleComponent,
    DimensionGateFailure,
    MultiplicityTable,
    NondegeneracyFailure,
    TrivialCharacter0,
    cc_gkz,
    cc_via_resolution,
    specialize,
    umbrella,
)

__version__ = "0.1.0"
