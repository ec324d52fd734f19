"""Exact tooling for a labeled Schreier graph of dyadics and its lamp walks."""

from .dyadic import (
    Dyadic,
    ONE,
    PLMap,
    ROOT,
    ZERO,
    cocycle_eval,
    cocycle_identity_check,
    gen_a,
    gen_b,
    letter_map,
    parse_dyadic,
    pl_apply,
    pl_compose,
    pl_invert,
    word_to_pl,
)
from .errors import (
    CapExceeded,
    ExtamenError,
    MissingTailBound,
    PreconditionFailed,
    PropertySelfTestFailed,
    SearchExhausted,
    StructuralAssertFailed,
    Undetermined,
    ZeroBase,
)
from .graph import (
    Ball,
    Hair,
    Skeleton,
    act_letter,
    act_word,
    ball,
    boundary_ratio,
    classify,
    folner_hair_segment,
    get_orientation,
    golden_path,
    hair_point,
    neighbors,
    root_hair_letter,
    set_orientation,
    struct_info,
    subtree_T,
    vertex_at,
)
from .harmonic import (
    VertexFn,
    canonical_phi_u,
    hair_property_suite,
    harmonic_witness_search,
    is_superharmonic_on,
    level_min,
    markov_apply_X,
    phi_family,
    pow2,
)
from .lamplighter import (
    Config,
    SetFn,
    apply_letter,
    apply_word,
    config,
    markov_apply_set,
    markov_iterate,
    orbit_enumerate,
    parse_config,
    serialize_config,
    switch_invariant_check,
)
from .minfn import (
    SymmetricConcaveFn,
    T_operator,
    countable_sum,
    generalized_minfun,
    markov_image,
    minfun,
    non_superharmonic_transfer,
    phi_family_tail_bound,
    r_family_kmean,
    resolve_setfn,
    weighted_sum,
)
from .approx import (
    BetaSchedule,
    beta_schedule,
    construct_En_countable,
    construct_En_markov,
    construct_En_single,
    construct_En_sum,
    explicit_En_hairs,
    generalized_En_search,
    golden_witness,
    strong_verify,
    weak_verify,
)
from .walks import (
    StructuralLampWalk,
    WalkConfig,
    delta_check_phi_u,
    green_mc,
    green_partial,
    lumped_return_series,
    pn_exact,
    potential_decay_experiment,
    return_prob,
    spectral_radius_proxy,
    supermartingale_check,
)
from .freegroup import (
    ZVertex,
    Z_E,
    minfun_Z,
    phi_Z,
    random_z_configs,
    tail_segment,
    witness_word,
    z_apply,
    z_ball,
    z_boundary_ratio,
    z_config,
    z_neighbors,
)

__version__ = "0.1.0"
