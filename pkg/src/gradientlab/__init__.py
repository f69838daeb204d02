"""Desk-scale rank-gradient and p-gradient computations for finitely presented groups."""

from .abelian import AbelianData, abelian_data, rank_mod_p, relation_matrix, smith_normal_form
from .chains import (
    ChainRecord,
    SubgroupRecord,
    intersect,
    mod_p_frattini_step,
    p_chain,
    restrict_chain,
    restrict_table,
)
from .constructions import (
    AmalgamSpec,
    HnnSpec,
    KuroshData,
    amalgam,
    build_amalgam,
    build_hnn,
    dp_bounds_check,
    free_product,
    hnn,
    kurosh_stats,
)
from .coset import (
    CosetTable,
    FiniteAction,
    Limits,
    index_in_quotient,
    is_normal,
    low_index_normal_subgroups,
    orbit_count,
    to_action,
    todd_coxeter,
)
from .cost import CostReport, FiniteGraphing, greedy_graphing_audit, orbit_relation_cost
from .errors import (
    CapExceededError,
    DomainError,
    EmbeddingViolationError,
    GradientLabError,
    Indeterminate,
    ParseError,
)
from .gradient import (
    FormulaVerdict,
    GradientReport,
    Interval,
    example45,
    rg_absolute_upper,
    rg_sequence,
    verify_amalgam,
    verify_free_product,
    verify_hnn,
)
from .parsing import (
    format_presentation,
    parse_amalgam_file,
    parse_hnn_file,
    parse_presentation,
    parse_subgroup,
)
from .rewriting import SchreierData, reidemeister_schreier, schreier_transversal, tietze_simplify
from .words import (
    GeneratorSymbol,
    GroupPresentation,
    SubgroupSpec,
    Word,
    free_reduce,
    invert,
    multiply,
    presentation,
)

__version__ = "0.1.0"
