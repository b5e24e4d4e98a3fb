"""Verified subgroup-upgrading game over elementary groups, with a numerical lab."""

from .rings import NcPoly, RingMismatchError, RingSpec, parse_poly
from .matrices import (
    DimensionMismatchError,
    ElemWord,
    InverseWitnessError,
    MatR,
    SignedPermutation,
    commutator,
    conjugate,
    elem_matrix,
    parse_elem_word,
    parse_matrix,
    swap_word,
    verify_sharp,
)
from .patterns import (
    BlockTag,
    PatternError,
    PatternSubgroup,
    UnsupportedConjugatorError,
    abelianization_trivial_certificate,
    builtin_names,
    builtin_pattern,
    closure_to_full,
    matches_pattern,
    parse_pattern_ref,
    pattern_conjugate,
    pattern_contains,
    pattern_join,
    sample_word,
)
from .game import (
    GameConfig,
    GameState,
    Move,
    MoveKind,
    MoveRejectedError,
    TranscriptUnsoundError,
    apply_move,
    audit_state,
    is_won,
    new_game,
    run_standard_strategy,
    stage_tables_text,
    standard_strategy_moves,
    transcript_dumps,
    transcript_loads,
)
from .finitegroups import FiniteGroupModel, elementary_quotient
from .enclosing import chebyshev_center, minimal_ball_exact

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
