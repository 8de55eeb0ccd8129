"""Descendant-set tree automata for term rewriting.

The package builds bottom-up tree automata recognizing all descendants
of a finite tree language under a left-linear generalized semi-monadic
rewrite system, and uses them to decide reachability, joinability,
local confluence, relation inclusion and rule minimality.
"""

from .terms import (
    App,
    ArityMismatchError,
    BadEncodingError,
    InvalidPositionError,
    ParseError,
    Position,
    RankedAlphabet,
    Substitution,
    Symbol,
    Term,
    TermError,
    Var,
    app,
    apply,
    height,
    is_ground,
    is_linear,
    match,
    mgu,
    parse_term,
    positions,
    replace_at,
    subterm_at,
    subterms,
    supertrees,
    term_text,
    to_ground_g,
    to_ground_z,
)
from .rewriting import (
    AlphabetsNotDisjointError,
    CriticalPair,
    FreeVariableError,
    GsmViolation,
    NotInvertibleError,
    Rule,
    Trs,
    TrsClassification,
    TrsError,
    UnknownSymbolError,
    VariableLhsError,
    bounded_closure,
    classify,
    critical_pairs,
    disjoint_union,
    invert,
    is_gsm,
    parse_language,
    parse_trs,
    rule_text,
    successors,
    union,
    validate,
)
from .automata import (
    AlphabetMismatchError,
    Apply,
    AutomatonError,
    Bta,
    ForeignSymbolError,
    Lambda,
    State,
    accepts,
    bta_text,
    complement,
    determinize,
    eliminate_lambda,
    enumerate_terms,
    equivalent,
    fundamental_bta,
    intersection,
    is_empty,
    parse_bta,
    reachable_states,
    state_for_term,
    trim,
)
from .completion import (
    SaturationResult,
    UnsupportedTrsError,
    descendants,
    descendants_disjoint_union,
    injected_ground_terms,
    saturate,
    support_terms,
)
from .decide import (
    Comparison,
    Decision,
    RelOrder,
    compare,
    compare_thue,
    convertible_confluent,
    ground_minimal,
    ground_relation_included,
    joinable,
    locally_confluent,
    minimal,
    reachable,
    relation_included,
)

__version__ = "0.1.0"
