"""Non-neural core of two-stage LP word-problem formulation."""
from .augment import AugmentConfig, augment_corpus, find_eligible, reverse_constraint
from .canonical import (
    CanonicalForm,
    ConstraintType,
    canonicalize_gold,
    classify,
    sort_declarations,
    to_canonical,
)
from .corpus import EntityTag, Label, Problem, load_corpus, save_corpus, variable_alias
from .embed import EmbeddingTables, baseline_compose, compose
from .ir import (
    Constraint,
    IrDocument,
    IrError,
    LinearExpr,
    Objective,
    Op,
    Sense,
    normalize,
    parse_ir,
    print_ir,
)
from .scorer import ScoreReport, match_declarations, score

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig", "CanonicalForm", "Constraint", "ConstraintType", "EmbeddingTables",
    "EntityTag", "IrDocument", "IrError", "Label", "LinearExpr", "Objective", "Op", "Problem",
    "ScoreReport", "Sense", "augment_corpus", "baseline_compose", "canonicalize_gold", "classify",
    "compose", "find_eligible", "load_corpus", "match_declarations", "normalize", "parse_ir",
    "print_ir", "reverse_constraint", "save_corpus", "score", "sort_declarations", "to_canonical",
    "variable_alias",
]
