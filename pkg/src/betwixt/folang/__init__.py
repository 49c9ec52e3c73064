"""First-order formulas with counting and monadic set quantifiers."""
from .evaluator import SET_QUANTIFIER_CAP, EvaluationError, Evaluator, evaluate
from .parser import FormulaSyntaxError, UnknownSymbolError, Vocabulary, parse
from .rewrite import (
    expand_counting,
    free_set_vars,
    free_vars,
    rename_relation,
    substitute,
    vocabulary_of,
    weak_to_strong,
)
from .structure import FiniteStructure, TableRelation
from .syntax import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    CountExists,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    SetExists,
    SetForall,
    Truth,
    Var,
    atom,
    conj,
    disj,
    eq,
    exists,
    forall,
    neq,
    size,
    to_text,
)
