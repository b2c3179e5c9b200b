"""Declarative modeling of constraint satisfaction and optimization
problems over finite domains, with an XCSP3 compiler and a brute force
oracle for small instances."""

from __future__ import annotations

from .errors import (
    ArityError,
    ArityMismatch,
    BadConditionShape,
    BadFlag,
    BadVariantShapes,
    BothOrNeitherValues,
    CoeffMismatch,
    CspkitError,
    DivisionByZero,
    DuplicateId,
    DuplicateKeys,
    EmptyDomain,
    EmptyTable,
    ExceptingWithExpressions,
    Exhausted,
    FileNotFound,
    HoleAccess,
    IndexArityMismatch,
    LengthsMismatch,
    MalformedSpec,
    MatrixWithExpressions,
    MixedDomain,
    MultipleNumbers,
    NamedBeforeFile,
    NoNumber,
    NonAlphabetic,
    NonGroundable,
    NotSlidable,
    OutOfBounds,
    OutOfDomainValue,
    Overflow,
    ParseError,
    PartialAssignment,
    RaggedGrid,
    RaggedLists,
    SearchSpaceTooLarge,
    SecondObjective,
    ShapeMismatch,
    SymbolArithmetic,
    TooFewTerms,
    UnknownModel,
    UnknownOperator,
    UnknownVariant,
    UnpostableEntry,
    Unsatisfiable,
    WriteError,
)
from .model import (
    HOLE,
    INTEGER,
    SYMBOLIC,
    Domain,
    ModelContext,
    Node,
    Var,
    VarArray,
    Variable,
    belong,
    conjunction,
    current_context,
    disjunction,
    expr,
    ift,
    iff,
    imply,
    maximize,
    minimize,
    new_context,
    satisfy,
    set_current_context,
    var,
    var_array,
    variant,
)
from .constraints import (
    ANY,
    AllDifferent,
    AllDifferentList,
    AllEqual,
    And,
    Automaton,
    Cardinality,
    Channel,
    Circuit,
    Condition,
    ConstraintEntity,
    Count,
    Cumulative,
    Decreasing,
    IfThen,
    IfThenElse,
    Iff,
    Increasing,
    LexDecreasing,
    LexIncreasing,
    MDD,
    Maximum,
    Minimum,
    NValues,
    NoOverlap,
    Not,
    Or,
    Slide,
    Sum,
    Table,
    Xor,
    membership,
    ne,
)
from .dataio import (
    Record,
    TextCursor,
    alphabet_positions,
    columns,
    combinations,
    concat_text_inputs,
    data_suffix,
    different_values,
    export_data,
    parse_data_arg,
    to_indexable,
    transpose,
)
from .oracle import (
    CheckReport,
    Solutions,
    check_solution,
    enumerate_solutions,
    eval_constraint,
    eval_node,
)
from .compiler import (
    InstanceIR,
    compact_refs,
    compile_instance,
    expand_ref,
    output_filename,
    recognize_slides,
    reformulate,
    render_instance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
