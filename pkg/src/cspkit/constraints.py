"""Constraint constructors, aggregates, tables, automata and conditions.

Every constructor returns a ConstraintEntity ready for satisfy(), except
the aggregate builders (Sum, Count, NValues, Minimum, Maximum, Cumulative)
which return an Aggregate that only becomes a constraint once compared:
Sum(x) == 10, Count(w, value=3) <= 2 and so on. Aggregates may also sit
inside larger expressions; the compiler then introduces auxiliary
variables for them.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .errors import (
    ArityError,
    ArityMismatch,
    BadConditionShape,
    BadVariantShapes,
    BothOrNeitherValues,
    CoeffMismatch,
    DuplicateKeys,
    EmptyTable,
    ExceptingWithExpressions,
    LengthsMismatch,
    MatrixWithExpressions,
    NotSlidable,
    RaggedLists,
    ShapeMismatch,
    TooFewTerms,
    UnpostableEntry,
)
from .model import (
    COMPARISON_OPS,
    OP_ALIASES,
    Node,
    Variable,
    VarArray,
    VarList,
    build_node,
)

#: wildcard inside table rows, printed as *
ANY = type("AnyValue", (), {"__repr__": lambda self: "*"})()

CONDITION_OPS = ("lt", "le", "ge", "gt", "eq", "ne", "in", "notin")

_MIRROR = {"lt": "gt", "le": "ge", "gt": "lt", "ge": "le", "eq": "eq", "ne": "ne"}


class ne:
    """Row entry meaning "any value but this one"; expanded against the
    domain of the matching scope variable when the table is posted."""

    __slots__ = ("value",)

    def __init__(self, value: int):
        self.value = value

    def __repr__(self) -> str:
        return f"ne({self.value})"


# --------------------------------------------------------------------------
# term handling
# --------------------------------------------------------------------------

def flatten_terms(entry, out: list | None = None,
                  aggregates_ok: bool = False) -> list:
    """Flatten arrays, lists and generators into a list of terms; holes
    (None cells) are dropped on the way."""
    if out is None:
        out = []
    if entry is None:
        return out
    if isinstance(entry, (Variable, Node, int, str)):
        out.append(entry)
        return out
    if isinstance(entry, VarArray):
        for cell in entry.flat():
            out.append(cell)
        return out
    if isinstance(entry, Aggregate):
        if aggregates_ok:
            out.append(entry)
            return out
        raise UnpostableEntry("an aggregate cannot be used as a plain term here")
    if isinstance(entry, Iterable):
        for sub in entry:
            flatten_terms(sub, out, aggregates_ok)
        return out
    raise UnpostableEntry(f"cannot use {entry!r} as a constraint term")


def _rows_of(thing) -> list[list]:
    """Rows of a matrix argument: a 2 dimensional VarArray or list of lists."""
    if isinstance(thing, VarArray):
        if len(thing.dims) != 2:
            raise MatrixWithExpressions("the matrix form needs a two dimensional array")
        rows = [list(row) for row in thing.cells]
    else:
        rows = [list(row) for row in thing]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise RaggedLists("matrix rows must all have the same length")
    for row in rows:
        for cell in row:
            if not isinstance(cell, Variable):
                raise MatrixWithExpressions(
                    "the matrix form only accepts a full grid of raw variables")
    return rows


# --------------------------------------------------------------------------
# conditions
# --------------------------------------------------------------------------

class Condition:
    """A comparison attached to an aggregate: (op, right hand side)."""

    __slots__ = ("op", "rhs")

    def __init__(self, op: str, rhs):
        op = OP_ALIASES.get(op, op)
        if op not in CONDITION_OPS:
            raise BadConditionShape(f"unusable condition operator {op!r}")
        if op in ("in", "notin"):
            if isinstance(rhs, range):
                pass
            elif isinstance(rhs, (set, frozenset, list, tuple)) and all(
                    isinstance(v, int) for v in rhs):
                rhs = frozenset(rhs)
            else:
                raise BadConditionShape("in / notin need a range or a set of ints")
        elif not isinstance(rhs, (int, Variable)) or isinstance(rhs, bool):
            if isinstance(rhs, bool):
                rhs = int(rhs)
            else:
                raise BadConditionShape(
                    f"condition right side must be an int or a variable, got {rhs!r}")
        self.op = op
        self.rhs = rhs

    def __repr__(self) -> str:
        return f"({self.op},{self.rhs!r})"


# --------------------------------------------------------------------------
# entities
# --------------------------------------------------------------------------

class ConstraintEntity:
    """One posted constraint: a kind, its parameters, an optional note and
    an optional classification tag."""

    __slots__ = ("kind", "params", "note", "tag")

    _as_predicate_leaf = True

    def __init__(self, kind: str, params: dict, note: str | None = None,
                 tag: str | None = None):
        self.kind = kind
        self.params = params
        self.note = note
        self.tag = tag

    def _as_entity(self):
        return self

    def noted(self, note: str) -> "ConstraintEntity":
        """Attach a human readable note, returning the entity itself."""
        self.note = note
        return self

    def tagged(self, tag: str) -> "ConstraintEntity":
        """Attach a classification tag, returning the entity itself."""
        self.tag = tag
        return self

    # entities can be combined into boolean expressions; the compiler
    # rewrites them into predicates over auxiliary variables
    def __and__(self, other):
        return build_node("and", [self, other])

    __rand__ = __and__

    def __or__(self, other):
        return build_node("or", [self, other])

    __ror__ = __or__

    def __xor__(self, other):
        return build_node("xor", [self, other])

    __rxor__ = __xor__

    def __invert__(self):
        return build_node("not", [self])

    def __bool__(self):
        raise TypeError("a constraint has no host truth value; use &, |, ~")

    def __repr__(self) -> str:
        return f"<{self.kind} {self.params!r}>"


# --------------------------------------------------------------------------
# aggregates
# --------------------------------------------------------------------------

class Aggregate:
    """A numeric quantity over terms (sum, count, ...) awaiting a
    condition. Comparing it builds the conditioned constraint; embedding
    it in an expression leaves a leaf for the compiler to rewrite."""

    __slots__ = ("kind", "terms", "coeffs", "params")

    _as_predicate_leaf = True

    def __init__(self, kind: str, terms: list, coeffs: list | None = None,
                 params: dict | None = None):
        self.kind = kind
        self.terms = terms
        self.coeffs = coeffs
        self.params = params or {}

    def _cmp(self, op: str, rhs):
        return compare_aggregate(self, op, rhs)

    def __eq__(self, other):
        return self._cmp("eq", other)

    def __ne__(self, other):
        return self._cmp("ne", other)

    def __lt__(self, other):
        return self._cmp("lt", other)

    def __le__(self, other):
        return self._cmp("le", other)

    def __gt__(self, other):
        return self._cmp("gt", other)

    def __ge__(self, other):
        return self._cmp("ge", other)

    def __add__(self, other):
        if self.kind == "sum" and isinstance(other, Aggregate) and other.kind == "sum":
            return Aggregate("sum", self.terms + other.terms,
                             _merge_coeffs(self, other))
        return build_node("add", [self, other])

    def __radd__(self, other):
        return build_node("add", [other, self])

    def __sub__(self, other):
        if self.kind == "sum" and isinstance(other, Aggregate) and other.kind == "sum":
            return self + other * -1
        return build_node("sub", [self, other])

    def __rsub__(self, other):
        return build_node("sub", [other, self])

    def __mul__(self, other):
        if self.kind == "sum" and isinstance(other, int) and not isinstance(other, bool):
            coeffs = self.coeffs or [1] * len(self.terms)
            return Aggregate("sum", list(self.terms), [c * other for c in coeffs])
        return build_node("mul", [self, other])

    __rmul__ = __mul__

    def __hash__(self):
        return object.__hash__(self)

    def __bool__(self):
        raise TypeError("compare an aggregate before using it as a constraint")

    def __repr__(self) -> str:
        return f"Aggregate({self.kind}, {len(self.terms)} terms)"


def _merge_coeffs(a: Aggregate, b: Aggregate) -> list | None:
    if a.coeffs is None and b.coeffs is None:
        return None
    return (a.coeffs or [1] * len(a.terms)) + (b.coeffs or [1] * len(b.terms))


def compare_aggregate(agg: Aggregate, op: str, rhs) -> ConstraintEntity | Node:
    """Attach a condition to an aggregate, or defer to the compiler when
    the right side is itself an expression."""
    op = OP_ALIASES.get(op, op)
    if isinstance(rhs, bool):
        rhs = int(rhs)
    if isinstance(rhs, Aggregate):
        if agg.kind == "sum" and rhs.kind == "sum":
            return compare_aggregate(agg + rhs * -1, op, 0)
        return build_node(op, [agg, rhs])
    if isinstance(rhs, Node):
        return build_node(op, [agg, rhs])
    condition = Condition(op, rhs)
    params = dict(agg.params)
    params["condition"] = condition
    if agg.kind == "sum":
        params["list"] = agg.terms
        params["coeffs"] = agg.coeffs
    elif agg.kind == "cumulative":
        params["origins"] = agg.terms
    else:
        params["list"] = agg.terms
    return ConstraintEntity(agg.kind, params)


# --------------------------------------------------------------------------
# tables, automata, diagram structures
# --------------------------------------------------------------------------

class Table:
    """An extensional relation: either supports or conflicts, never both."""

    __slots__ = ("rows", "positive")

    def __init__(self, supports=None, conflicts=None):
        if (supports is None) == (conflicts is None):
            raise ArityError("give exactly one of supports= / conflicts=")
        raw = supports if supports is not None else conflicts
        self.positive = supports is not None
        rows = []
        for row in raw:
            if not isinstance(row, (tuple, list)):
                row = (row,)
            rows.append(tuple(row))
        self.rows = rows

    @property
    def arity(self) -> int:
        if not self.rows:
            raise EmptyTable("an empty table has no arity")
        return len(self.rows[0])

    def __len__(self) -> int:
        return len(self.rows)

    def __call__(self, *scope) -> ConstraintEntity | None:
        """Apply the relation to a scope of variables."""
        return membership(scope[0] if len(scope) == 1 else scope, self)

    def __repr__(self) -> str:
        side = "supports" if self.positive else "conflicts"
        return f"Table({side}, {len(self.rows)} rows)"


class Automaton:
    """A finite state recognizer; nondeterminism is allowed and is not
    rejected, transitions are simply explored as given."""

    __slots__ = ("start", "transitions", "final")

    def __init__(self, *, start: str, transitions: Sequence, final):
        self.start = start
        self.transitions = [tuple(t) for t in transitions]
        for t in self.transitions:
            if len(t) != 3:
                raise ShapeMismatch(f"a transition needs 3 entries, got {t!r}")
        self.final = frozenset([final] if isinstance(final, str) else final)
        states = {start} | {t[0] for t in self.transitions} | {t[2] for t in self.transitions}
        missing = self.final - states
        if not self.final:
            raise ShapeMismatch("an automaton needs at least one final state")
        if missing:
            raise ShapeMismatch(f"final states {sorted(missing)} appear in no transition")

    def __call__(self, *scope) -> ConstraintEntity:
        """Apply the recognizer to a sequence of variables."""
        return membership(scope[0] if len(scope) == 1 else scope, self)

    def __repr__(self) -> str:
        return f"Automaton({self.start}, {len(self.transitions)} transitions)"


class MDD:
    """A layered decision diagram given as an ordered transition list with
    one root and one terminal node."""

    __slots__ = ("transitions", "root", "terminal")

    def __init__(self, transitions: Sequence):
        self.transitions = [tuple(t) for t in transitions]
        if not self.transitions:
            raise EmptyTable("an empty diagram accepts nothing")
        for t in self.transitions:
            if len(t) != 3:
                raise ShapeMismatch(f"a transition needs 3 entries, got {t!r}")
        sources = {t[0] for t in self.transitions}
        targets = {t[2] for t in self.transitions}
        roots = sources - targets
        terminals = targets - sources
        if len(roots) != 1:
            raise ShapeMismatch(f"a diagram needs exactly one root, found {sorted(map(str, roots))}")
        if len(terminals) != 1:
            raise ShapeMismatch(f"a diagram needs exactly one terminal, found {sorted(map(str, terminals))}")
        self.root = next(iter(roots))
        self.terminal = next(iter(terminals))
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        out: dict = {}
        for src, _v, dst in self.transitions:
            out.setdefault(src, []).append(dst)
        seen: set = set()
        stack: set = set()

        def visit(node) -> None:
            if node in stack:
                raise ShapeMismatch("the transition graph has a cycle")
            if node in seen:
                return
            seen.add(node)
            stack.add(node)
            for nxt in out.get(node, ()):
                visit(nxt)
            stack.discard(node)

        visit(self.root)

    def __call__(self, *scope) -> ConstraintEntity:
        """Apply the diagram to a sequence of variables."""
        return membership(scope[0] if len(scope) == 1 else scope, self)

    def __repr__(self) -> str:
        return f"MDD({len(self.transitions)} transitions)"


def membership(scope, rhs, negated: bool = False) -> ConstraintEntity | None:
    """Post that a tuple of variables belongs to a relation.

    rhs may be a Table, a plain set/list of tuples (taken as supports), an
    Automaton, an MDD, or for a single variable a set of values. A negated
    empty table constrains nothing and returns None; a positive empty
    table gives a marker entity that can never be satisfied.
    """
    if isinstance(scope, (Variable, Node)):
        scope_vars = [scope]
    else:
        scope_vars = flatten_terms(scope)
    if not scope_vars:
        raise ArityMismatch("membership needs at least one scope variable")
    for v in scope_vars:
        if not isinstance(v, Variable):
            raise ArityMismatch("membership scopes hold raw variables only")

    if isinstance(rhs, Automaton):
        return ConstraintEntity("regular", {"list": scope_vars, "automaton": rhs})
    if isinstance(rhs, MDD):
        return ConstraintEntity("mdd", {"list": scope_vars, "diagram": rhs})

    if isinstance(rhs, Table):
        if negated:
            # negating a table swaps its polarity
            table = Table(conflicts=rhs.rows) if rhs.positive else Table(supports=rhs.rows)
        else:
            table = rhs
    elif isinstance(rhs, (set, frozenset, list, tuple)):
        values = list(rhs)
        if isinstance(rhs, (set, frozenset)):
            # sets have no order of their own; render them sorted
            values.sort(key=_row_sort_key)
        if len(scope_vars) == 1 and all(isinstance(v, (int, str)) for v in values):
            rows = [(v,) for v in sorted(set(values), key=lambda v: (isinstance(v, str), v))]
            table = Table(conflicts=rows) if negated else Table(supports=rows)
        else:
            table = Table(conflicts=values) if negated else Table(supports=values)
    else:
        raise ArityMismatch(f"cannot interpret {rhs!r} as a relation")

    if not table.rows:
        if table.positive:
            return ConstraintEntity("unsatisfiable", {"list": scope_vars})
        return None
    if table.arity != len(scope_vars):
        raise ArityMismatch(
            f"table arity {table.arity} does not match scope length {len(scope_vars)}")
    rows = _expand_ne_rows(table.rows, scope_vars)
    return ConstraintEntity("extension", {
        "list": scope_vars, "rows": rows, "positive": table.positive})


def _row_sort_key(row):
    if not isinstance(row, (tuple, list)):
        row = (row,)
    return tuple((isinstance(v, str), 0 if v is ANY else v) for v in row)


def _expand_ne_rows(rows: list[tuple], scope_vars: list[Variable]) -> list[tuple]:
    """Replace ne(v) entries by one row per remaining domain value."""
    out: list[tuple] = []
    for row in rows:
        pending = [()]
        for k, entry in enumerate(row):
            if isinstance(entry, ne):
                choices = [v for v in scope_vars[k].dom if v != entry.value]
            else:
                choices = [entry]
            pending = [p + (c,) for p in pending for c in choices]
        out.extend(pending)
    seen = set()
    unique = []
    for row in out:
        key = tuple("*" if v is ANY else v for v in row)
        if key not in seen:
            seen.add(key)
            unique.append(row)
    return unique


# --------------------------------------------------------------------------
# constraint constructors
# --------------------------------------------------------------------------

def AllDifferent(term, *others, excepting=None, matrix: bool | None = None):
    """All terms take distinct values; except values are ignored. With
    matrix=True a two dimensional array is constrained row by row and
    column by column."""
    if matrix:
        if others or excepting is not None:
            raise MatrixWithExpressions("the matrix form takes a single grid")
        rows = _rows_of(term)
        return ConstraintEntity("allDifferent", {"matrix": rows})
    terms = flatten_terms([term, *others])
    if len(terms) < 2:
        raise TooFewTerms("allDifferent needs at least two terms")
    exc = None
    if excepting is not None:
        exc = tuple(excepting) if isinstance(excepting, (list, tuple, set, frozenset)) \
            else (excepting,)
        if any(isinstance(t, Node) for t in terms):
            raise ExceptingWithExpressions(
                "except values combine only with raw variables")
    return ConstraintEntity("allDifferent", {"list": terms, "excepting": exc})


def AllDifferentList(term, *others, excepting=None):
    """The tuples formed by several lists of variables are all distinct."""
    if not others:
        if isinstance(term, VarArray) and len(term.dims) == 2:
            raws: list = [list(row) for row in term.cells]
        else:
            raws = list(term)
    else:
        raws = [term, *others]
    lists = [flatten_terms(lst) for lst in raws]
    if len(lists) < 2:
        raise TooFewTerms("allDifferentList needs at least two lists")
    width = len(lists[0])
    if width < 2 or any(len(lst) != width for lst in lists):
        raise RaggedLists("lists must share one length of at least two")
    exc = None
    if excepting is not None:
        exc = [tuple(t) for t in excepting]
        if any(len(t) != width for t in exc):
            raise RaggedLists("except tuples must match the list length")
    return ConstraintEntity("allDifferentList", {"lists": lists, "excepting": exc})


def AllEqual(term, *others):
    terms = flatten_terms([term, *others])
    if len(terms) < 2:
        raise TooFewTerms("allEqual needs at least two terms")
    return ConstraintEntity("allEqual", {"list": terms})


def ordered(terms, direction: str = "increasing", strict: bool = False,
            lengths=None) -> ConstraintEntity | None:
    """Terms follow one another; lengths, when given, are minimal gaps."""
    terms = flatten_terms(terms)
    if len(terms) < 2:
        return None
    if direction not in ("increasing", "decreasing"):
        raise BadConditionShape(f"unknown direction {direction!r}")
    if lengths is not None:
        lengths = list(lengths)
        if len(lengths) != len(terms) - 1:
            raise LengthsMismatch(
                f"need {len(terms) - 1} lengths for {len(terms)} terms, got {len(lengths)}")
    op = {"increasing": ("le", "lt"), "decreasing": ("ge", "gt")}[direction][int(strict)]
    return ConstraintEntity("ordered", {"list": terms, "operator": op,
                                        "lengths": lengths})


def Increasing(term, *others, strict: bool = False, lengths=None):
    return ordered([term, *others], "increasing", strict, lengths)


def Decreasing(term, *others, strict: bool = False, lengths=None):
    return ordered([term, *others], "decreasing", strict, lengths)


def lex(lists, direction: str = "increasing", strict: bool = False,
        matrix: bool = False) -> ConstraintEntity:
    """Lists (or the rows and columns of a matrix) follow one another in
    lexicographic order."""
    if direction not in ("increasing", "decreasing"):
        raise BadConditionShape(f"unknown direction {direction!r}")
    op = {"increasing": ("le", "lt"), "decreasing": ("ge", "gt")}[direction][int(strict)]
    if matrix:
        rows = _rows_of(lists)
        return ConstraintEntity("lex", {"matrix": rows, "operator": op})
    rows = [flatten_terms(lst) for lst in lists]
    if len(rows) < 2 or any(len(r) != len(rows[0]) for r in rows):
        raise RaggedLists("lex needs at least two lists of one same length")
    return ConstraintEntity("lex", {"lists": rows, "operator": op})


def LexIncreasing(*lists, strict: bool = False, matrix: bool = False):
    if matrix and len(lists) == 1:
        return lex(lists[0], "increasing", strict, matrix=True)
    return lex(lists, "increasing", strict)


def LexDecreasing(*lists, strict: bool = False, matrix: bool = False):
    if matrix and len(lists) == 1:
        return lex(lists[0], "decreasing", strict, matrix=True)
    return lex(lists, "decreasing", strict)


def _extract_sum_coeffs(terms: list) -> tuple[list, list | None]:
    """Pull integer factors out of product terms: 3 * x contributes term x
    with coefficient 3. Only done when at least one term carries one."""
    def split(term):
        if isinstance(term, Node) and term.op == "mul" and len(term.args) == 2:
            a, b = term.args
            if isinstance(a, int) and not isinstance(b, int):
                return b, a
            if isinstance(b, int) and not isinstance(a, int):
                return a, b
        return term, None

    pairs = [split(t) for t in terms]
    if all(c is None for _t, c in pairs):
        return terms, None
    return [t for t, _c in pairs], [1 if c is None else c for _t, c in pairs]


def Sum(term, *others, coeffs=None) -> Aggregate:
    """The weighted sum of the terms."""
    terms = flatten_terms([term, *others])
    if not terms:
        raise TooFewTerms("sum needs at least one term")
    if coeffs is not None:
        coeffs = list(coeffs)
        if len(coeffs) != len(terms):
            raise CoeffMismatch(
                f"{len(terms)} terms but {len(coeffs)} coefficients")
        if all(isinstance(c, Variable) for c in coeffs):
            terms = [build_node("mul", [t, c]) for t, c in zip(terms, coeffs)]
            coeffs = None
        elif not all(isinstance(c, int) for c in coeffs):
            raise CoeffMismatch("coefficients must be all ints or all variables")
    else:
        terms, coeffs = _extract_sum_coeffs(terms)
    return Aggregate("sum", terms, coeffs)


def Count(term, *others, value=None, values=None) -> Aggregate:
    """How many terms take the given value (or one of the given values)."""
    terms = flatten_terms([term, *others])
    if (value is None) == (values is None):
        raise BothOrNeitherValues("give exactly one of value= / values=")
    vals = [value] if values is None else list(values)
    if not vals:
        raise BothOrNeitherValues("values= cannot be empty")
    return Aggregate("count", terms, params={"values": vals})


def NValues(term, *others, excepting=None) -> Aggregate:
    """How many distinct values the terms take."""
    terms = flatten_terms([term, *others])
    exc = None
    if excepting is not None:
        exc = tuple(excepting) if isinstance(excepting, (list, tuple, set, frozenset)) \
            else (excepting,)
    return Aggregate("nValues", terms, params={"excepting": exc})


def Minimum(term, *others) -> Aggregate:
    terms = flatten_terms([term, *others], aggregates_ok=True)
    if not terms:
        raise TooFewTerms("minimum needs at least one term")
    return Aggregate("minimum", terms)


def Maximum(term, *others) -> Aggregate:
    terms = flatten_terms([term, *others], aggregates_ok=True)
    if not terms:
        raise TooFewTerms("maximum needs at least one term")
    return Aggregate("maximum", terms)


def Cardinality(terms, occurrences, closed: bool = False) -> ConstraintEntity:
    """Each counted value occurs the required number of times; occurrence
    requirements may be ints, ranges or variables."""
    terms = flatten_terms(terms)
    if isinstance(occurrences, dict):
        pairs = list(occurrences.items())
    else:
        pairs = [tuple(p) for p in occurrences]
    seen = set()
    for value, _occ in pairs:
        if value in seen:
            raise DuplicateKeys(f"value {value!r} counted twice")
        seen.add(value)
    values = [v for v, _ in pairs]
    occurs = [o for _, o in pairs]
    for occ in occurs:
        if not isinstance(occ, (int, range, Variable)):
            raise BadConditionShape(f"occurrence {occ!r} must be int, range or variable")
    return ConstraintEntity("cardinality", {
        "list": terms, "values": values, "occurs": occurs, "closed": closed})


def Channel(list1, list2=None, start_index1: int = 0,
            start_index2: int = 0) -> ConstraintEntity:
    """Link positions and values of one or two lists, or bind the single 1
    of a 0/1 list to a value variable."""
    terms1 = flatten_terms(list1)
    if list2 is None:
        if len(terms1) < 2:
            raise BadVariantShapes("channel needs at least two variables")
        return ConstraintEntity("channel", {
            "list1": terms1, "list2": None, "start1": start_index1, "start2": start_index2})
    if isinstance(list2, Variable):
        for v in terms1:
            if not isinstance(v, Variable) or not all(x in (0, 1) for x in v.dom):
                raise BadVariantShapes("the list of a value channel must be 0/1 variables")
        return ConstraintEntity("channel", {
            "list1": terms1, "list2": None, "value": list2,
            "start1": start_index1, "start2": start_index2})
    terms2 = flatten_terms(list2)
    if not (2 <= len(terms1) <= len(terms2)):
        raise BadVariantShapes(
            f"channel needs 2 <= |first list| <= |second list|, got {len(terms1)} and {len(terms2)}")
    return ConstraintEntity("channel", {
        "list1": terms1, "list2": terms2, "start1": start_index1, "start2": start_index2})


def NoOverlap(origins, lengths, zero_ignored: bool = False) -> ConstraintEntity:
    """Tasks (1d) or boxes (kd) must not overlap."""
    origins = list(origins)
    lengths = list(lengths)
    if len(origins) != len(lengths) or len(origins) < 2:
        raise ShapeMismatch("need matching origin and length lists of size >= 2")
    multi = isinstance(origins[0], (list, tuple, VarList))
    if multi:
        k = len(origins[0])
        origins = [list(o) for o in origins]
        lengths = [list(l) for l in lengths]
        if any(len(o) != k for o in origins) or any(len(l) != k for l in lengths):
            raise ShapeMismatch("all boxes must have the same number of dimensions")
    return ConstraintEntity("noOverlap", {
        "origins": origins, "lengths": lengths, "zero_ignored": zero_ignored,
        "multi": multi})


def Cumulative(origins, lengths, heights, ends=None) -> Aggregate:
    """Resource usage of overlapping tasks; compare it to get the limit,
    as in Cumulative(o, l, h) <= capacity."""
    origins = flatten_terms(origins)
    lengths = list(lengths)
    heights = list(heights)
    if not (len(origins) == len(lengths) == len(heights)):
        raise ShapeMismatch("origins, lengths and heights must align")
    if ends is not None:
        ends = flatten_terms(ends)
        if len(ends) != len(origins):
            raise ShapeMismatch("ends must align with origins")
    return Aggregate("cumulative", origins, params={
        "lengths": list(lengths), "heights": list(heights), "ends": ends})


def Circuit(terms, start_index: int = 0, size=None) -> ConstraintEntity:
    """The successor variables draw one cycle over at least two nodes;
    nodes may self loop out of the circuit."""
    terms = flatten_terms(terms)
    if len(terms) < 2:
        raise TooFewTerms("circuit needs at least two successors")
    if size is not None and not isinstance(size, (int, Variable)):
        raise BadConditionShape("size must be an int or a variable")
    return ConstraintEntity("circuit", {
        "list": terms, "start": start_index, "size": size})


# --------------------------------------------------------------------------
# sliding
# --------------------------------------------------------------------------

def scope_of(entity: ConstraintEntity) -> list[Variable]:
    """The variables of an entity, in rendering order, without repeats."""
    seen: set[int] = set()
    out: list[Variable] = []

    def add(v):
        if isinstance(v, Variable) and id(v) not in seen:
            seen.add(id(v))
            out.append(v)

    def walk(value):
        if isinstance(value, Variable):
            add(value)
        elif isinstance(value, Node):
            if value.op == "idx":
                for cell in value.args[0].flat():
                    add(cell)
                for idx in value.args[1:]:
                    walk(idx)
            else:
                for a in value.args:
                    walk(a)
        elif isinstance(value, Aggregate):
            for t in value.terms:
                walk(t)
            for p in value.params.values():
                walk(p)
        elif isinstance(value, ConstraintEntity):
            for v in scope_of(value):
                add(v)
        elif isinstance(value, Condition):
            walk(value.rhs)
        elif isinstance(value, (list, tuple, VarList)):
            for item in value:
                walk(item)
        elif isinstance(value, dict):
            for item in value.values():
                walk(item)

    for key, value in entity.params.items():
        if key in ("positive", "closed", "zero_ignored", "multi", "start",
                   "start1", "start2", "operator", "rows"):
            continue
        walk(value)
    return out


def _window_offset(scopes: list[list[Variable]]) -> int:
    """The constant shift between consecutive scope windows, or -1."""
    width = len(scopes[0])
    first, second = scopes[0], scopes[1]
    for offset in range(1, width + 1):
        if all(second[j] is first[j + offset] for j in range(width - offset)):
            base = list(first)
            ok = True
            for k, win in enumerate(scopes):
                lo = k * offset
                while len(base) < lo + width:
                    base.append(None)
                for j, v in enumerate(win):
                    if base[lo + j] is None:
                        base[lo + j] = v
                    elif base[lo + j] is not v:
                        ok = False
                        break
                if not ok:
                    break
            if ok and all(v is not None for v in base):
                return offset
    return -1


def Slide(entities, offset: int | None = None,
          circular: bool = False) -> ConstraintEntity:
    """Present a run of identical constraints over sliding scopes as one
    constraint. The entities must share a kind and all parameters except
    their scope, and the scopes must advance by a constant offset."""
    ents = [e for e in flatten_entities(entities)]
    if len(ents) < 2:
        raise NotSlidable("sliding needs at least two constraints")
    kinds = {e.kind for e in ents}
    if len(kinds) != 1:
        raise NotSlidable(f"mixed constraint kinds {sorted(kinds)}")
    scopes = [scope_of(e) for e in ents]
    width = len(scopes[0])
    if any(len(s) != width for s in scopes):
        raise NotSlidable("scope widths differ")
    found = _window_offset(scopes)
    if found < 0:
        raise NotSlidable("scopes do not advance by a constant offset")
    if offset is not None and offset != found:
        raise NotSlidable(f"scopes advance by {found}, not {offset}")
    base: list[Variable] = list(scopes[0])
    for k, win in enumerate(scopes[1:], start=1):
        lo = k * found
        for j, v in enumerate(win):
            if lo + j >= len(base):
                base.append(v)
    return ConstraintEntity("slide", {
        "entities": ents, "list": base, "offset": found, "circular": circular})


def flatten_entities(entries) -> list[ConstraintEntity]:
    out: list[ConstraintEntity] = []

    def walk(entry):
        if entry is None:
            return
        if isinstance(entry, (ConstraintEntity, Node, Variable)):
            ent = entity_from_entry(entry)
            if ent is not None:
                out.append(ent)
            return
        if isinstance(entry, Iterable) and not isinstance(entry, (str, bytes)):
            for sub in entry:
                walk(sub)
            return
        raise UnpostableEntry(f"cannot use {entry!r} as a constraint")

    walk(entries)
    return out


# --------------------------------------------------------------------------
# meta combinators
# --------------------------------------------------------------------------

_META_ARITY = {"not": (1, 1), "ifThen": (2, 2), "ifThenElse": (3, 3),
               "and": (2, None), "or": (2, None), "xor": (2, None),
               "iff": (2, None)}


def meta_combine(kind: str, entries) -> ConstraintEntity:
    """Combine whole constraints logically; rendered as a meta element or
    compiled down to predicates in core only mode."""
    if kind not in _META_ARITY:
        raise BadConditionShape(f"unknown combinator {kind!r}")
    children = []
    for entry in entries:
        ent = entity_from_entry(entry)
        if ent is None:
            raise UnpostableEntry("a combinator child cannot be empty")
        children.append(ent)
    lo, hi = _META_ARITY[kind]
    if len(children) < lo or (hi is not None and len(children) > hi):
        want = str(lo) if lo == hi else f"{lo}+"
        raise ArityError(f"{kind} takes {want} constraints, got {len(children)}")
    return ConstraintEntity(kind, {"entities": children})


def And(*entries):
    return meta_combine("and", entries)


def Or(*entries):
    return meta_combine("or", entries)


def Not(entry):
    return meta_combine("not", [entry])


def Xor(*entries):
    return meta_combine("xor", entries)


def IfThen(condition, consequence):
    return meta_combine("ifThen", [condition, consequence])


def IfThenElse(condition, consequence, alternative):
    return meta_combine("ifThenElse", [condition, consequence, alternative])


def Iff(*entries):
    return meta_combine("iff", entries)


# --------------------------------------------------------------------------
# posting conversion
# --------------------------------------------------------------------------

def entity_from_entry(entry) -> ConstraintEntity | None:
    """Turn a satisfy() entry into a constraint entity."""
    if entry is None:
        return None
    if isinstance(entry, ConstraintEntity):
        return entry
    if isinstance(entry, Aggregate):
        raise UnpostableEntry(
            f"a bare {entry.kind} aggregate is not a constraint; compare it first")
    if isinstance(entry, Variable):
        return ConstraintEntity("intension", {"tree": entry})
    if isinstance(entry, Node):
        entity = _node_entity(entry)
        if entry.note is not None and entity.note is None:
            entity.note = entry.note
        if entry.tag is not None and entity.tag is None:
            entity.tag = entry.tag
        return entity
    raise UnpostableEntry(f"cannot post {entry!r}")


def _node_entity(node: Node) -> ConstraintEntity:
    if node.op == "idx":
        raise UnpostableEntry("an element access is not a constraint by itself")
    if node.op in COMPARISON_OPS and len(node.args) == 2:
        a, b = node.args
        if isinstance(b, Aggregate) and not isinstance(a, Aggregate):
            a, b = b, a
            op = _MIRROR[node.op]
        else:
            op = node.op
        if isinstance(a, Aggregate):
            result = compare_aggregate(a, op, b)
            if isinstance(result, ConstraintEntity):
                return result
            return ConstraintEntity("intension", {"tree": result})
        if isinstance(b, Node) and b.op == "idx" and not (
                isinstance(a, Node) and a.op == "idx"):
            a, b = b, a
            op = _MIRROR[node.op]
        if (isinstance(a, Node) and a.op == "idx" and op == "eq"
                and isinstance(b, (int, Variable))
                and all(isinstance(i, (int, Variable)) for i in a.args[1:])):
            return _element_entity(a, b)
    return ConstraintEntity("intension", {"tree": node})


def _element_entity(stub: Node, value) -> ConstraintEntity:
    target = stub.args[0]
    indices = [i for i in stub.args[1:]]
    if target.dims == 2 and len(indices) == 2:
        return ConstraintEntity("element", {
            "matrix": [list(r) for r in target.cells],
            "index": indices, "value": value})
    return ConstraintEntity("element", {
        "list": list(target.cells), "index": indices[0], "value": value})
