"""Core modeling objects: domains, variables, expression trees, contexts.

A model is built inside a ModelContext. Variables and arrays are declared
against a context, constraints are posted with satisfy(), and an optional
objective is attached with minimize() / maximize(). Every operation exists
in an explicit form taking the context as first argument; the capitalized
convenience constructors (Var, VarArray, ...) default to the current
context so model builders read naturally.

Expression trees (Node) are built through operator overloading on
variables and nodes. Comparisons yield nodes as well, so `x + 1 == y` is a
tree, never a host boolean; using such a tree where Python needs a real
bool (if, and, or, chained comparisons) raises immediately with a hint.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence

from .errors import (
    ArityError,
    DuplicateId,
    EmptyDomain,
    HoleAccess,
    IndexArityMismatch,
    MixedDomain,
    OutOfBounds,
    SecondObjective,
    UnknownOperator,
    UnpostableEntry,
)

INTEGER = "integer"
SYMBOLIC = "symbolic"

#: marker for an undeclared cell inside an array
HOLE = None


# --------------------------------------------------------------------------
# domains
# --------------------------------------------------------------------------

class Domain:
    """A finite, sorted, duplicate free set of integers or symbols."""

    __slots__ = ("kind", "values")

    def __init__(self, values: Iterable[int | str], kind: str | None = None):
        ints: set[int] = set()
        syms: set[str] = set()
        for v in values:
            if isinstance(v, bool):
                ints.add(int(v))
            elif isinstance(v, int):
                ints.add(v)
            elif isinstance(v, str):
                syms.add(v)
            else:
                raise MixedDomain(f"domain values must be int or str, got {v!r}")
        if ints and syms:
            raise MixedDomain("a domain cannot mix integers and symbols")
        if not ints and not syms:
            raise EmptyDomain("a domain needs at least one value")
        if ints:
            self.kind = INTEGER
            self.values: tuple = tuple(sorted(ints))
        else:
            self.kind = SYMBOLIC
            self.values = tuple(sorted(syms))
        if kind is not None and kind != self.kind:
            raise MixedDomain(f"expected a {kind} domain, built a {self.kind} one")

    @property
    def is_integer(self) -> bool:
        return self.kind == INTEGER

    def contains(self, value) -> bool:
        if isinstance(value, bool):
            value = int(value)
        return value in self.values

    def min(self) -> int:
        return self.values[0]

    def max(self) -> int:
        return self.values[-1]

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Domain)
            and self.kind == other.kind
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.values))

    def __repr__(self) -> str:
        return f"Domain({self.kind}, {list(self.values)!r})"


def as_domain(spec, *, allow_hole: bool = False) -> Domain | None:
    """Turn a user supplied domain description into a Domain.

    Accepts a Domain, a range, any iterable of values, a single int or
    string, or (when allow_hole is set) None for a hole.
    """
    if spec is None:
        if allow_hole:
            return None
        raise EmptyDomain("a variable needs a domain")
    if isinstance(spec, Domain):
        return spec
    if isinstance(spec, (int, str)):
        return Domain([spec])
    if isinstance(spec, Iterable):
        return Domain(spec)
    raise MixedDomain(f"cannot interpret {spec!r} as a domain")


# --------------------------------------------------------------------------
# expression trees
# --------------------------------------------------------------------------

# operator name -> (min arity, max arity or None for unbounded)
OPERATORS: dict[str, tuple[int, int | None]] = {
    "add": (2, None), "sub": (2, 2), "mul": (2, None), "div": (2, 2),
    "mod": (2, 2), "pow": (2, 2),
    "lt": (2, 2), "le": (2, 2), "ge": (2, 2), "gt": (2, 2),
    "ne": (2, 2), "eq": (2, None),
    "in": (2, 2), "notin": (2, 2),
    "not": (1, 1), "or": (2, None), "and": (2, None), "xor": (2, None),
    "imp": (2, 2), "iff": (2, None),
    "abs": (1, 1), "neg": (1, 1), "dist": (2, 2),
    "min": (2, None), "max": (2, None),
    "if": (3, 3),
    "set": (0, None),
}

COMPARISON_OPS = ("lt", "le", "ge", "gt", "ne", "eq")
LOGIC_OPS = ("not", "or", "and", "xor", "imp", "iff")

#: spelled out aliases accepted by expr()
OP_ALIASES = {
    "<": "lt", "<=": "le", ">": "gt", ">=": "ge",
    "=": "eq", "==": "eq", "!=": "ne", "<>": "ne",
    "+": "add", "-": "sub", "*": "mul", "//": "div", "%": "mod", "**": "pow",
    "|": "or", "&": "and", "^": "xor", "~": "not", "->": "imp", "<->": "iff",
}

_BOOL_HINT = (
    "an expression tree has no host truth value; use &, |, ~ instead of"
    " and, or, not, and avoid chained comparisons such as a < b < c"
)


class _Expr:
    """Operator overloading shared by variables and nodes."""

    __slots__ = ()

    def __add__(self, other):
        return build_node("add", [self, other])

    def __radd__(self, other):
        return build_node("add", [other, self])

    def __sub__(self, other):
        return build_node("sub", [self, other])

    def __rsub__(self, other):
        return build_node("sub", [other, self])

    def __mul__(self, other):
        return build_node("mul", [self, other])

    def __rmul__(self, other):
        return build_node("mul", [other, self])

    def __floordiv__(self, other):
        return build_node("div", [self, other])

    def __rfloordiv__(self, other):
        return build_node("div", [other, self])

    def __truediv__(self, other):
        raise UnknownOperator("use // for integer division inside expressions")

    def __mod__(self, other):
        return build_node("mod", [self, other])

    def __rmod__(self, other):
        return build_node("mod", [other, self])

    def __pow__(self, other):
        return build_node("pow", [self, other])

    def __neg__(self):
        return build_node("neg", [self])

    def __abs__(self):
        return build_node("abs", [self])

    def __lt__(self, other):
        return build_node("lt", [self, other])

    def __le__(self, other):
        return build_node("le", [self, other])

    def __gt__(self, other):
        return build_node("gt", [self, other])

    def __ge__(self, other):
        return build_node("ge", [self, other])

    def __eq__(self, other):
        return build_node("eq", [self, other])

    def __ne__(self, other):
        return build_node("ne", [self, other])

    def __and__(self, other):
        return build_node("and", [self, other])

    def __rand__(self, other):
        return build_node("and", [other, self])

    def __or__(self, other):
        return build_node("or", [self, other])

    def __ror__(self, other):
        return build_node("or", [other, self])

    def __xor__(self, other):
        return build_node("xor", [self, other])

    def __rxor__(self, other):
        return build_node("xor", [other, self])

    def __invert__(self):
        return build_node("not", [self])

    def __hash__(self) -> int:
        return object.__hash__(self)

    def __bool__(self) -> bool:
        raise TypeError(_BOOL_HINT)


class Variable(_Expr):
    """A single decision variable with a finite domain."""

    __slots__ = ("id", "dom", "ctx", "note")

    def __init__(self, id: str, dom: Domain, ctx: "ModelContext",
                 note: str | None = None):
        self.id = id
        self.dom = dom
        self.ctx = ctx
        self.note = note

    def __repr__(self) -> str:
        return self.id


class IndexTarget:
    """What a variable index digs into: array cells or constant values.

    cells is a tuple (one dimension) or a tuple of tuples (two dimensions)
    of Variable | int | str entries.
    """

    __slots__ = ("cells", "dims")

    def __init__(self, cells: tuple):
        self.cells = cells
        self.dims = 2 if cells and isinstance(cells[0], tuple) else 1

    def flat(self) -> list:
        if self.dims == 1:
            return list(self.cells)
        return [c for row in self.cells for c in row]

    def __repr__(self) -> str:
        return f"IndexTarget(dims={self.dims}, n={len(self.cells)})"


class Node(_Expr):
    """An interior node of an expression tree.

    Leaves of a tree are Variable objects, plain ints, or symbol strings.
    Aggregates and constraint entities may also sit as leaves; the
    compiler rewrites those away before rendering.
    """

    __slots__ = ("op", "args", "note", "tag")

    def __init__(self, op: str, args: tuple):
        self.op = op
        self.args = args
        self.note = None
        self.tag = None

    def noted(self, note: str) -> "Node":
        """Attach a note carried onto the constraint built from this tree."""
        self.note = note
        return self

    def tagged(self, tag: str) -> "Node":
        """Attach a classification tag, like noted()."""
        self.tag = tag
        return self

    def __getitem__(self, key):
        # x[i] on a two dimensional array gives an index stub over the
        # whole array; a second subscript picks the column
        if self.op == "idx" and len(self.args) == 2:
            target = self.args[0]
            if isinstance(target, IndexTarget) and target.dims == 2:
                if isinstance(key, (Variable, Node)):
                    return Node("idx", (target, self.args[1], key))
                if isinstance(key, int):
                    column = IndexTarget(tuple(row[key] for row in target.cells))
                    return Node("idx", (column, self.args[1]))
        raise IndexArityMismatch(f"cannot subscript expression {self!r}")

    def __repr__(self) -> str:
        inner = ",".join(repr(a) for a in self.args)
        return f"{self.op}({inner})"


def _wrap_leaf(value):
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, (int, str, Variable, Node, IndexTarget)):
        return value
    if isinstance(value, (set, frozenset, range, tuple, list)):
        return _set_literal(value)
    # aggregates and entities are legal leaves; detected by duck typing to
    # avoid importing the constraints module from here
    if hasattr(value, "_as_predicate_leaf"):
        return value
    raise UnknownOperator(f"cannot use {value!r} inside an expression")


def _leaf_sort_key(leaf):
    if isinstance(leaf, int):
        return (0, leaf, "")
    if isinstance(leaf, str):
        return (1, 0, leaf)
    return (2, 0, repr(leaf))


def _set_literal(values) -> Node:
    items = [_wrap_leaf(v) for v in values]
    items.sort(key=_leaf_sort_key)
    deduped = []
    for it in items:
        if not deduped or _leaf_sort_key(deduped[-1]) != _leaf_sort_key(it):
            deduped.append(it)
    return Node("set", tuple(deduped))


def build_node(op: str, operands: Sequence) -> Node:
    """Build one expression node, checking operator name and arity."""
    if op not in OPERATORS:
        raise UnknownOperator(f"unknown operator {op!r}")
    lo, hi = OPERATORS[op]
    args = [_wrap_leaf(a) for a in operands]
    if len(args) < lo or (hi is not None and len(args) > hi):
        want = str(lo) if hi == lo else f"{lo}+" if hi is None else f"{lo}..{hi}"
        raise ArityError(f"operator {op!r} takes {want} operands, got {len(args)}")
    if op == "abs" and isinstance(args[0], Node) and args[0].op == "sub":
        return Node("dist", args[0].args)
    if op in ("add", "mul", "and", "or"):
        # associative chains print as one n-ary operator
        flat = []
        for a in args:
            if isinstance(a, Node) and a.op == op:
                flat.extend(a.args)
            else:
                flat.append(a)
        args = flat
    if op in ("in", "notin") and not (isinstance(args[1], Node) and args[1].op == "set"):
        raise ArityError(f"the right side of {op!r} must be a value set")
    return Node(op, tuple(args))


def expr(op: str, *operands) -> Node:
    """build_node with operator spellings like "<", "!=", "==" accepted."""
    return build_node(OP_ALIASES.get(op, op), operands)


def ift(condition, then_value, else_value) -> Node:
    """The three way arithmetic choice if(c, a, b)."""
    return build_node("if", [condition, then_value, else_value])


def conjunction(*operands) -> Node:
    return build_node("and", operands)


def disjunction(*operands) -> Node:
    return build_node("or", operands)


def imply(antecedent, consequent) -> Node:
    return build_node("imp", [antecedent, consequent])


def iff(*operands) -> Node:
    return build_node("iff", operands)


def belong(term, values, negated: bool = False):
    """Set membership usable inside expressions: term in {v1, v2, ...}.

    An aggregate term becomes the conditioned constraint directly, as in
    belong(Sum(x), range(10, 20)). Negated membership in an empty set
    constrains nothing and gives None.
    """
    from .constraints import Aggregate, compare_aggregate
    if isinstance(term, Aggregate):
        return compare_aggregate(term, "notin" if negated else "in", values)
    if not isinstance(values, range):
        values = list(values)
    if negated and not values:
        return None
    return build_node("notin" if negated else "in", [term, _set_literal(values)])


# --------------------------------------------------------------------------
# arrays
# --------------------------------------------------------------------------

class VarList(list):
    """A list of cells that still understands variable subscripts.

    Rows, columns and slices of arrays are VarList objects, so an element
    access like column[index_variable] keeps working on them.
    """

    def __getitem__(self, key):
        if isinstance(key, (Variable, Node)):
            return index_access(self, key)
        if isinstance(key, slice):
            return VarList(super().__getitem__(key))
        if isinstance(key, tuple):
            return _subscript(self, key)
        return super().__getitem__(key)

    def __mul__(self, other):
        if isinstance(other, Sequence) and not isinstance(other, (str, bytes)):
            from .constraints import Sum
            return Sum(self, coeffs=list(other))
        return NotImplemented

    __rmul__ = __mul__

    def __hash__(self):
        return object.__hash__(self)


class VarArray:
    """A one or more dimensional array of variables, possibly with holes.

    Constructing one declares it in the context: VarArray(size=[3, 4],
    dom=range(12), id="x"). The domain may be a function of the indices,
    returning None for cells that should stay holes.
    """

    __slots__ = ("id", "dims", "cells", "note", "ctx")

    def __init__(self, *, size, dom, id: str, note: str | None = None,
                 ctx: "ModelContext | None" = None):
        context = _ctx_or_current(ctx)
        dims = tuple(size) if isinstance(size, (tuple, list)) else (size,)
        if not dims or any(not isinstance(d, int) or d <= 0 for d in dims):
            raise EmptyDomain(f"bad array size {size!r}")
        context.register_id(id)
        if callable(dom) and not isinstance(dom, (range, Domain)):
            domof = lambda *idx: as_domain(dom(*idx), allow_hole=True)
        else:
            fixed = as_domain(dom)
            domof = lambda *idx: fixed
        self.id = id
        self.dims = dims
        self.cells = _build_cells(dims, domof, id, context, ())
        self.note = note
        self.ctx = context
        if not self.flat():
            raise EmptyDomain(f"array {id!r} has no declared cell at all")
        context.declarations.append(self)

    def flat(self) -> list[Variable]:
        """All declared cells in row major order, holes skipped."""
        out: list[Variable] = []

        def walk(part):
            for cell in part:
                if isinstance(cell, list):
                    walk(cell)
                elif cell is not None:
                    out.append(cell)

        walk(self.cells)
        return out

    def flat_with_holes(self) -> list[Variable | None]:
        out: list[Variable | None] = []

        def walk(part):
            for cell in part:
                if isinstance(cell, list):
                    walk(cell)
                else:
                    out.append(cell)

        walk(self.cells)
        return out

    def __len__(self) -> int:
        return self.dims[0]

    def __iter__(self):
        return iter(self.cells)

    def __getitem__(self, key):
        if isinstance(key, tuple):
            return _subscript(self.cells, key, array=self)
        return _subscript(self.cells, (key,), array=self)

    def __repr__(self) -> str:
        shape = "".join(f"[{d}]" for d in self.dims)
        return f"{self.id}{shape}"


def _cells_to_target(part) -> IndexTarget:
    if part and isinstance(part[0], list):
        rows = []
        for row in part:
            for cell in row:
                if cell is None:
                    raise HoleAccess("cannot index into an array slice with holes")
            rows.append(tuple(row))
        return IndexTarget(tuple(rows))
    for cell in part:
        if cell is None:
            raise HoleAccess("cannot index into an array slice with holes")
    return IndexTarget(tuple(part))


def _subscript(part, key: tuple, array: VarArray | None = None):
    """Resolve a chain of subscripts against nested cell lists."""
    for pos, k in enumerate(key):
        rest = key[pos + 1:]
        if isinstance(k, (Variable, Node)):
            return index_access(part, k, *rest)
        if isinstance(k, slice):
            sliced = VarList(part[k])
            if rest:
                picked = [_subscript(row, rest) for row in sliced]
                return VarList(picked)
            return sliced
        if not isinstance(k, int):
            raise IndexArityMismatch(f"bad index {k!r}")
        if not isinstance(part, (list, tuple)):
            raise IndexArityMismatch("too many indices for this array")
        n = len(part)
        if k < -n or k >= n:
            name = array.id if array is not None else "list"
            raise OutOfBounds(f"index {k} out of bounds for {name} of length {n}")
        part = part[k]
        if part is None:
            raise HoleAccess("this cell of the array is a hole")
    if isinstance(part, list) and not isinstance(part, VarList):
        return VarList(part)
    return part


def index_access(target, *indices):
    """Element style access: constant indices look the cell up, a variable
    or expression index builds an element stub resolved at compile time.
    """
    if isinstance(target, VarArray):
        target = target.cells
    consts = [i for i in indices if isinstance(i, int)]
    exprs = [i for i in indices if isinstance(i, (Variable, Node))]
    if len(consts) + len(exprs) != len(indices):
        raise IndexArityMismatch("indices must be ints, variables or expressions")
    if not exprs:
        return _subscript(target, tuple(indices))
    if len(indices) == 1:
        return Node("idx", (_cells_to_target(list(target)), indices[0]))
    if len(indices) == 2:
        first, second = indices
        if isinstance(first, int):
            return Node("idx", (_cells_to_target(list(target[first])), second))
        if isinstance(second, int):
            column = [row[second] for row in target]
            return Node("idx", (_cells_to_target(column), first))
        rows = tuple(tuple(row) for row in target)
        for row in rows:
            for cell in row:
                if cell is None:
                    raise HoleAccess("cannot index into an array with holes")
        return Node("idx", (IndexTarget(rows), first, second))
    raise IndexArityMismatch("at most two variable indices are supported")


def slice_access(target, *slices):
    """Explicit form of x[a:b, c:d] style slicing."""
    if isinstance(target, VarArray):
        return target[tuple(slices)] if len(slices) > 1 else target[slices[0]]
    return _subscript(target, tuple(slices))


# --------------------------------------------------------------------------
# context
# --------------------------------------------------------------------------

class Objective:
    """The single optimization target of a context."""

    __slots__ = ("sense", "term", "note")

    def __init__(self, sense: str, term, note: str | None = None):
        self.sense = sense
        self.term = term
        self.note = note


class Post:
    """One satisfy() call: its units plus the note / tag of the call.

    Each unit is ("one", entity) for a scalar entry or ("many", [entities])
    for an entry that was a list or generator. The compiler turns units
    into plain constraints, groups and blocks.
    """

    __slots__ = ("units", "note", "tag")

    def __init__(self, units, note, tag):
        self.units = units
        self.note = note
        self.tag = tag

    def entities(self):
        for _shape, content in self.units:
            if _shape == "one":
                yield content
            else:
                yield from content


class ModelContext:
    """Everything one model instance accumulates while being built."""

    def __init__(self, name: str = "Model", data=None, variant: str | None = None):
        self.name = name
        self.data = data
        self.variant_name = variant or ""
        self.declarations: list[Variable | VarArray] = []
        self.posts: list[Post] = []
        self.objective: Objective | None = None
        self._ids: set[str] = set()

    @property
    def is_cop(self) -> bool:
        return self.objective is not None

    def framework(self) -> str:
        return "COP" if self.is_cop else "CSP"

    def register_id(self, id: str) -> None:
        if id in self._ids:
            raise DuplicateId(f"identifier {id!r} already declared")
        self._ids.add(id)

    def all_variables(self) -> list[Variable]:
        out: list[Variable] = []
        for decl in self.declarations:
            if isinstance(decl, Variable):
                out.append(decl)
            else:
                out.extend(decl.flat())
        return out


_current: ModelContext | None = None


def new_context(name: str = "Model", data=None, variant: str | None = None) -> ModelContext:
    """Create a fresh context and make it the current one."""
    global _current
    _current = ModelContext(name, data, variant)
    return _current


def current_context() -> ModelContext:
    global _current
    if _current is None:
        _current = ModelContext()
    return _current


def set_current_context(ctx: ModelContext | None) -> None:
    global _current
    _current = ctx


def _ctx_or_current(ctx: ModelContext | None) -> ModelContext:
    return ctx if ctx is not None else current_context()


# --------------------------------------------------------------------------
# declaring variables
# --------------------------------------------------------------------------

def var(ctx: ModelContext, dom, id: str, note: str | None = None) -> Variable:
    """Declare one variable in the context."""
    domain = as_domain(dom)
    ctx.register_id(id)
    v = Variable(id, domain, ctx, note)
    ctx.declarations.append(v)
    return v


def _build_cells(dims: tuple[int, ...], domof: Callable, id: str,
                 ctx: ModelContext, prefix: tuple[int, ...]) -> VarList:
    cells = VarList()
    for i in range(dims[0]):
        idx = prefix + (i,)
        if len(dims) > 1:
            cells.append(_build_cells(dims[1:], domof, id, ctx, idx))
        else:
            dom = domof(*idx)
            if dom is None:
                cells.append(None)
            else:
                suffix = "".join(f"[{k}]" for k in idx)
                cells.append(Variable(f"{id}{suffix}", dom, ctx))
    return cells


def var_array(ctx: ModelContext, size, dom, id: str,
              note: str | None = None) -> VarArray:
    """Declare an array of variables; dom may be a per index function."""
    return VarArray(size=size, dom=dom, id=id, note=note, ctx=ctx)


def Var(*values, dom=None, id: str | None = None, note: str | None = None,
        ctx: ModelContext | None = None) -> Variable:
    """Convenience declaration: Var(range(15)), Var(0, 1), Var("a", "b")."""
    context = _ctx_or_current(ctx)
    if dom is None:
        if len(values) == 1:
            dom = values[0]
        elif len(values) > 1:
            dom = values
        else:
            raise EmptyDomain("Var() needs domain values")
    elif values:
        raise EmptyDomain("give either positional values or dom=, not both")
    if id is None:
        id = f"v{sum(1 for d in context.declarations if isinstance(d, Variable))}"
    return var(context, dom, id, note)


# --------------------------------------------------------------------------
# posting
# --------------------------------------------------------------------------

def _flatten_entries(entry, out: list) -> None:
    if entry is None:
        return
    if isinstance(entry, (Variable, Node)) or hasattr(entry, "_as_entity"):
        out.append(entry)
        return
    if isinstance(entry, (VarArray, str, bytes, bool)):
        raise UnpostableEntry(f"{entry!r} is not a constraint")
    if isinstance(entry, (list, tuple, set, frozenset)) or hasattr(entry, "__iter__"):
        for sub in entry:
            _flatten_entries(sub, out)
        return
    raise UnpostableEntry(f"cannot post {entry!r}")


def satisfy(*entries, ctx: ModelContext | None = None, note: str | None = None,
            tag: str | None = None) -> Post:
    """Post constraints. Each entry becomes one unit: scalar entries stay
    single constraints, list or generator entries become runs the compiler
    may turn into groups. None entries are skipped. The note and tag apply
    to the whole call.
    """
    if entries and isinstance(entries[0], ModelContext):
        ctx = entries[0]
        entries = entries[1:]
    context = _ctx_or_current(ctx)
    from .constraints import entity_from_entry

    units = []
    for entry in entries:
        if entry is None:
            continue
        if isinstance(entry, (Variable, Node)) or hasattr(entry, "_as_entity"):
            ent = entity_from_entry(entry)
            if ent is not None:
                units.append(("one", ent))
            continue
        flat: list = []
        _flatten_entries(entry, flat)
        ents = []
        for item in flat:
            ent = entity_from_entry(item)
            if ent is not None:
                ents.append(ent)
        units.append(("many", ents))
    post = Post(units, note, tag)
    context.posts.append(post)
    return post


def _set_objective(ctx: ModelContext, sense: str, term, note: str | None) -> Objective:
    if ctx.objective is not None:
        raise SecondObjective("a model can carry only one objective")
    if isinstance(term, (list, tuple, VarList, VarArray)):
        from .constraints import Sum
        term = Sum(term)
    if isinstance(term, bool) or not (
        isinstance(term, (Variable, Node, int))
        or hasattr(term, "_as_predicate_leaf")
        or hasattr(term, "kind")
    ):
        raise UnpostableEntry(f"cannot optimize {term!r}")
    obj = Objective(sense, term, note)
    ctx.objective = obj
    return obj


def minimize(term=None, *, ctx: ModelContext | None = None,
             note: str | None = None) -> Objective:
    if isinstance(term, ModelContext):
        raise UnpostableEntry("pass the context as ctx=, the term first")
    return _set_objective(_ctx_or_current(ctx), "minimize", term, note)


def maximize(term=None, *, ctx: ModelContext | None = None,
             note: str | None = None) -> Objective:
    if isinstance(term, ModelContext):
        raise UnpostableEntry("pass the context as ctx=, the term first")
    return _set_objective(_ctx_or_current(ctx), "maximize", term, note)


def variant(name: str | None = None, *, ctx: ModelContext | None = None):
    """variant() gives the active variant name; variant("x") tests it."""
    context = _ctx_or_current(ctx)
    if name is None:
        return context.variant_name
    return context.variant_name == name
