"""Compilation of models to XCSP3-core XML.

The pipeline has three stages. Reformulation first rewrites every
expression tree that embeds an aggregate, a whole constraint or a
variable-indexed array access, introducing auxiliary variables (one flat
"aux" array) plus side constraints so that the output stays within the
core constraint forms. Recognition then optionally folds runs of
identical constraints over sliding scopes into slide meta-constraints.
Rendering finally prints the instance deterministically: groups with
%-placeholder templates are detected per posted list, variable references
are compacted ("x[]", "y[1][2..3]"), and notes / tags become note= and
class= attributes.

Reformulated constraints are emitted in four global buckets: index-link
extensions, aggregate side constraints, the rewritten original posts, and
element value links. Auxiliary cells are numbered in creation order.
"""

from __future__ import annotations

import re

from .constraints import (
    ANY,
    Aggregate,
    Condition,
    ConstraintEntity,
    scope_of,
)
from .errors import (
    EmptyDomain,
    NonGroundable,
    NotSlidable,
)
from .model import (
    Domain,
    IndexTarget,
    ModelContext,
    Node,
    Objective,
    Post,
    VarArray,
    Variable,
)

META_KINDS = ("and", "or", "not", "xor", "ifThen", "ifThenElse", "iff")

AGGREGATE_KINDS = ("sum", "count", "nValues", "minimum", "maximum")

AUX_NOTE = "auxiliary variables automatically introduced"

INT64_MAX = 2 ** 63 - 1


# --------------------------------------------------------------------------
# intermediate representation
# --------------------------------------------------------------------------

class InstanceIR:
    """A compiled instance: declarations (originals plus any aux array),
    posts whose trees are free of embedded aggregates, and the objective."""

    __slots__ = ("name", "framework", "declarations", "posts", "objective")

    def __init__(self, name, framework, declarations, posts, objective):
        self.name = name
        self.framework = framework
        self.declarations = declarations
        self.posts = posts
        self.objective = objective

    def all_variables(self) -> list[Variable]:
        out = []
        for decl in self.declarations:
            if isinstance(decl, Variable):
                out.append(decl)
            else:
                out.extend(decl.flat())
        return out

    def all_entities(self) -> list[ConstraintEntity]:
        out = []
        for post in self.posts:
            out.extend(post.entities())
        return out

    def __repr__(self) -> str:
        return (f"InstanceIR({self.name!r}, {self.framework},"
                f" {len(self.all_entities())} constraints)")


def _plain_post(entity: ConstraintEntity) -> Post:
    return Post([("one", entity)], None, None)


# --------------------------------------------------------------------------
# structural keys and bounds
# --------------------------------------------------------------------------

def struct_key(x):
    """A hashable key identifying a term up to structural equality."""
    if isinstance(x, Variable):
        return ("var", x.id)
    if isinstance(x, bool):
        return ("int", int(x))
    if isinstance(x, int):
        return ("int", x)
    if isinstance(x, str):
        return ("sym", x)
    if x is ANY:
        return "*"
    if isinstance(x, IndexTarget):
        return ("target", tuple(struct_key(c) for c in x.flat()))
    if isinstance(x, Node):
        return (x.op, tuple(struct_key(a) for a in x.args))
    if isinstance(x, Aggregate):
        return ("agg", x.kind, tuple(struct_key(t) for t in x.terms),
                tuple(x.coeffs) if x.coeffs else None,
                tuple(sorted((k, struct_key_value(v)) for k, v in x.params.items())))
    if isinstance(x, ConstraintEntity):
        return ("entity", x.kind,
                tuple(sorted((k, struct_key_value(v)) for k, v in x.params.items())))
    if isinstance(x, Condition):
        return ("cond", x.op, struct_key_value(x.rhs))
    return ("repr", repr(x))


def struct_key_value(v):
    if isinstance(v, (list, tuple)):
        return tuple(struct_key_value(i) for i in v)
    if isinstance(v, (set, frozenset)):
        return tuple(sorted(struct_key_value(i) for i in v))
    if isinstance(v, range):
        return ("range", v.start, v.stop, v.step)
    if isinstance(v, dict):
        return tuple(sorted((k, struct_key_value(i)) for k, i in v.items()))
    if v is None:
        return None
    return struct_key(v)


def _int_domain(v: Variable) -> Domain:
    if v.dom.kind != "integer":
        raise NonGroundable(
            f"{v.id} is symbolic; it cannot take part in arithmetic reformulation")
    return v.dom


def node_bounds(x) -> tuple[int, int]:
    """Sound integer bounds of an expression, by interval reasoning."""
    if isinstance(x, bool):
        return (int(x), int(x))
    if isinstance(x, int):
        return (x, x)
    if isinstance(x, Variable):
        dom = _int_domain(x)
        return (dom.min(), dom.max())
    if isinstance(x, Aggregate):
        return aggregate_bounds(x)
    if isinstance(x, ConstraintEntity):
        return (0, 1)
    if not isinstance(x, Node):
        raise NonGroundable(f"no bounds for {x!r}")

    op = x.op
    if op in ("lt", "le", "gt", "ge", "eq", "ne", "in", "notin",
              "not", "and", "or", "xor", "imp", "iff"):
        return (0, 1)
    if op == "idx":
        cells = [c for c in x.args[0].flat()]
        lows, highs = zip(*(node_bounds(c) for c in cells))
        return (min(lows), max(highs))

    bounds = [node_bounds(a) for a in x.args]
    if op == "add":
        return (sum(b[0] for b in bounds), sum(b[1] for b in bounds))
    if op == "sub":
        (alo, ahi), (blo, bhi) = bounds
        return (alo - bhi, ahi - blo)
    if op == "neg":
        (alo, ahi), = bounds
        return (-ahi, -alo)
    if op == "abs":
        (alo, ahi), = bounds
        if alo >= 0:
            return (alo, ahi)
        if ahi <= 0:
            return (-ahi, -alo)
        return (0, max(-alo, ahi))
    if op == "dist":
        return node_bounds(Node("abs", (Node("sub", tuple(x.args)),)))
    if op == "mul":
        lo, hi = bounds[0]
        for blo, bhi in bounds[1:]:
            corners = (lo * blo, lo * bhi, hi * blo, hi * bhi)
            lo, hi = min(corners), max(corners)
        return (lo, hi)
    if op == "min":
        return (min(b[0] for b in bounds), min(b[1] for b in bounds))
    if op == "max":
        return (max(b[0] for b in bounds), max(b[1] for b in bounds))
    if op == "if":
        (tlo, thi), (elo, ehi) = bounds[1], bounds[2]
        return (min(tlo, elo), max(thi, ehi))
    if op == "div":
        (alo, ahi), _ = bounds
        m = max(abs(alo), abs(ahi))
        return (-m, m)
    if op == "mod":
        _, (blo, bhi) = bounds
        m = max(abs(blo), abs(bhi), 1)
        return (-(m - 1), m - 1)
    if op == "pow":
        (alo, ahi), (blo, bhi) = bounds
        exps = {max(blo, 0), max(bhi, 0)}
        bases = {alo, ahi} | ({0} if alo <= 0 <= ahi else set()) \
            | ({1} if alo <= 1 <= ahi else set()) \
            | ({-1} if alo <= -1 <= ahi else set())
        candidates = []
        for a in bases:
            for b in exps:
                if abs(a) > 1 and b > 63:
                    raise NonGroundable("power bounds leave the 64 bit range")
                v = a ** b
                if abs(v) > INT64_MAX:
                    raise NonGroundable("power bounds leave the 64 bit range")
                candidates.append(v)
        return (min(candidates), max(candidates))
    raise NonGroundable(f"no bounds for operator {op!r}")


def aggregate_bounds(agg: Aggregate) -> tuple[int, int]:
    if agg.kind == "sum":
        coeffs = agg.coeffs or [1] * len(agg.terms)
        lo = hi = 0
        for c, t in zip(coeffs, agg.terms):
            tlo, thi = node_bounds(t)
            clo, chi = node_bounds(c)
            corners = (clo * tlo, clo * thi, chi * tlo, chi * thi)
            lo += min(corners)
            hi += max(corners)
        return (lo, hi)
    if agg.kind == "count":
        return (0, len(agg.terms))
    if agg.kind == "nValues":
        return (1, len(agg.terms))
    bounds = [node_bounds(t) for t in agg.terms]
    if agg.kind == "minimum":
        return (min(b[0] for b in bounds), min(b[1] for b in bounds))
    if agg.kind == "maximum":
        return (max(b[0] for b in bounds), max(b[1] for b in bounds))
    raise NonGroundable(f"a {agg.kind} aggregate cannot become a variable")


# --------------------------------------------------------------------------
# reformulation
# --------------------------------------------------------------------------

class _Reformulator:
    """Rewrites expression trees so that only plain operators over
    variables remain, creating aux variables and side constraints."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.aux_cells: list[Variable] = []
        self.cache: dict = {}
        self.links: list[ConstraintEntity] = []      # bucket A
        self.sides: list[ConstraintEntity] = []      # bucket B
        self.elements: list[ConstraintEntity] = []   # bucket D

    @property
    def touched(self) -> bool:
        return bool(self.aux_cells)

    def new_aux(self, values) -> Variable:
        values = sorted(set(values))
        if not values:
            raise EmptyDomain("an auxiliary variable ended up with no value")
        cell = Variable(f"aux[{len(self.aux_cells)}]", Domain(values), self.ctx)
        self.aux_cells.append(cell)
        return cell

    def aux_for_aggregate(self, agg: Aggregate) -> Variable:
        terms = [self.rewrite(t) for t in agg.terms]
        clean = Aggregate(agg.kind, terms, agg.coeffs, dict(agg.params))
        key = struct_key(clean)
        if key in self.cache:
            return self.cache[key]
        lo, hi = aggregate_bounds(clean)
        aux = self.new_aux(range(lo, hi + 1))
        params = {"list": terms}
        if clean.coeffs:
            params["coeffs"] = list(clean.coeffs)
        for extra in ("values", "excepting"):
            if clean.params.get(extra) is not None:
                params[extra] = clean.params[extra]
        params["condition"] = Condition("eq", aux)
        self.sides.append(ConstraintEntity(clean.kind, params))
        self.cache[key] = aux
        return aux

    def var_for_term(self, term) -> Variable | int:
        """A plain variable (or constant) carrying the value of a term, for
        objective lists that only accept variables."""
        term = self.rewrite(term)
        if isinstance(term, (Variable, int)):
            return term
        key = ("term", struct_key(term))
        if key in self.cache:
            return self.cache[key]
        lo, hi = node_bounds(term)
        aux = self.new_aux(range(lo, hi + 1))
        self.sides.append(ConstraintEntity(
            "intension", {"tree": Node("eq", (term, aux))}))
        self.cache[key] = aux
        return aux

    def clamp_index(self, index, extent: int) -> Variable | int:
        """An index usable inside an element constraint: the variable
        itself when its whole domain is valid, a linked aux otherwise."""
        if isinstance(index, int):
            return index
        if not isinstance(index, Variable):
            raise NonGroundable(
                "only a bare variable or a constant can index an array here")
        dom = _int_domain(index)
        valid = [v for v in dom.values if 0 <= v < extent]
        if not valid:
            raise EmptyDomain(f"{index.id} can never index into the array")
        if len(valid) == len(dom.values):
            return index
        key = ("clamp", index.id, extent)
        if key in self.cache:
            return self.cache[key]
        aux = self.new_aux(valid)
        rows = [(v, v) if 0 <= v < extent else (v, ANY) for v in dom.values]
        self.links.append(ConstraintEntity(
            "extension", {"list": [index, aux], "rows": rows, "positive": True}))
        self.cache[key] = aux
        return aux

    def rewrite_stub(self, node: Node):
        target: IndexTarget = node.args[0]
        # nested accesses like x[x[i][j]] resolve inner stubs first
        indices = [self.rewrite(i) for i in node.args[1:]]
        key = ("stub", struct_key(Node("idx", (target, *indices))))
        if key in self.cache:
            return self.cache[key]
        if target.dims == 1:
            cells = list(target.cells)
            index = self.clamp_index(indices[0], len(cells))
            if isinstance(index, int):
                return cells[index]
            reachable = cells if index is indices[0] else \
                [cells[v] for v in index.dom.values]
            value = self.new_aux(self._cell_values(reachable))
            self.elements.append(ConstraintEntity(
                "element", {"list": cells, "index": index, "value": value}))
        else:
            rows = [list(r) for r in target.cells]
            i = self.clamp_index(indices[0], len(rows))
            j = self.clamp_index(indices[1], len(rows[0]))
            if isinstance(i, int) and isinstance(j, int):
                return rows[i][j]
            value = self.new_aux(self._cell_values(
                [c for row in rows for c in row]))
            self.elements.append(ConstraintEntity(
                "element", {"matrix": rows, "index": [i, j], "value": value}))
        self.cache[key] = value
        return value

    @staticmethod
    def _cell_values(cells) -> set[int]:
        values: set[int] = set()
        for c in cells:
            if isinstance(c, Variable):
                values.update(_int_domain(c).values)
            else:
                values.add(c)
        return values

    def leaf_for_entity(self, entity: ConstraintEntity):
        """Turn a whole constraint used as an operand into a 0/1 subtree."""
        kind = entity.kind
        p = entity.params
        if kind == "intension":
            return self.rewrite(p["tree"])
        if kind == "allDifferent" and "matrix" not in p:
            if p.get("excepting"):
                raise NonGroundable(
                    "allDifferent with except values cannot sit inside an expression")
            aux = self.aux_for_aggregate(Aggregate("nValues", list(p["list"])))
            return Node("eq", (aux, len(p["list"])))
        if kind == "allEqual":
            aux = self.aux_for_aggregate(Aggregate("nValues", list(p["list"])))
            return Node("eq", (aux, 1))
        if kind in AGGREGATE_KINDS:
            extra = {}
            if p.get("values") is not None:
                extra["values"] = p["values"]
            if p.get("excepting") is not None:
                extra["excepting"] = p["excepting"]
            agg = Aggregate(kind, list(p["list"]), p.get("coeffs"), extra)
            aux = self.aux_for_aggregate(agg)
            condition = p["condition"]
            if condition.op in ("in", "notin"):
                rhs = condition.rhs
                values = tuple(sorted(rhs)) if not isinstance(rhs, range) \
                    else tuple(rhs)
                inside = Node("in", (aux, Node("set", values)))
                return inside if condition.op == "in" else Node("not", (inside,))
            return Node(condition.op, (aux, condition.rhs))
        if kind == "element" and "matrix" not in p:
            stub = Node("idx", (IndexTarget(tuple(p["list"])), p["index"]))
            return self.rewrite(Node("eq", (stub, p["value"])))
        if kind in META_KINDS:
            return self.meta_tree(entity)
        raise NonGroundable(
            f"a {kind} constraint cannot be embedded in an expression")

    def meta_tree(self, entity: ConstraintEntity) -> Node:
        children = [self.leaf_for_entity(e) for e in entity.params["entities"]]
        op = {"ifThen": "imp", "ifThenElse": "if"}.get(entity.kind, entity.kind)
        return Node(op, tuple(children))

    def rewrite(self, node):
        if isinstance(node, (int, str, Variable)):
            return node
        if isinstance(node, Aggregate):
            return self.aux_for_aggregate(node)
        if isinstance(node, ConstraintEntity):
            return self.leaf_for_entity(node)
        if not isinstance(node, Node):
            raise NonGroundable(f"cannot compile {node!r}")
        if node.op == "idx":
            return self.rewrite_stub(node)
        rewritten = tuple(self.rewrite(a) for a in node.args)
        if all(new is old for new, old in zip(rewritten, node.args)):
            return node
        return Node(node.op, rewritten)

    def rewrite_entity(self, entity, core_only: bool):
        if entity.kind == "intension":
            tree = self.rewrite(entity.params["tree"])
            if tree is entity.params["tree"]:
                return entity
            return ConstraintEntity("intension", {"tree": tree},
                                    entity.note, entity.tag)
        if entity.kind in META_KINDS:
            if core_only:
                return ConstraintEntity(
                    "intension", {"tree": self.meta_tree(entity)},
                    entity.note, entity.tag)
            children = [self.rewrite_entity(e, core_only)
                        for e in entity.params["entities"]]
            if all(new is old for new, old in
                   zip(children, entity.params["entities"])):
                return entity
            return ConstraintEntity(entity.kind, {"entities": children},
                                    entity.note, entity.tag)
        return entity


def _tree_needs_rewrite(node) -> bool:
    if isinstance(node, (Aggregate, ConstraintEntity)):
        return True
    if isinstance(node, Node):
        if node.op == "idx":
            return True
        return any(_tree_needs_rewrite(a) for a in node.args)
    return False


def reformulate(ctx: ModelContext, core_only: bool = False) -> InstanceIR:
    """Lower a model to an IR whose constraints are all core forms."""
    worker = _Reformulator(ctx)
    posts = []
    for post in ctx.posts:
        units = []
        changed = False
        for kind, payload in post.units:
            if kind == "one":
                new = worker.rewrite_entity(payload, core_only)
                changed |= new is not payload
                units.append(("one", new))
            else:
                news = [worker.rewrite_entity(e, core_only) for e in payload]
                changed |= any(n is not o for n, o in zip(news, payload))
                units.append(("many", news))
        posts.append(Post(units, post.note, post.tag) if changed else post)

    objective = ctx.objective
    if objective is not None:
        term = objective.term
        if isinstance(term, Node) and _tree_needs_rewrite(term):
            objective = Objective(objective.sense, worker.rewrite(term),
                                  objective.note)
        elif isinstance(term, Aggregate) \
                and any(not isinstance(t, Variable) for t in term.terms):
            terms = [worker.var_for_term(t) for t in term.terms]
            objective = Objective(
                objective.sense,
                Aggregate(term.kind, terms, term.coeffs, dict(term.params)),
                objective.note)

    declarations = list(ctx.declarations)
    if worker.touched:
        aux = object.__new__(VarArray)
        aux.id = "aux"
        aux.dims = (len(worker.aux_cells),)
        aux.cells = list(worker.aux_cells)
        aux.note = AUX_NOTE
        aux.ctx = ctx
        declarations.append(aux)

    all_posts = ([_plain_post(e) for e in worker.links]
                 + [_plain_post(e) for e in worker.sides]
                 + posts
                 + [_plain_post(e) for e in worker.elements])
    return InstanceIR(ctx.name, ctx.framework(), declarations,
                      all_posts, objective)


# --------------------------------------------------------------------------
# variable reference compaction
# --------------------------------------------------------------------------

_REF = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)((?:\[\d+\])+)$")


def _ref_parts(var_id: str):
    m = _REF.match(var_id)
    if not m:
        return None
    base = m.group(1)
    indices = tuple(int(k) for k in re.findall(r"\[(\d+)\]", m.group(2)))
    return base, indices


class RenderContext:
    """Carries the declared arrays so references can be compacted."""

    def __init__(self, declarations):
        self.arrays: dict[str, VarArray] = {}
        for decl in declarations:
            if isinstance(decl, VarArray):
                self.arrays[decl.id] = decl


def _whole_array_token(base: str, indices: list[tuple], R: RenderContext):
    arr = R.arrays.get(base)
    if arr is None:
        return None
    flat = arr.flat_with_holes()
    if any(cell is None for cell in flat):
        return None
    expected = [_ref_parts(cell.id)[1] for cell in flat]
    if indices == expected:
        return base + "[]" * len(arr.dims)
    return None


def _cartesian_token(base: str, indices: list[tuple]):
    dims = len(indices[0])
    if dims < 2:
        return None
    ranges = []
    for d in range(dims):
        values = sorted({idx[d] for idx in indices})
        if values != list(range(values[0], values[-1] + 1)):
            return None
        ranges.append((values[0], values[-1]))
    expected = []

    def build(prefix, d):
        if d == dims:
            expected.append(tuple(prefix))
            return
        for v in range(ranges[d][0], ranges[d][1] + 1):
            build(prefix + [v], d + 1)

    build([], 0)
    if indices != expected or len(indices) < 2:
        return None
    return base + "".join(
        f"[{a}..{b}]" if a != b else f"[{a}]" for a, b in ranges)


def _run_tokens(base: str, indices: list[tuple], R: RenderContext,
                threshold: int) -> list[str]:
    whole = _whole_array_token(base, indices, R)
    if whole:
        return [whole]
    cart = _cartesian_token(base, indices)
    if cart:
        return [cart]
    out = []
    i = 0
    while i < len(indices):
        j = i + 1
        while (j < len(indices)
               and indices[j][:-1] == indices[i][:-1]
               and indices[j][-1] == indices[j - 1][-1] + 1):
            j += 1
        head = "".join(f"[{k}]" for k in indices[i][:-1])
        if j - i >= threshold:
            out.append(f"{base}{head}[{indices[i][-1]}..{indices[j-1][-1]}]")
        else:
            for k in range(i, j):
                out.append(f"{base}{head}[{indices[k][-1]}]")
        i = j
    return out


def compact_refs(tokens: list, R: RenderContext, threshold: int = 2) -> str:
    """Space-joined rendering of a term list, ascending same-array cell
    runs compacted to range references."""
    out: list[str] = []
    run_base = None
    run: list[tuple] = []

    def flush():
        nonlocal run_base, run
        if run:
            out.extend(_run_tokens(run_base, run, R, threshold))
        run_base, run = None, []

    for token in tokens:
        parts = _ref_parts(token) if isinstance(token, str) else None
        if parts is None:
            flush()
            out.append(str(token))
        else:
            base, indices = parts
            if base != run_base:
                flush()
                run_base = base
            run.append(indices)
    flush()
    return " ".join(out)


def expand_ref(token: str, R: RenderContext) -> list[str]:
    """Inverse of compaction: the individual cell ids a reference names."""
    if "[" not in token:
        return [token]
    base = token[:token.index("[")]
    arr = R.arrays.get(base)
    pieces = re.findall(r"\[([^]]*)\]", token)
    spans = []
    for d, piece in enumerate(pieces):
        if piece == "":
            spans.append(range(arr.dims[d]))
        elif ".." in piece:
            a, b = piece.split("..")
            spans.append(range(int(a), int(b) + 1))
        else:
            spans.append(range(int(piece), int(piece) + 1))
    out = [""]
    for span in spans:
        out = [prefix + f"[{v}]" for prefix in out for v in span]
    return [base + suffix for suffix in out]


# --------------------------------------------------------------------------
# text rendering of terms, domains, conditions
# --------------------------------------------------------------------------

def term_token(term, sub: dict | None = None):
    """A single term as its token: either a raw string (a variable id or
    placeholder, compactable) or the functional text of an expression."""
    if isinstance(term, bool):
        return str(int(term))
    if isinstance(term, int):
        return str(term)
    if isinstance(term, str):
        return term
    if isinstance(term, Variable):
        if sub and term.id in sub:
            return sub[term.id]
        return term.id
    if isinstance(term, Node):
        return tree_text(term, sub)
    if term is ANY:
        return "*"
    raise NonGroundable(f"cannot print {term!r}")


def tree_text(node, sub: dict | None = None) -> str:
    if isinstance(node, Node):
        if node.op == "set":
            return "set(" + ",".join(tree_text(a, sub) for a in node.args) + ")"
        if node.op == "idx":
            raise NonGroundable("an unresolved array access survived compilation")
        return node.op + "(" + ",".join(tree_text(a, sub) for a in node.args) + ")"
    return term_token(node, sub)


def domain_text(dom: Domain) -> str:
    if dom.kind == "symbolic":
        return " ".join(dom.values)
    out = []
    values = list(dom.values)
    i = 0
    while i < len(values):
        j = i + 1
        while j < len(values) and values[j] == values[j - 1] + 1:
            j += 1
        if j - i >= 3:
            out.append(f"{values[i]}..{values[j-1]}")
        else:
            out.extend(str(v) for v in values[i:j])
        i = j
    return " ".join(out)


def condition_text(condition: Condition) -> str:
    rhs = condition.rhs
    if isinstance(rhs, Variable):
        text = rhs.id
    elif isinstance(rhs, range):
        text = f"{rhs.start}..{rhs.stop - 1}"
    elif isinstance(rhs, frozenset):
        text = "{" + ",".join(str(v) for v in sorted(rhs)) + "}"
    else:
        text = str(rhs)
    return f"({condition.op},{text})"


def _xml_escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _attrs(pairs) -> str:
    return "".join(f' {k}="{_xml_escape(str(v))}"' for k, v in pairs if v is not None)


def _row_text(row) -> str:
    return "(" + ",".join(term_token(v) for v in row) + ")"


# --------------------------------------------------------------------------
# entity rendering
# --------------------------------------------------------------------------

def _list_line(terms, R, sub=None, threshold=2) -> str:
    return compact_refs([term_token(t, sub) for t in terms], R, threshold)


def render_entity(entity: ConstraintEntity, R: RenderContext, indent: int,
                  sub: dict | None = None) -> list[str]:
    """Lines of one constraint element; sub maps variable ids to
    %-placeholders when rendering a group or slide template."""
    pad = " " * indent
    kind = entity.kind
    p = entity.params
    attrs = _attrs([("note", entity.note), ("class", entity.tag)])

    def wrap(children: list[str]) -> list[str]:
        return [f"{pad}<{kind}{attrs}>", *children, f"{pad}</{kind}>"]

    def one_line(content: str, tag: str = kind) -> list[str]:
        return [f"{pad}<{tag}{attrs}> {content} </{tag}>"]

    inner = " " * (indent + 2)

    if kind == "intension":
        return one_line(tree_text(p["tree"], sub))

    if kind == "unsatisfiable":
        return [
            f"{pad}<extension{attrs}>",
            f"{inner}<list> {_list_line(p['list'], R, sub)} </list>",
            f"{inner}<supports> </supports>",
            f"{pad}</extension>",
        ]

    if kind == "extension":
        rows = p.get("rows", ())
        side = "supports" if p.get("positive", True) else "conflicts"
        if rows and len(p["list"]) == 1:
            body = " ".join(term_token(r[0]) for r in rows)
        else:
            body = "".join(_row_text(r) for r in rows)
        return wrap([
            f"{inner}<list> {_list_line(p['list'], R, sub)} </list>",
            f"{inner}<{side}> {body} </{side}>",
        ])

    if kind == "regular":
        auto = p["automaton"]
        transitions = "".join(_row_text(t) for t in auto.transitions)
        return wrap([
            f"{inner}<list> {_list_line(p['list'], R, sub)} </list>",
            f"{inner}<transitions> {transitions} </transitions>",
            f"{inner}<start> {auto.start} </start>",
            f"{inner}<final> {' '.join(sorted(auto.final))} </final>",
        ])

    if kind == "mdd":
        diagram = p["diagram"]
        transitions = "".join(_row_text(t) for t in diagram.transitions)
        return wrap([
            f"{inner}<list> {_list_line(p['list'], R, sub)} </list>",
            f"{inner}<transitions> {transitions} </transitions>",
        ])

    if kind == "allDifferent":
        if "matrix" in p:
            rows = [term_token(c) for row in p["matrix"] for c in row]
            return wrap([f"{inner}<matrix> {compact_refs(rows, R)} </matrix>"])
        if p.get("excepting"):
            exc = " ".join(str(v) for v in p["excepting"])
            return wrap([
                f"{inner}<list> {_list_line(p['list'], R, sub)} </list>",
                f"{inner}<except> {exc} </except>",
            ])
        return one_line(_list_line(p["list"], R, sub))

    if kind == "allDifferentList":
        lines = [f"{inner}<list> {_list_line(lst, R, sub)} </list>"
                 for lst in p["lists"]]
        if p.get("excepting"):
            exc = "".join(_row_text(r) for r in p["excepting"])
            lines.append(f"{inner}<except> {exc} </except>")
        return wrap(lines)

    if kind == "allEqual":
        return one_line(_list_line(p["list"], R, sub))

    if kind == "ordered":
        lines = [f"{inner}<list> {_list_line(p['list'], R, sub)} </list>"]
        if p.get("lengths") is not None:
            lines.append(
                f"{inner}<lengths> {_list_line(p['lengths'], R, sub)} </lengths>")
        lines.append(f"{inner}<operator> {p['operator']} </operator>")
        return wrap(lines)

    if kind == "lex":
        if "matrix" in p:
            cells = [term_token(c) for row in p["matrix"] for c in row]
            lines = [f"{inner}<matrix> {compact_refs(cells, R)} </matrix>"]
        else:
            lines = [f"{inner}<list> {_list_line(lst, R, sub)} </list>"
                     for lst in p["lists"]]
        lines.append(f"{inner}<operator> {p['operator']} </operator>")
        return wrap(lines)

    if kind in AGGREGATE_KINDS:
        lines = [f"{inner}<list> {_list_line(p['list'], R, sub)} </list>"]
        if p.get("coeffs"):
            lines.append(
                f"{inner}<coeffs> {' '.join(str(c) for c in p['coeffs'])} </coeffs>")
        if p.get("values") is not None:
            lines.append(
                f"{inner}<values> {_list_line(p['values'], R, sub)} </values>")
        if p.get("excepting") is not None:
            exc = " ".join(str(v) for v in p["excepting"])
            lines.append(f"{inner}<except> {exc} </except>")
        lines.append(f"{inner}<condition> {condition_text(p['condition'])} </condition>")
        return wrap(lines)

    if kind == "cardinality":
        closed = ' closed="true"' if p.get("closed") else ""
        occurs = []
        for occ in p["occurs"]:
            if isinstance(occ, range):
                occurs.append(f"{occ.start}..{occ.stop - 1}")
            else:
                occurs.append(term_token(occ, sub))
        return wrap([
            f"{inner}<list> {_list_line(p['list'], R, sub)} </list>",
            f"{inner}<values{closed}> {_list_line(p['values'], R, sub)} </values>",
            f"{inner}<occurs> {compact_refs(occurs, R)} </occurs>",
        ])

    if kind == "element":
        if "matrix" in p:
            rows = p["matrix"]
            flat = [c for row in rows for c in row]
            if all(isinstance(c, Variable) for c in flat):
                matrix = compact_refs([term_token(c) for c in flat], R)
            else:
                # a matrix of plain values keeps its row structure
                matrix = "".join(
                    "(" + ",".join(term_token(c) for c in row) + ")"
                    for row in rows)
            index = " ".join(term_token(i, sub) for i in p["index"])
            return wrap([
                f"{inner}<matrix> {matrix} </matrix>",
                f"{inner}<index> {index} </index>",
                f"{inner}<value> {term_token(p['value'], sub)} </value>",
            ])
        return wrap([
            f"{inner}<list> {_list_line(p['list'], R, sub)} </list>",
            f"{inner}<index> {term_token(p['index'], sub)} </index>",
            f"{inner}<value> {term_token(p['value'], sub)} </value>",
        ])

    if kind == "channel":
        s1 = [("startIndex", p["start1"] if p.get("start1") else None)]
        lines = [f"{inner}<list{_attrs(s1)}> {_list_line(p['list1'], R, sub)} </list>"]
        if p.get("list2") is not None:
            s2 = [("startIndex", p["start2"] if p.get("start2") else None)]
            lines.append(
                f"{inner}<list{_attrs(s2)}> {_list_line(p['list2'], R, sub)} </list>")
        if "value" in p:
            lines.append(f"{inner}<value> {term_token(p['value'], sub)} </value>")
        return wrap(lines)

    if kind == "noOverlap":
        zero = ' zeroIgnored="true"' if p.get("zero_ignored") else ""
        if p.get("multi"):
            origins = "".join(_row_text(o) for o in p["origins"])
            lengths = "".join(_row_text(l) for l in p["lengths"])
        else:
            origins = _list_line(p["origins"], R, sub)
            lengths = _list_line(p["lengths"], R, sub)
        return [
            f"{pad}<noOverlap{attrs}{zero}>",
            f"{inner}<origins> {origins} </origins>",
            f"{inner}<lengths> {lengths} </lengths>",
            f"{pad}</noOverlap>",
        ]

    if kind == "cumulative":
        lines = [
            f"{inner}<origins> {_list_line(p['origins'], R, sub)} </origins>",
            f"{inner}<lengths> {_list_line(p['lengths'], R, sub)} </lengths>",
        ]
        if p.get("ends") is not None:
            lines.append(f"{inner}<ends> {_list_line(p['ends'], R, sub)} </ends>")
        lines.append(f"{inner}<heights> {_list_line(p['heights'], R, sub)} </heights>")
        lines.append(f"{inner}<condition> {condition_text(p['condition'])} </condition>")
        return wrap(lines)

    if kind == "circuit":
        start = [("startIndex", p["start"] if p.get("start") else None)]
        lines = [f"{inner}<list{_attrs(start)}> {_list_line(p['list'], R, sub)} </list>"]
        if p.get("size") is not None:
            lines.append(f"{inner}<size> {term_token(p['size'], sub)} </size>")
        return wrap(lines)

    if kind == "slide":
        return render_slide(entity, R, indent)

    if kind in META_KINDS:
        lines = [f"{pad}<{kind}{attrs}>"]
        for child in p["entities"]:
            lines.extend(render_entity(child, R, indent + 2))
        lines.append(f"{pad}</{kind}>")
        return lines

    raise NonGroundable(f"no renderer for constraint kind {kind!r}")


def render_slide(entity: ConstraintEntity, R: RenderContext,
                 indent: int) -> list[str]:
    pad = " " * indent
    p = entity.params
    attrs = _attrs([("note", entity.note), ("class", entity.tag),
                    ("circular", "true" if p.get("circular") else None)])
    offset = p.get("offset", 1)
    loff = _attrs([("offset", offset if offset != 1 else None)])
    window = p["entities"][0]
    scope = _slide_scope(window)
    sub = {v.id: f"%{k}" for k, v in enumerate(scope)}
    lines = [f"{pad}<slide{attrs}>"]
    lines.append(f"{pad}  <list{loff}> "
                 f"{compact_refs([v.id for v in p['list']], R)} </list>")
    lines.extend(render_entity(window, R, indent + 2, sub=sub))
    lines.append(f"{pad}</slide>")
    return lines


def _slide_scope(entity: ConstraintEntity) -> list[Variable]:
    """Scope variables of one window, in positional order."""
    if "list" in entity.params and entity.kind != "intension":
        return [v for v in entity.params["list"] if isinstance(v, Variable)]
    return scope_of(entity)


# --------------------------------------------------------------------------
# group detection
# --------------------------------------------------------------------------

class _Group:
    __slots__ = ("template_lines", "rows", "note", "tag")

    def __init__(self, template_lines, rows):
        self.template_lines = template_lines
        self.rows = rows
        self.note = None
        self.tag = None


def _abstract_intension(tree, aggressive: bool):
    """Template text and argument leaves for one intension tree.

    Variables always become placeholders (shared per variable), constants
    become placeholders unless they sit directly under the root comparison;
    aggressive mode abstracts those root-level constants too."""
    mapping: dict[str, str] = {}
    leaves: list = []
    root_cmp = isinstance(tree, Node) and tree.op in (
        "lt", "le", "gt", "ge", "eq", "ne", "in", "notin")

    def place(leaf) -> str:
        token = f"%{len(leaves)}"
        leaves.append(leaf)
        return token

    def walk(node, at_root_child: bool) -> str:
        if isinstance(node, Variable):
            if node.id not in mapping:
                mapping[node.id] = place(node)
            return mapping[node.id]
        if isinstance(node, bool):
            node = int(node)
        if isinstance(node, (int, str)):
            if at_root_child and not aggressive:
                return str(node)
            return place(node)
        if isinstance(node, Node):
            if node.op == "set":
                return "set(" + ",".join(str(a) for a in node.args) + ")"
            return node.op + "(" + ",".join(
                walk(a, False) for a in node.args) + ")"
        raise NonGroundable(f"cannot abstract {node!r}")

    if isinstance(tree, Node) and tree.args:
        body = tree.op + "(" + ",".join(
            walk(a, root_cmp) for a in tree.args) + ")"
    else:
        body = walk(tree, False)
    return body, leaves


def _try_group_intension(run: list[ConstraintEntity], R: RenderContext,
                         indent: int):
    for aggressive in (False, True):
        templates = []
        rows = []
        ok = True
        for e in run:
            body, leaves = _abstract_intension(e.params["tree"], aggressive)
            if not leaves:
                ok = False
                break
            templates.append(body)
            rows.append(" ".join(term_token(leaf) for leaf in leaves))
        if ok and len(set(templates)) == 1:
            pad = " " * indent
            return _Group([f"{pad}<intension> {templates[0]} </intension>"], rows)
    return None


_LIST_GROUP_KINDS = ("allDifferent", "allEqual", "ordered", "extension",
                     "sum", "count", "nValues", "minimum", "maximum")


def _try_group_list(run: list[ConstraintEntity], R: RenderContext, indent: int):
    kind = run[0].kind
    lists = []
    for e in run:
        if kind == "allDifferent" and ("matrix" in e.params
                                       or e.params.get("excepting")):
            return None
        terms = e.params["list"]
        if not all(isinstance(t, Variable) for t in terms):
            return None
        lists.append(terms)

    lengths = {len(lst) for lst in lists}
    per_var = len(lengths) == 1 and next(iter(lengths)) <= 4
    if per_var:
        rows = [" ".join(v.id for v in lst) for lst in lists]
    else:
        rows = [compact_refs([v.id for v in lst], R) for lst in lists]

    skeletons = []
    for e in run:
        if per_var:
            local = {v.id: f"%{k}" for k, v in enumerate(e.params["list"])}
        else:
            local = {v.id: "%..." for v in e.params["list"]}
        lines = render_entity(_bare(e), R, indent, sub=local)
        if not per_var:
            lines = [_squash_rest_placeholders(line) for line in lines]
        skeletons.append(lines)
    if any("\n".join(s) != "\n".join(skeletons[0]) for s in skeletons[1:]):
        return None
    return _Group(skeletons[0], rows)


def _squash_rest_placeholders(line: str) -> str:
    return re.sub(r"%\.\.\.( %\.\.\.)+", "%...", line)


def _bare(entity: ConstraintEntity) -> ConstraintEntity:
    if entity.note is None and entity.tag is None:
        return entity
    return ConstraintEntity(entity.kind, entity.params)


def _try_group_element(run: list[ConstraintEntity], R: RenderContext,
                       indent: int):
    first = run[0].params
    if "matrix" in first:
        return None
    base = [term_token(t) for t in first["list"]]
    same_value = all(struct_key_value(e.params["value"])
                     == struct_key_value(first["value"]) for e in run)
    for e in run:
        if "matrix" in e.params:
            return None
        if [term_token(t) for t in e.params["list"]] != base:
            return None
        if not isinstance(e.params["index"], Variable):
            return None
    rows = []
    for e in run:
        row = [e.params["index"].id]
        if not same_value:
            row.append(term_token(e.params["value"]))
        rows.append(" ".join(row))
    sub = {first["index"].id: "%0"}
    probe = dict(first)
    if not same_value:
        if not all(isinstance(e.params["value"], (int, Variable)) for e in run):
            return None
        value = first["value"]
        value_token = value.id if isinstance(value, Variable) else str(value)
        template = render_entity(_bare(run[0]), R, indent, sub=sub)
        template = [line.replace(f"<value> {value_token} </value>",
                                 "<value> %1 </value>") for line in template]
        return _Group(template, rows)
    return _Group(render_entity(_bare(run[0]), R, indent, sub=sub), rows)


def _groupable(entity) -> bool:
    return (isinstance(entity, ConstraintEntity)
            and entity.note is None and entity.tag is None
            and entity.kind not in META_KINDS
            and entity.kind != "slide")


def detect_groups(entities: list[ConstraintEntity], R: RenderContext,
                  indent: int) -> list:
    """Renderables for one posted list: _Group objects for runs of at
    least two abstractable same-kind entities, bare entities otherwise."""
    out: list = []
    i = 0
    while i < len(entities):
        e = entities[i]
        if not _groupable(e):
            out.append(e)
            i += 1
            continue
        j = i + 1
        while j < len(entities) and _groupable(entities[j]) \
                and entities[j].kind == e.kind:
            j += 1
        group = None
        if j - i >= 2:
            run = entities[i:j]
            if e.kind == "intension":
                group = _try_group_intension(run, R, indent + 2)
            elif e.kind == "element":
                group = _try_group_element(run, R, indent + 2)
            elif e.kind in _LIST_GROUP_KINDS:
                group = _try_group_list(run, R, indent + 2)
        if group is not None:
            out.append(group)
            i = j
        else:
            out.append(e)
            i += 1
    return out


# --------------------------------------------------------------------------
# slide recognition
# --------------------------------------------------------------------------

def _window_vars(entity: ConstraintEntity) -> list[Variable] | None:
    if entity.kind == "extension":
        terms = entity.params["list"]
        if all(isinstance(t, Variable) for t in terms):
            return list(terms)
        return None
    if entity.kind == "intension":
        return scope_of(entity)
    return None


def _same_window_shape(a: ConstraintEntity, b: ConstraintEntity) -> bool:
    if a.kind != b.kind:
        return False
    if a.kind == "extension":
        return a.params["rows"] == b.params["rows"] \
            and a.params["positive"] == b.params["positive"]
    ta, la = _abstract_intension(a.params["tree"], True)
    tb, lb = _abstract_intension(b.params["tree"], True)
    consts_a = [x for x in la if not isinstance(x, Variable)]
    consts_b = [x for x in lb if not isinstance(x, Variable)]
    return ta == tb and consts_a == consts_b


def recognize_slides(entities: list) -> list:
    """Fold maximal runs of identical constraints whose scopes slide with
    a constant offset smaller than the window width into slide entities."""
    out: list = []
    i = 0
    while i < len(entities):
        e = entities[i]
        scope = _window_vars(e) if _groupable(e) else None
        if scope is None or len(scope) < 2:
            out.append(e)
            i += 1
            continue
        width = len(scope)
        base = list(scope)
        offset = None
        j = i + 1
        while j < len(entities) and _groupable(entities[j]) \
                and _same_window_shape(e, entities[j]):
            nxt = _window_vars(entities[j])
            if nxt is None or len(nxt) != width:
                break
            if offset is None:
                shift = None
                for o in range(1, width):
                    if nxt[:width - o] == scope[o:]:
                        shift = o
                        break
                if shift is None:
                    break
                offset = shift
            start = (j - i) * offset
            if nxt[:len(base) - start] != base[start:]:
                break
            base.extend(nxt[len(base) - start:])
            j += 1
        if offset is not None and j - i >= 2:
            out.append(ConstraintEntity("slide", {
                "entities": entities[i:j], "list": base,
                "offset": offset, "circular": False}))
            i = j
        else:
            out.append(e)
            i += 1
    return out


# --------------------------------------------------------------------------
# instance rendering
# --------------------------------------------------------------------------

def _render_declaration(decl, R: RenderContext, indent: int) -> list[str]:
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(decl, Variable):
        sym = "symbolic" if decl.dom.kind == "symbolic" else None
        attrs = _attrs([("id", decl.id), ("note", decl.note), ("type", sym)])
        return [f"{pad}<var{attrs}> {domain_text(decl.dom)} </var>"]

    cells = [c for c in decl.flat_with_holes() if c is not None]
    size = "".join(f"[{d}]" for d in decl.dims)
    sym = "symbolic" if cells[0].dom.kind == "symbolic" else None
    attrs = _attrs([("id", decl.id), ("note", decl.note),
                    ("size", size), ("type", sym)])
    groups: list[tuple[Domain, list[str]]] = []
    for cell in cells:
        for dom, ids in groups:
            if dom == cell.dom:
                ids.append(cell.id)
                break
        else:
            groups.append((cell.dom, [cell.id]))
    if len(groups) == 1:
        return [f"{pad}<array{attrs}> {domain_text(groups[0][0])} </array>"]
    lines = [f"{pad}<array{attrs}>"]
    for dom, ids in groups:
        lines.append(f'{inner}<domain for="{" ".join(ids)}"> '
                     f"{domain_text(dom)} </domain>")
    lines.append(f"{pad}</array>")
    return lines


def _render_group(group: _Group, indent: int) -> list[str]:
    pad = " " * indent
    attrs = _attrs([("note", group.note), ("class", group.tag)])
    lines = [f"{pad}<group{attrs}>"]
    lines.extend(group.template_lines)
    for row in group.rows:
        lines.append(f"{pad}  <args> {row} </args>")
    lines.append(f"{pad}</group>")
    return lines


def _render_item(item, R: RenderContext, indent: int) -> list[str]:
    if isinstance(item, _Group):
        return _render_group(item, indent)
    return render_entity(item, R, indent)


def _post_items(post: Post, R: RenderContext, indent: int,
                slides: bool) -> list:
    items: list = []
    for kind, payload in post.units:
        if kind == "one":
            items.append(payload)
        else:
            seq = [e for e in payload if e is not None]
            if slides:
                seq = recognize_slides(seq)
            items.extend(detect_groups(seq, R, indent))
    return items


def _render_post(post: Post, R: RenderContext, indent: int,
                 slides: bool) -> list[str]:
    items = _post_items(post, R, indent, slides)
    if not items:
        return []
    annotated = post.note is not None or post.tag is not None

    def own_annotations(item) -> bool:
        return getattr(item, "note", None) is not None \
            or getattr(item, "tag", None) is not None

    if annotated and len(items) == 1 and not own_annotations(items[0]):
        item = items[0]
        if isinstance(item, _Group):
            item.note, item.tag = post.note, post.tag
            return _render_group(item, indent)
        return _annotated_entity(item, post, R, indent)
    if annotated:
        pad = " " * indent
        lines = [f"{pad}<block{_attrs([('note', post.note), ('class', post.tag)])}>"]
        for item in items:
            lines.extend(_render_item(item, R, indent + 2))
        lines.append(f"{pad}</block>")
        return lines
    out: list[str] = []
    for item in items:
        out.extend(_render_item(item, R, indent))
    return out


def _annotated_entity(entity: ConstraintEntity, post: Post,
                      R: RenderContext, indent: int) -> list[str]:
    dressed = ConstraintEntity(entity.kind, entity.params, post.note, post.tag)
    return render_entity(dressed, R, indent)


def _render_objective(objective: Objective, R: RenderContext,
                      indent: int) -> list[str]:
    pad = " " * indent
    inner = " " * (indent + 2)
    tag = objective.sense
    term = objective.term
    if isinstance(term, Aggregate):
        attrs = _attrs([("note", objective.note), ("type", term.kind)])
        tokens = [term_token(t) for t in term.terms]
        if term.kind == "sum" and term.coeffs:
            return [
                f"{pad}<{tag}{attrs}>",
                f"{inner}<list> {compact_refs(tokens, R)} </list>",
                f"{inner}<coeffs> {' '.join(str(c) for c in term.coeffs)} </coeffs>",
                f"{pad}</{tag}>",
            ]
        return [f"{pad}<{tag}{attrs}> {compact_refs(tokens, R)} </{tag}>"]
    attrs = _attrs([("note", objective.note)])
    return [f"{pad}<{tag}{attrs}> {term_token(term)} </{tag}>"]


def render_instance(ir: InstanceIR, recognize: bool = False) -> str:
    """Deterministic XML text of a compiled instance."""
    R = RenderContext(ir.declarations)
    lines = [f'<instance format="XCSP3" type="{ir.framework}">']
    lines.append("  <variables>")
    for decl in ir.declarations:
        lines.extend(_render_declaration(decl, R, 4))
    lines.append("  </variables>")
    lines.append("  <constraints>")
    for post in ir.posts:
        lines.extend(_render_post(post, R, 4, recognize))
    lines.append("  </constraints>")
    if ir.objective is not None:
        lines.append("  <objectives>")
        lines.extend(_render_objective(ir.objective, R, 4))
        lines.append("  </objectives>")
    lines.append("</instance>")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# entry points
# --------------------------------------------------------------------------

def compile_instance(ctx: ModelContext, core_only: bool = False,
                     recognize: bool = False) -> tuple[InstanceIR, str]:
    """Reformulate a model and render it; returns the IR and the XML."""
    ir = reformulate(ctx, core_only=core_only)
    return ir, render_instance(ir, recognize=recognize)


def uses_meta(ir: InstanceIR) -> bool:
    return any(e.kind in META_KINDS for e in ir.all_entities())


def output_filename(name: str, suffix: str, variant: str | None) -> str:
    stem = name
    if suffix:
        stem += f"-{suffix}"
    if variant:
        stem += f"-{variant}"
    return stem + ".xml"
