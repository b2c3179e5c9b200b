"""Ground truth evaluation: expression values, constraint satisfaction,
and exhaustive enumeration of small models.

Integer division and modulo truncate toward zero, so div(-7, 2) is -3 and
mod(-7, 2) is -1: the remainder carries the sign of the dividend. This
matches the semantics used when rendering expressions, not Python's floor
division. Powers are checked against the signed 64 bit range.

Enumeration follows declaration order for variables and ascending order
inside each domain, so the sequence of solutions is reproducible. A
candidate counter caps the search; partial checks prune branches as soon
as a constraint's variables (or an incremental slice of them, for
difference, ordering and channel constraints) are all assigned.
"""

from __future__ import annotations

from .constraints import (
    ANY,
    Aggregate,
    Condition,
    ConstraintEntity,
    scope_of,
)
from .errors import (
    DivisionByZero,
    OutOfBounds,
    OutOfDomainValue,
    Overflow,
    PartialAssignment,
    SearchSpaceTooLarge,
    SymbolArithmetic,
    UnpostableEntry,
)
from .model import IndexTarget, ModelContext, Node, Variable

INT64_MAX = 2 ** 63 - 1

DEFAULT_CANDIDATE_CAP = 100_000_000


# --------------------------------------------------------------------------
# expression evaluation
# --------------------------------------------------------------------------

def _ints(op: str, values) -> list[int]:
    for v in values:
        if not isinstance(v, int):
            raise SymbolArithmetic(f"{op} needs integers, got {v!r}")
    return values


def truncated_div(a: int, b: int) -> int:
    if b == 0:
        raise DivisionByZero("division by zero")
    q = a // b
    if q < 0 and q * b != a:
        q += 1
    return q


def truncated_mod(a: int, b: int) -> int:
    if b == 0:
        raise DivisionByZero("modulo by zero")
    return a - b * truncated_div(a, b)


def _truth(value) -> bool:
    if not isinstance(value, int):
        raise SymbolArithmetic(f"a logical operand must be 0/1, got {value!r}")
    return value != 0


def eval_node(node, assignment: dict) -> int | str:
    """Value of an expression under a total assignment (0/1 for truth)."""
    if isinstance(node, bool):
        return int(node)
    if isinstance(node, (int, str)):
        return node
    if isinstance(node, Variable):
        try:
            return assignment[node.id]
        except KeyError:
            raise PartialAssignment(f"no value for {node.id}") from None
    if isinstance(node, Aggregate):
        return aggregate_value(node, assignment)
    if isinstance(node, ConstraintEntity):
        return int(eval_constraint(node, assignment))
    if not isinstance(node, Node):
        raise UnpostableEntry(f"cannot evaluate {node!r}")

    op = node.op
    args = node.args

    if op == "idx":
        return _eval_index(node, assignment)

    # short circuiting keeps guarded subexpressions unevaluated
    if op == "and":
        for a in args:
            if not _truth(eval_node(a, assignment)):
                return 0
        return 1
    if op == "or":
        for a in args:
            if _truth(eval_node(a, assignment)):
                return 1
        return 0
    if op == "imp":
        if not _truth(eval_node(args[0], assignment)):
            return 1
        return int(_truth(eval_node(args[1], assignment)))
    if op == "if":
        if _truth(eval_node(args[0], assignment)):
            return eval_node(args[1], assignment)
        return eval_node(args[2], assignment)
    if op == "not":
        return int(not _truth(eval_node(args[0], assignment)))
    if op == "xor":
        acc = False
        for a in args:
            acc ^= _truth(eval_node(a, assignment))
        return int(acc)
    if op == "iff":
        first = _truth(eval_node(args[0], assignment))
        for a in args[1:]:
            if _truth(eval_node(a, assignment)) != first:
                return 0
        return 1

    if op in ("in", "notin"):
        value = eval_node(args[0], assignment)
        members = {eval_node(m, assignment) for m in args[1].args}
        inside = value in members
        return int(inside if op == "in" else not inside)
    if op == "set":
        raise UnpostableEntry("a value set has no value of its own")

    vals = [eval_node(a, assignment) for a in args]

    if op == "eq":
        return int(all(v == vals[0] for v in vals[1:]))
    if op == "ne":
        return int(vals[0] != vals[1])
    if op in ("lt", "le", "gt", "ge"):
        a, b = vals
        if isinstance(a, str) or isinstance(b, str):
            raise SymbolArithmetic("symbols are not ordered")
        return int({"lt": a < b, "le": a <= b, "gt": a > b, "ge": a >= b}[op])

    if op == "add":
        return sum(_ints(op, vals))
    if op == "sub":
        a, b = _ints(op, vals)
        return a - b
    if op == "mul":
        out = 1
        for v in _ints(op, vals):
            out *= v
        return out
    if op == "div":
        a, b = _ints(op, vals)
        return truncated_div(a, b)
    if op == "mod":
        a, b = _ints(op, vals)
        return truncated_mod(a, b)
    if op == "pow":
        a, b = _ints(op, vals)
        if b < 0:
            raise Overflow("powers with negative exponents leave the integers")
        result = a ** b
        if abs(result) > INT64_MAX:
            raise Overflow(f"{a}**{b} leaves the signed 64 bit range")
        return result
    if op == "neg":
        return -_ints(op, vals)[0]
    if op == "abs":
        return abs(_ints(op, vals)[0])
    if op == "dist":
        a, b = _ints(op, vals)
        return abs(a - b)
    if op == "min":
        return min(_ints(op, vals))
    if op == "max":
        return max(_ints(op, vals))
    raise UnpostableEntry(f"cannot evaluate operator {op!r}")


def _eval_index(node: Node, assignment: dict):
    target: IndexTarget = node.args[0]
    indices = [eval_node(i, assignment) for i in node.args[1:]]
    cells = target.cells
    for k in indices:
        if not isinstance(k, int) or not isinstance(cells, tuple) \
                or k < 0 or k >= len(cells):
            raise OutOfBounds(f"index {k!r} outside the accessed array")
        cells = cells[k]
    if isinstance(cells, Variable):
        return assignment[cells.id]
    if isinstance(cells, tuple):
        raise OutOfBounds("not enough indices for this array")
    return cells


def aggregate_value(agg: Aggregate, assignment: dict) -> int:
    values = [eval_node(t, assignment) for t in agg.terms]
    if agg.kind == "sum":
        coeffs = agg.coeffs or [1] * len(values)
        coeffs = _ints("sum", [eval_node(c, assignment) for c in coeffs])
        return sum(c * v for c, v in zip(coeffs, _ints("sum", values)))
    if agg.kind == "count":
        wanted = {eval_node(v, assignment) for v in agg.params["values"]}
        return sum(1 for v in values if v in wanted)
    if agg.kind == "nValues":
        exc = agg.params.get("excepting") or ()
        return len({v for v in values if v not in exc})
    if agg.kind == "minimum":
        return min(_ints("minimum", values))
    if agg.kind == "maximum":
        return max(_ints("maximum", values))
    raise UnpostableEntry(f"a {agg.kind} aggregate has no scalar value")


def condition_holds(value: int, condition: Condition, assignment: dict) -> bool:
    rhs = condition.rhs
    if isinstance(rhs, Variable):
        rhs = assignment[rhs.id]
    if condition.op == "in":
        return value in rhs
    if condition.op == "notin":
        return value not in rhs
    return {
        "lt": value < rhs, "le": value <= rhs, "ge": value >= rhs,
        "gt": value > rhs, "eq": value == rhs, "ne": value != rhs,
    }[condition.op]


# --------------------------------------------------------------------------
# constraint evaluation
# --------------------------------------------------------------------------

def _row_matches(row: tuple, values: tuple) -> bool:
    return all(r is ANY or r == v for r, v in zip(row, values))


def eval_constraint(entity: ConstraintEntity, assignment: dict) -> bool:
    """Truth of one posted constraint under a total assignment."""
    kind = entity.kind
    p = entity.params

    if kind == "intension":
        return _truth(eval_node(p["tree"], assignment))

    if kind == "extension":
        values = tuple(eval_node(v, assignment) for v in p["list"])
        hit = any(_row_matches(row, values) for row in p["rows"])
        return hit if p["positive"] else not hit

    if kind == "unsatisfiable":
        return False

    if kind == "regular":
        automaton = p["automaton"]
        transitions = automaton.transitions
        states = {automaton.start}
        for v in (eval_node(x, assignment) for x in p["list"]):
            states = {dst for src, w, dst in transitions if src in states and w == v}
            if not states:
                return False
        return bool(states & automaton.final)

    if kind == "mdd":
        diagram = p["diagram"]
        nodes = {diagram.root}
        for v in (eval_node(x, assignment) for x in p["list"]):
            nodes = {dst for src, w, dst in diagram.transitions
                     if src in nodes and w == v}
            if not nodes:
                return False
        return diagram.terminal in nodes

    if kind == "allDifferent":
        if "matrix" in p:
            rows = [[eval_node(t, assignment) for t in row] for row in p["matrix"]]
            lines = rows + [list(c) for c in zip(*rows)]
            return all(len(set(line)) == len(line) for line in lines)
        exc = p.get("excepting") or ()
        values = [eval_node(t, assignment) for t in p["list"]]
        kept = [v for v in values if v not in exc]
        return len(set(kept)) == len(kept)

    if kind == "allDifferentList":
        exc = {tuple(t) for t in (p.get("excepting") or ())}
        rows = [tuple(eval_node(t, assignment) for t in lst) for lst in p["lists"]]
        kept = [r for r in rows if r not in exc]
        return len(set(kept)) == len(kept)

    if kind == "allEqual":
        values = [eval_node(t, assignment) for t in p["list"]]
        return all(v == values[0] for v in values[1:])

    if kind == "ordered":
        values = [eval_node(t, assignment) for t in p["list"]]
        lengths = p.get("lengths")
        compare = _COMPARE[p["operator"]]
        for i in range(len(values) - 1):
            gap = lengths[i] if lengths else 0
            if isinstance(gap, Variable):
                gap = assignment[gap.id]
            if not compare(values[i] + gap, values[i + 1]):
                return False
        return True

    if kind == "lex":
        strict = p["operator"] in ("lt", "gt")

        def chain(rows) -> bool:
            tuples = [tuple(eval_node(t, assignment) for t in row) for row in rows]
            for a, b in zip(tuples, tuples[1:]):
                if strict:
                    ok = a < b if p["operator"] == "lt" else a > b
                else:
                    ok = a <= b if p["operator"] == "le" else a >= b
                if not ok:
                    return False
            return True

        if "matrix" in p:
            rows = p["matrix"]
            cols = [list(c) for c in zip(*rows)]
            return chain(rows) and chain(cols)
        return chain(p["lists"])

    if kind in ("sum", "count", "nValues", "minimum", "maximum"):
        agg = Aggregate(kind, p["list"], p.get("coeffs"),
                        {k: v for k, v in p.items() if k not in ("list", "coeffs", "condition")})
        return condition_holds(aggregate_value(agg, assignment), p["condition"], assignment)

    if kind == "cumulative":
        return _eval_cumulative(p, assignment)

    if kind == "cardinality":
        values = [eval_node(t, assignment) for t in p["list"]]
        for value, occ in zip(p["values"], p["occurs"]):
            count = sum(1 for v in values if v == value)
            if isinstance(occ, Variable):
                occ = assignment[occ.id]
            if isinstance(occ, range):
                if count not in occ:
                    return False
            elif count != occ:
                return False
        if p.get("closed") and any(v not in p["values"] for v in values):
            return False
        return True

    if kind == "element":
        value = p["value"]
        value = assignment[value.id] if isinstance(value, Variable) else value
        if "matrix" in p:
            i = eval_node(p["index"][0], assignment)
            j = eval_node(p["index"][1], assignment)
            rows = p["matrix"]
            if not (0 <= i < len(rows) and 0 <= j < len(rows[0])):
                return False
            cell = rows[i][j]
        else:
            i = eval_node(p["index"], assignment)
            cells = p["list"]
            if not (0 <= i < len(cells)):
                return False
            cell = cells[i]
        cell = assignment[cell.id] if isinstance(cell, Variable) else cell
        return cell == value

    if kind == "channel":
        return _eval_channel(p, assignment)

    if kind == "noOverlap":
        return _eval_no_overlap(p, assignment)

    if kind == "circuit":
        return _eval_circuit(p, assignment)

    if kind == "slide":
        return all(eval_constraint(e, assignment) for e in p["entities"])

    if kind in ("and", "or", "not", "xor", "ifThen", "ifThenElse", "iff"):
        truths = [eval_constraint(e, assignment) for e in p["entities"]]
        if kind == "and":
            return all(truths)
        if kind == "or":
            return any(truths)
        if kind == "not":
            return not truths[0]
        if kind == "xor":
            out = False
            for t in truths:
                out ^= t
            return out
        if kind == "ifThen":
            return truths[1] if truths[0] else True
        if kind == "ifThenElse":
            return truths[1] if truths[0] else truths[2]
        return all(t == truths[0] for t in truths[1:])

    raise UnpostableEntry(f"cannot evaluate constraint kind {kind!r}")


_COMPARE = {
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
}


def _eval_cumulative(p: dict, assignment: dict) -> bool:
    origins = [eval_node(o, assignment) for o in p["origins"]]
    lengths = [eval_node(l, assignment) for l in p["lengths"]]
    heights = [eval_node(h, assignment) for h in p["heights"]]
    if p.get("ends") is not None:
        ends = [eval_node(e, assignment) for e in p["ends"]]
        if any(o + l != e for o, l, e in zip(origins, lengths, ends)):
            return False
    condition = p["condition"]
    times = sorted({t for o, l in zip(origins, lengths) if l > 0
                    for t in range(o, o + l)})
    for t in times:
        usage = sum(h for o, l, h in zip(origins, lengths, heights)
                    if l > 0 and o <= t < o + l)
        if not condition_holds(usage, condition, assignment):
            return False
    return True


def _eval_channel(p: dict, assignment: dict) -> bool:
    list1 = [eval_node(v, assignment) for v in p["list1"]]
    s1 = p.get("start1", 0)
    s2 = p.get("start2", 0)
    if "value" in p:
        position = assignment[p["value"].id] if isinstance(p["value"], Variable) \
            else p["value"]
        for j, bit in enumerate(list1):
            if bit not in (0, 1):
                return False
            if (bit == 1) != (j + s1 == position):
                return False
        return True
    if p["list2"] is None:
        n = len(list1)
        for i, j in enumerate(list1):
            if not (s1 <= j < s1 + n):
                return False
            if list1[j - s1] != i + s1:
                return False
        return True
    list2 = [eval_node(v, assignment) for v in p["list2"]]
    for i, j in enumerate(list1):
        if not (s2 <= j < s2 + len(list2)):
            return False
        if list2[j - s2] != i + s1:
            return False
    if len(list1) == len(list2):
        for j, i in enumerate(list2):
            if not (s1 <= i < s1 + len(list1)):
                return False
            if list1[i - s1] != j + s2:
                return False
    return True


def _eval_no_overlap(p: dict, assignment: dict) -> bool:
    def val(x):
        return eval_node(x, assignment)

    if p["multi"]:
        boxes = [[val(c) for c in o] for o in p["origins"]]
        sizes = [[val(c) for c in l] for l in p["lengths"]]
        live = [i for i in range(len(boxes))
                if not (p["zero_ignored"] and any(s == 0 for s in sizes[i]))]
        for a in range(len(live)):
            for b in range(a + 1, len(live)):
                i, j = live[a], live[b]
                if not any(boxes[i][d] + sizes[i][d] <= boxes[j][d]
                           or boxes[j][d] + sizes[j][d] <= boxes[i][d]
                           for d in range(len(boxes[i]))):
                    return False
        return True
    origins = [val(o) for o in p["origins"]]
    lengths = [val(l) for l in p["lengths"]]
    live = [i for i in range(len(origins))
            if not (p["zero_ignored"] and lengths[i] == 0)]
    for a in range(len(live)):
        for b in range(a + 1, len(live)):
            i, j = live[a], live[b]
            if not (origins[i] + lengths[i] <= origins[j]
                    or origins[j] + lengths[j] <= origins[i]):
                return False
    return True


def _eval_circuit(p: dict, assignment: dict) -> bool:
    values = [eval_node(t, assignment) for t in p["list"]]
    start = p.get("start", 0)
    n = len(values)
    nodes = list(range(start, start + n))
    succ = dict(zip(nodes, values))
    if any(not (start <= v < start + n) for v in values):
        return False
    on_cycle = [i for i in nodes if succ[i] != i]
    if len(on_cycle) < 2:
        return False
    size = p.get("size")
    if size is not None:
        wanted = assignment[size.id] if isinstance(size, Variable) else size
        if len(on_cycle) != wanted:
            return False
    # walk the cycle from its first node; it must close after visiting
    # every non self looping node exactly once
    first = on_cycle[0]
    seen = set()
    node = first
    while node not in seen:
        seen.add(node)
        node = succ[node]
        if node not in succ or (succ[node] == node and node != first):
            return False
    return node == first and seen == set(on_cycle)


# --------------------------------------------------------------------------
# reports and checking
# --------------------------------------------------------------------------

class CheckReport:
    """What a solution check found: overall truth, the violated entities
    as (position, kind, note) triples, and the objective value if any."""

    __slots__ = ("satisfied", "violated", "objective")

    def __init__(self, satisfied: bool, violated: list, objective):
        self.satisfied = satisfied
        self.violated = violated
        self.objective = objective

    def __repr__(self) -> str:
        state = "ok" if self.satisfied else f"{len(self.violated)} violated"
        return f"CheckReport({state}, objective={self.objective})"


def _model_variables(model) -> list[Variable]:
    return model.all_variables()


def _model_entities(model) -> list[ConstraintEntity]:
    if isinstance(model, ModelContext):
        out = []
        for post in model.posts:
            out.extend(post.entities())
        return out
    return model.all_entities()


def _objective_value(model, assignment: dict):
    objective = getattr(model, "objective", None)
    if objective is None:
        return None
    return eval_node(objective.term, assignment)


def normalize_assignment(model, assignment: dict) -> dict:
    """Check and normalize an assignment to a plain id -> value mapping."""
    values = {}
    for key, value in assignment.items():
        values[key.id if isinstance(key, Variable) else key] = value
    out = {}
    for v in _model_variables(model):
        if v.id not in values:
            raise PartialAssignment(f"no value for {v.id}")
        value = values[v.id]
        if isinstance(value, bool):
            value = int(value)
        if not v.dom.contains(value):
            raise OutOfDomainValue(f"{value!r} outside the domain of {v.id}")
        out[v.id] = value
    return out


def check_solution(model, assignment: dict) -> CheckReport:
    """Evaluate every posted constraint under the assignment."""
    values = normalize_assignment(model, assignment)
    violated = []
    for position, entity in enumerate(_model_entities(model)):
        if not eval_constraint(entity, values):
            violated.append((position, entity.kind, entity.note))
    return CheckReport(not violated, violated, _objective_value(model, values))


# --------------------------------------------------------------------------
# enumeration
# --------------------------------------------------------------------------

class Solutions:
    """Result of an enumeration: the solutions in search order, whether
    the sweep ran to the end, and for optimization runs the optimum."""

    __slots__ = ("assignments", "complete", "optimum", "candidates")

    def __init__(self, assignments, complete, optimum, candidates):
        self.assignments = assignments
        self.complete = complete
        self.optimum = optimum
        self.candidates = candidates

    def __len__(self) -> int:
        return len(self.assignments)

    def __iter__(self):
        return iter(self.assignments)

    def __repr__(self) -> str:
        return (f"Solutions({len(self.assignments)}, complete={self.complete},"
                f" optimum={self.optimum})")


def _term_positions(term, positions: dict) -> list[int]:
    out = []
    seen = set()

    def walk(x):
        if isinstance(x, Variable) and x.id not in seen:
            seen.add(x.id)
            out.append(positions[x.id])
        elif isinstance(x, Node):
            if x.op == "idx":
                for cell in x.args[0].flat():
                    walk(cell)
                for idx in x.args[1:]:
                    walk(idx)
            else:
                for a in x.args:
                    walk(a)

    walk(term)
    return out


def _build_checks(entities, positions: dict, nvars: int):
    """Attach full and incremental checks to variable positions."""
    checks: list[list] = [[] for _ in range(nvars)]

    def full_check(entity):
        spots = [positions[v.id] for v in scope_of(entity) if v.id in positions]
        last = max(spots) if spots else 0
        checks[last].append(lambda a, e=entity: eval_constraint(e, a))

    def distinct_partial(entity):
        term_info = []
        for t in entity.params["list"]:
            spots = _term_positions(t, positions)
            term_info.append((max(spots) if spots else 0, t))
        exc = entity.params.get("excepting") or ()

        def check(a, upto, info=term_info, exc=exc):
            seen = set()
            for last, term in info:
                if last > upto:
                    continue
                v = eval_node(term, a)
                if v in exc:
                    continue
                if v in seen:
                    return False
                seen.add(v)
            return True

        for last, _t in term_info:
            checks[last].append(lambda a, upto=last: check(a, upto))

    def pair_partial(entity):
        terms = entity.params["list"]
        lengths = entity.params.get("lengths")
        compare = _COMPARE[entity.params["operator"]]
        for i in range(len(terms) - 1):
            a_pos = _term_positions(terms[i], positions)
            b_pos = _term_positions(terms[i + 1], positions)
            gap = lengths[i] if lengths else 0
            spots = a_pos + b_pos + (
                _term_positions(gap, positions) if isinstance(gap, Variable) else [])
            last = max(spots) if spots else 0

            def check(a, x=terms[i], y=terms[i + 1], g=gap):
                gv = a[g.id] if isinstance(g, Variable) else g
                return compare(eval_node(x, a) + gv, eval_node(y, a))

            checks[last].append(check)

    def channel_partial(entity):
        p = entity.params
        if "value" in p or p["list2"] is None:
            full_check(entity)
            return
        list1, list2 = p["list1"], p["list2"]
        s1, s2 = p.get("start1", 0), p.get("start2", 0)
        bidirectional = len(list1) == len(list2)
        pos2 = {v.id: k for k, v in enumerate(list2)}

        def check(a):
            used = set()
            for i, v in enumerate(list1):
                if v.id not in a:
                    continue
                j = a[v.id]
                if not (s2 <= j < s2 + len(list2)):
                    return False
                if j in used:
                    return False
                used.add(j)
                partner = list2[j - s2]
                if partner.id in a and a[partner.id] != i + s1:
                    return False
            if bidirectional:
                used2 = set()
                for j, w in enumerate(list2):
                    if w.id not in a:
                        continue
                    i = a[w.id]
                    if not (s1 <= i < s1 + len(list1)):
                        return False
                    if i in used2:
                        return False
                    used2.add(i)
                    partner = list1[i - s1]
                    if partner.id in a and a[partner.id] != j + s2:
                        return False
            return True

        for v in list1 + list2:
            if v.id in positions:
                checks[positions[v.id]].append(check)

    for entity in entities:
        if entity.kind == "allDifferent":
            if "matrix" in entity.params:
                full_check(entity)
                continue
            distinct_partial(entity)
        elif entity.kind == "allEqual":
            exc_free = dict(entity.params)
            probe = ConstraintEntity("allEqual", exc_free)
            full_check(probe)
            # adjacent pairs complete earlier than the whole scope
            pairs = entity.params["list"]
            for i in range(len(pairs) - 1):
                spots = (_term_positions(pairs[i], positions)
                         + _term_positions(pairs[i + 1], positions))
                last = max(spots) if spots else 0
                checks[last].append(
                    lambda a, x=pairs[i], y=pairs[i + 1]:
                    eval_node(x, a) == eval_node(y, a))
        elif entity.kind == "ordered":
            pair_partial(entity)
        elif entity.kind == "channel":
            channel_partial(entity)
            full_check(entity)
        elif entity.kind == "slide":
            for window in entity.params["entities"]:
                full_check(window)
        else:
            full_check(entity)
    return checks


def enumerate_solutions(model, limit: int | None = None,
                        candidate_cap: int = DEFAULT_CANDIDATE_CAP) -> Solutions:
    """Every solution of a small model, in declaration / ascending order.

    For optimization models the full space is swept and only the optimal
    assignments are kept, together with the optimum value.
    """
    variables = _model_variables(model)
    entities = _model_entities(model)
    positions = {v.id: k for k, v in enumerate(variables)}
    checks = _build_checks(entities, positions, max(len(variables), 1))
    objective = getattr(model, "objective", None)

    solutions: list[dict] = []
    best: list[int] = []
    candidates = 0
    assign: dict = {}
    complete = True

    def record() -> bool:
        if objective is None:
            solutions.append(dict(assign))
            return limit is not None and len(solutions) >= limit
        value = eval_node(objective.term, assign)
        if not best:
            best.append(value)
        better = value < best[0] if objective.sense == "minimize" else value > best[0]
        if better:
            best[0] = value
            solutions.clear()
        if value == best[0]:
            solutions.append(dict(assign))
        return False

    def descend(k: int) -> bool:
        nonlocal candidates
        if k == len(variables):
            return record()
        v = variables[k]
        slot = checks[k] if k < len(checks) else []
        for value in v.dom.values:
            candidates += 1
            if candidates > candidate_cap:
                raise SearchSpaceTooLarge(
                    f"more than {candidate_cap} candidate assignments")
            assign[v.id] = value
            if all(chk(assign) for chk in slot):
                if descend(k + 1):
                    del assign[v.id]
                    return True
        if v.id in assign:
            del assign[v.id]
        return False

    if not variables:
        report_all = all(eval_constraint(e, {}) for e in entities)
        return Solutions([{}] if report_all else [], True, None, 0)

    stopped = descend(0)
    if stopped:
        complete = False
    optimum = best[0] if (objective is not None and solutions) else None
    out = solutions
    if objective is not None and limit is not None:
        out = solutions[:limit]
    return Solutions(out, complete, optimum, candidates)
