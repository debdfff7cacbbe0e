"""Cutting-plane engine for the three constraint families.

The working LP starts from the explicitly known rows (the spanning-tree
total-count row plus degree rows, or the crossing bound rows) with the
0 <= x <= 1 box, and repeatedly adds the most-violated row found by the
family's separation oracle until the vertex returned by the exact
simplex satisfies the full exponential system.  A vertex of the working
relaxation that is feasible for the full system is a vertex of the full
polytope (the full region is contained in the relaxation), so the
result is a certified extreme point with an optimal objective.

Separation is exhaustive by design: subset enumeration doubles as an
independent oracle for the tests.  A min-cut separator could replace
separate_spanning_tree behind the same interface if larger graphs were
ever needed.

Ties in "most violated" break by smaller witness set, then by the
lexicographically smallest bitmask (for lattices, by member index), so
runs are reproducible.
"""

from dataclasses import dataclass

from .errors import InstanceError, InternalCheckError, SizeGuardError
from .graphs import iter_bits
from .rational import Rat, ZERO, ONE
from .simplex import (
    EQ,
    GE,
    LE,
    Constraint,
    LinearProgram,
    LpUnbounded,
    simplex_solve,
)

MCST = "mcst"
INTERSECTION = "intersection"
LATTICE = "lattice"

SPANNING_SUBSET_GUARD = 20


@dataclass(frozen=True)
class SeparationResult:
    feasible: bool
    family: str = None
    witness: object = None
    lhs: object = None
    rhs: object = None
    sense: str = None

    @classmethod
    def ok(cls):
        return cls(True)


@dataclass(frozen=True)
class ResidualMcstLp:
    """LP data of one spanning-tree iteration: undecided edges, fixed
    edges, and the alive degree rows (node id, vertex set, bound)."""

    graph: object
    eprime: int
    fmask: int
    degree_rows: tuple

    def __post_init__(self):
        if self.eprime & self.fmask:
            raise InstanceError("undecided and fixed edge sets overlap")


@dataclass(frozen=True)
class ResidualIntersectionLp:
    pair: object
    costs: tuple
    eprime: int
    fmask: int
    bound_rows: tuple  # (constraint index, element mask, residual upper)


@dataclass(frozen=True)
class ResidualLatticeLp:
    lat: object
    costs: tuple
    eprime: int
    fmask: int
    bound_rows: tuple  # (constraint index, element mask, lower | None, upper)


# -- separation oracles ------------------------------------------------------


def _subset_sums(n, items, values):
    """sums[vmask] = sum of values for items with both endpoints in vmask.

    items: per-vertex adjacency (vertex -> [(value index, other endpoint)]).
    """
    sums = [ZERO] * (1 << n)
    for vmask in range(1, 1 << n):
        low = vmask & -vmask
        v = low.bit_length() - 1
        prev = vmask ^ low
        acc = sums[prev]
        for idx, other in items[v]:
            if (prev >> other) & 1:
                acc = acc + values[idx]
        sums[vmask] = acc
    return sums


def separate_spanning_tree(x_by_id, graph, fmask):
    """Most-violated spanning-tree row at x, or feasible.

    Checks the total-count equality exactly, then every induced-subset
    row x(E'(U)) <= |U| - |F(U)| - 1 over 2 <= |U| <= n-1.
    """
    n = graph.n
    if n > SPANNING_SUBSET_GUARD:
        raise SizeGuardError(
            f"subset separation is exhaustive and guarded at n <= "
            f"{SPANNING_SUBSET_GUARD}; larger graphs need a min-cut separator"
        )
    adj_x = [[] for _ in range(n)]
    adj_f = [[] for _ in range(n)]
    xs = []
    for eid, val in sorted(x_by_id.items()):
        e = graph.by_id[eid]
        adj_x[e.u].append((len(xs), e.v))
        adj_x[e.v].append((len(xs), e.u))
        xs.append(val)
    fcount = 0
    for eid in iter_bits(fmask):
        e = graph.by_id[eid]
        adj_f[e.u].append((fcount, e.v))
        adj_f[e.v].append((fcount, e.u))
        fcount += 1

    xsum = _subset_sums(n, adj_x, xs)
    fsum = _subset_sums(n, adj_f, [1] * fcount)

    full = graph.full_vmask
    target = Rat(n - fcount - 1)
    if xsum[full] != target:
        return SeparationResult(False, "tree_total", full, xsum[full], target, EQ)

    best = None
    for vmask in range(1, full):
        size = vmask.bit_count()
        if size < 2:
            continue
        rhs = Rat(size - fsum[vmask] - 1)
        viol = xsum[vmask] - rhs
        if viol > 0:
            key = (viol, -size, -vmask)
            if best is None or key > best[0]:
                best = (key, vmask, xsum[vmask], rhs)
    if best is None:
        return SeparationResult.ok()
    _, vmask, lhs, rhs = best
    return SeparationResult(False, "subtour", vmask, lhs, rhs, LE)


def separate_contra_polymatroid(x_by_id, fmask, pair):
    """Most-violated covering row x(S & E') >= r_i(S) - |F & S|,
    exhaustive over both functions and all subsets."""
    n = pair.n
    xsum = [ZERO] * (1 << n)
    for s in range(1, 1 << n):
        low = s & -s
        e = low.bit_length() - 1
        xsum[s] = xsum[s ^ low] + x_by_id.get(e, ZERO)
    best = None
    for func_idx, table in ((1, pair.r1), (2, pair.r2)):
        for s in range(1, 1 << n):
            rhs = table[s] - (fmask & s).bit_count()
            if rhs <= 0:
                continue
            viol = Rat(rhs) - xsum[s]
            if viol > 0:
                key = (viol, -s.bit_count(), -s, -func_idx)
                if best is None or key > best[0]:
                    best = (key, func_idx, s, xsum[s], Rat(rhs))
    if best is None:
        return SeparationResult.ok()
    _, func_idx, s, lhs, rhs = best
    return SeparationResult(False, f"cover{func_idx}", s, lhs, rhs, GE)


def separate_lattice(x_by_id, fmask, lat):
    """Most-violated rank row x(rho(S) & E') >= r(S) - |F & rho(S)|;
    ties break by member index."""
    best = None
    for j in range(lat.size):
        rho = lat.rho[j]
        rhs = lat.rank[j] - (fmask & rho).bit_count()
        if rhs <= 0:
            continue
        lhs = ZERO
        for e in iter_bits(rho):
            if e in x_by_id:
                lhs += x_by_id[e]
        viol = Rat(rhs) - lhs
        if viol > 0:
            if best is None or viol > best[0]:
                best = (viol, j, lhs, Rat(rhs))
    if best is None:
        return SeparationResult.ok()
    _, j, lhs, rhs = best
    return SeparationResult(False, "rank", j, lhs, rhs, GE)


# -- working LP assembly -----------------------------------------------------


@dataclass(frozen=True)
class ExtremePoint:
    family: str
    solution: object
    lp: LinearProgram
    var_ids: tuple
    row_tags: tuple  # (kind, witness) aligned with lp.constraints
    x_by_id: dict

    @property
    def objective(self):
        return self.solution.objective_value

    def tight_constraint_tags(self):
        m = len(self.lp.constraints)
        return [
            self.row_tags[idx] for idx in self.solution.tight_rows if idx < m
        ]


def _indicator(var_ids, mask):
    return tuple(ONE if (mask >> v) & 1 else ZERO for v in var_ids)


def _base_mcst(state):
    graph = state.graph
    var_ids = tuple(sorted(iter_bits(state.eprime)))
    objective = tuple(graph.by_id[v].cost for v in var_ids)
    n_fixed = state.fmask.bit_count()
    rows = [
        (
            Constraint(tuple(ONE for _ in var_ids), EQ, Rat(graph.n - n_fixed - 1)),
            ("tree_total", None),
        )
    ]
    for node_id, vset, bound in state.degree_rows:
        dmask = graph.delta_mask(vset, within=state.eprime)
        rows.append(
            (Constraint(_indicator(var_ids, dmask), LE, bound), ("degree", node_id))
        )

    def cut_row(res):
        vmask = res.witness
        inside = graph.induced_mask(vmask, within=state.eprime)
        f_inside = (graph.induced_mask(vmask) & state.fmask).bit_count()
        rhs = Rat(vmask.bit_count() - f_inside - 1)
        return Constraint(_indicator(var_ids, inside), LE, rhs), ("subtour", vmask)

    def separator(x_by_id):
        return separate_spanning_tree(x_by_id, graph, state.fmask)

    return var_ids, objective, rows, separator, cut_row


def _base_intersection(state):
    var_ids = tuple(sorted(iter_bits(state.eprime)))
    objective = tuple(state.costs[v] for v in var_ids)
    rows = []
    for idx, elems, resid in state.bound_rows:
        rows.append(
            (
                Constraint(_indicator(var_ids, elems & state.eprime), LE, resid),
                ("bound_upper", idx),
            )
        )

    def cut_row(res):
        func_idx = 1 if res.family == "cover1" else 2
        s = res.witness
        table = state.pair.r1 if func_idx == 1 else state.pair.r2
        rhs = Rat(table[s] - (state.fmask & s).bit_count())
        return (
            Constraint(_indicator(var_ids, s & state.eprime), GE, rhs),
            (res.family, s),
        )

    def separator(x_by_id):
        return separate_contra_polymatroid(x_by_id, state.fmask, state.pair)

    return var_ids, objective, rows, separator, cut_row


def _base_lattice(state):
    var_ids = tuple(sorted(iter_bits(state.eprime)))
    objective = tuple(state.costs[v] for v in var_ids)
    rows = []
    for idx, elems, lower, upper in state.bound_rows:
        fixed = (elems & state.fmask).bit_count()
        ind = _indicator(var_ids, elems & state.eprime)
        rows.append((Constraint(ind, LE, upper - fixed), ("bound_upper", idx)))
        if lower is not None:
            rows.append((Constraint(ind, GE, lower - fixed), ("bound_lower", idx)))

    def cut_row(res):
        j = res.witness
        rho = state.lat.rho[j]
        rhs = Rat(state.lat.rank[j] - (state.fmask & rho).bit_count())
        return (
            Constraint(_indicator(var_ids, rho & state.eprime), GE, rhs),
            ("rank", j),
        )

    def separator(x_by_id):
        return separate_lattice(x_by_id, state.fmask, state.lat)

    return var_ids, objective, rows, separator, cut_row


_BUILDERS = {
    MCST: _base_mcst,
    INTERSECTION: _base_intersection,
    LATTICE: _base_lattice,
}


def solve_to_extreme_point(family, state, extra_rows=(), objective_override=None):
    """Cutting-plane loop: optimal certified vertex of the full system.

    ``extra_rows`` are (Constraint, tag) pairs appended to the base LP
    (used for optimum-pinning).  ``objective_override`` replaces the
    family cost vector (aligned with the sorted undecided ids).
    Raises LpInfeasible if the full system is empty.
    """
    var_ids, objective, rows, separator, cut_row = _BUILDERS[family](state)
    if objective_override is not None:
        objective = tuple(objective_override)
    rows = list(rows) + list(extra_rows)
    seen = {tag for _, tag in rows}
    n = len(var_ids)
    prev_obj = None
    while True:
        lp = LinearProgram(
            n,
            objective,
            tuple(c for c, _ in rows),
            (ZERO,) * n,
            (ONE,) * n,
        )
        try:
            sol = simplex_solve(lp)
        except LpUnbounded as exc:  # impossible: the box is compact
            raise InternalCheckError("box-bounded LP reported unbounded") from exc
        if prev_obj is not None and sol.objective_value < prev_obj:
            raise InternalCheckError(
                "objective decreased while adding cutting planes"
            )
        prev_obj = sol.objective_value
        x_by_id = dict(zip(var_ids, sol.values))
        res = separator(x_by_id)
        if res.feasible:
            return ExtremePoint(
                family, sol, lp, var_ids, tuple(t for _, t in rows), x_by_id
            )
        constraint, tag = cut_row(res)
        if tag in seen:
            raise InternalCheckError(f"separator repeated row {tag}")
        seen.add(tag)
        # re-verify the reported violation exactly against the new row
        lhs = constraint.evaluate(sol.values)
        violated = lhs > constraint.rhs if constraint.rel == LE else lhs < constraint.rhs
        if not violated or lhs != res.lhs or constraint.rhs != res.rhs:
            raise InternalCheckError(
                f"separator violation for {tag} failed exact re-verification"
            )
        rows.append((constraint, tag))


def full_separation_clean(family, state, x_by_id):
    """Post-hoc pass: no family constraint is violated at x."""
    _, _, rows, separator, _ = _BUILDERS[family](state)
    values_ok = separator(x_by_id).feasible
    if not values_ok:
        return False
    var_ids = tuple(sorted(iter_bits(state.eprime)))
    vals = tuple(x_by_id[v] for v in var_ids)
    return all(c.holds(vals) for c, _ in rows)


def tighten_degree_bounds(forest, graph, eprime, x_by_id):
    """Lower every alive bound to the current crossing load x(delta(S)).

    Never increases a bound; returns [(node id, old, new)] for changed
    nodes.
    """
    changes = []
    for nid in forest.alive_ids():
        node = forest.node(nid)
        load = ZERO
        for eid in iter_bits(graph.delta_mask(node.vset, within=eprime)):
            load += x_by_id[eid]
        if load > node.bound:
            raise InternalCheckError(
                f"crossing load exceeds bound at node {nid}; tightening "
                "would increase the bound"
            )
        if load != node.bound:
            changes.append((nid, node.bound, load))
            forest.set_bound(nid, load)
    return changes


def coordinate_ranges(family, state, optimum, base_objective):
    """Exact per-coordinate min/max over the optimal face.

    Adds the row base_objective . x = optimum and re-optimizes +e_j and
    -e_j for every variable; a coordinate is pinned when min == max.
    """
    var_ids = _BUILDERS[family](state)[0]
    pin = (
        Constraint(tuple(base_objective), EQ, optimum),
        ("pin", None),
    )
    ranges = []
    for j in range(len(var_ids)):
        unit = [ZERO] * len(var_ids)
        unit[j] = ONE
        lo = solve_to_extreme_point(
            family, state, extra_rows=(pin,), objective_override=tuple(unit)
        ).objective
        unit[j] = -ONE
        hi = -solve_to_extreme_point(
            family, state, extra_rows=(pin,), objective_override=tuple(unit)
        ).objective
        ranges.append((lo, hi))
    return ranges
