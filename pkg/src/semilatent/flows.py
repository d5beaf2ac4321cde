"""Subgraph-restricted flow programs and trek-system existence.

The core question: given a digraph G, a restricted edge set G1, sinks Z and
P and allowed sources Ya, is there a system of node-disjoint directed paths
from some Y inside Ya onto Z and P where the paths ending in Z stay inside
G1?  The question is encoded as a two-family flow program whose integer
optimum equals |Z| + |P| exactly when such a system exists.  Trek systems
with no sided intersection reduce to the same question on a doubled graph
whose unprimed copy walks against the latent-subgraph edges.

Everything that decides is exact.  The fast paths (counting, single-family
max-flow bounds, greedy two-phase routing) are conservative: they only
return answers the integer program would also return.  The fallback solves
the integer program by depth-first branch-and-bound over an exact rational
simplex with Bland's rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .graphs import GraphError, LatentDigraph, Trek, TrekSystem, enumerate_treks

ZERO = Fraction(0)
ONE = Fraction(1)


# -- flow graph -----------------------------------------------------------


@dataclass(frozen=True)
class FlowEdge:
    """One edge of the flow network.

    A tail of None stands for the global source s, a head of None for the
    global sink t.  in_d1 marks the edges the restricted flow family may
    use: the G1 edges, every s -> y edge and every z -> t edge.
    """

    tail: Optional[str]
    head: Optional[str]
    kind: str  # "graph" | "source" | "sink_z" | "sink_p"
    in_d1: bool

    def name(self) -> str:
        tail = "s" if self.tail is None else self.tail
        head = "t" if self.head is None else self.head
        return f"{tail}->{head}"


@dataclass(frozen=True)
class FlowGraph:
    """Flow network for one path-system query.

    Attributes:
        graph: The host digraph.
        d1_edges: Restricted edge set (a subset of graph.edges).
        z: Sinks whose paths must stay inside d1_edges.
        p: Unrestricted sinks.
        ya: Allowed source nodes.
        edges: All flow edges: graph edges first, then s -> y, z -> t and
            p -> t, each group in declaration order.
    """

    graph: LatentDigraph
    d1_edges: frozenset
    z: tuple[str, ...]
    p: tuple[str, ...]
    ya: tuple[str, ...]
    edges: tuple[FlowEdge, ...]


def _check_d1(G: LatentDigraph, g1_edges: Iterable[tuple[str, str]]) -> frozenset:
    d1 = frozenset((a, b) for a, b in g1_edges)
    for a, b in d1:
        if not G.has_edge(a, b):
            raise GraphError(f"restricted edge {a!r} -> {b!r} is not an edge of G")
    return d1


def _check_query(
    G: LatentDigraph, z: Iterable[str], p: Iterable[str], ya: Iterable[str]
) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    # Shared sink/source validation: sinks disjoint, all names declared.
    zs, ps, ys = set(z), set(p), set(ya)
    for label, nodes in (("z", zs), ("p", ps), ("ya", ys)):
        for v in nodes:
            if v not in G._index:
                raise GraphError(f"unknown {label} node {v!r}")
    overlap = zs & ps
    if overlap:
        raise GraphError(f"z and p overlap: {G.sort_nodes(overlap)}")
    return tuple(G.sort_nodes(zs)), tuple(G.sort_nodes(ps)), tuple(G.sort_nodes(ys))


def build_flow_graph(
    G: LatentDigraph,
    g1_edges: Iterable[tuple[str, str]],
    z: Iterable[str],
    p: Iterable[str],
    ya: Iterable[str],
) -> FlowGraph:
    """Assemble the flow network for one query.

    Args:
        G: Host digraph.
        g1_edges: Edges of the restricted subgraph; must be edges of G.
        z: Restricted sinks.
        p: Unrestricted sinks.
        ya: Allowed sources.

    Returns:
        The flow graph, with one s -> y edge per allowed source and one
        sink edge per element of z and p.
    """
    d1 = _check_d1(G, g1_edges)
    zt, pt, yt = _check_query(G, z, p, ya)
    edges: list[FlowEdge] = []
    for tail, head in G.edges:
        edges.append(FlowEdge(tail, head, "graph", (tail, head) in d1))
    for y in yt:
        edges.append(FlowEdge(None, y, "source", True))
    for v in zt:
        edges.append(FlowEdge(v, None, "sink_z", True))
    for v in pt:
        edges.append(FlowEdge(v, None, "sink_p", False))
    return FlowGraph(G, d1, zt, pt, yt, tuple(edges))


# -- linear program -------------------------------------------------------


@dataclass(frozen=True)
class LpRow:
    coeffs: dict
    sense: str  # "<=" or "="
    rhs: Fraction
    label: str


@dataclass(frozen=True)
class FlowProgram:
    """The two-family flow program in row form.

    Variables come in pairs per flow edge, the restricted family first, so
    there are 2 * len(flow_graph.edges) of them; all are implicitly >= 0.
    Per node and family there is a conservation equality and a unit
    capacity row, one joint row caps both families together, and the
    restricted family is pinned to zero outside its eligible edges.  The
    objective adds the restricted flow into t from Z and the free flow
    into t from P, so every feasible point scores at most |Z| + |P|.
    """

    flow_graph: FlowGraph
    n_vars: int
    var_names: tuple[str, ...]
    objective: dict
    rows: tuple[LpRow, ...]

    def lp_text(self) -> str:
        """Human-readable dump of the whole program."""

        def terms(coeffs: dict) -> str:
            parts = []
            for j in sorted(coeffs):
                c = coeffs[j]
                parts.append(f"{'+' if c > 0 else '-'} {abs(c)}*{self.var_names[j]}")
            return " ".join(parts) if parts else "0"

        lines = ["maximize", "  " + terms(self.objective), "subject to"]
        for row in self.rows:
            lines.append(f"  [{row.label}] {terms(row.coeffs)} {row.sense} {row.rhs}")
        lines.append("  all variables >= 0")
        return "\n".join(lines)


def build_lp(fg: FlowGraph) -> FlowProgram:
    """Write the flow program for a flow graph."""
    G = fg.graph
    names = []
    for e in fg.edges:
        names.append(f"f1[{e.name()}]")
        names.append(f"f[{e.name()}]")
    in_edges: dict[str, list[int]] = {v: [] for v in G.nodes}
    out_edges: dict[str, list[int]] = {v: [] for v in G.nodes}
    for i, e in enumerate(fg.edges):
        if e.head is not None:
            in_edges[e.head].append(i)
        if e.tail is not None:
            out_edges[e.tail].append(i)
    rows: list[LpRow] = []
    for v in G.nodes:
        for fam, tag in ((0, "f1"), (1, "f")):
            cons: dict[int, Fraction] = {}
            for i in in_edges[v]:
                cons[2 * i + fam] = ONE
            for i in out_edges[v]:
                j = 2 * i + fam
                cons[j] = cons.get(j, ZERO) - ONE
            rows.append(LpRow(cons, "=", ZERO, f"conserve[{tag},{v}]"))
        for fam, tag in ((0, "f1"), (1, "f")):
            cap = {2 * i + fam: ONE for i in in_edges[v]}
            rows.append(LpRow(cap, "<=", ONE, f"capacity[{tag},{v}]"))
        joint: dict[int, Fraction] = {}
        for i in in_edges[v]:
            joint[2 * i] = ONE
            joint[2 * i + 1] = ONE
        rows.append(LpRow(joint, "<=", ONE, f"joint[{v}]"))
    for i, e in enumerate(fg.edges):
        if not e.in_d1:
            rows.append(LpRow({2 * i: ONE}, "=", ZERO, f"restricted[{e.name()}]"))
    objective: dict[int, Fraction] = {}
    for i, e in enumerate(fg.edges):
        if e.kind == "sink_z":
            objective[2 * i] = ONE
        elif e.kind == "sink_p":
            objective[2 * i + 1] = ONE
    return FlowProgram(fg, 2 * len(fg.edges), tuple(names), objective, tuple(rows))


# -- exact simplex --------------------------------------------------------


class LpError(RuntimeError):
    pass


def _solve_lp(
    rows: list[tuple[dict, str, Fraction]],
    objective: dict,
    n_vars: int,
) -> tuple[str, Fraction, dict, int]:
    """Exact primal simplex: two phases, Bland's rule throughout.

    Args:
        rows: Triples (coeffs, sense, rhs) with sense "<=", ">=" or "=".
        objective: Sparse maximization objective over variables
            0..n_vars-1; all variables are nonnegative.
        n_vars: Number of structural variables.

    Returns:
        (status, value, solution, pivots); status is "optimal" or
        "infeasible", solution maps structural indices to nonzero values.

    Raises:
        LpError: If the program is unbounded.
    """
    tab: list[dict] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    next_col = n_vars
    artificial: set[int] = set()
    for coeffs, sense, b in rows:
        row = {j: Fraction(c) for j, c in coeffs.items() if c != 0}
        b = Fraction(b)
        if b < 0:
            row = {j: -c for j, c in row.items()}
            b = -b
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        if sense == "<=":
            row[next_col] = ONE
            basis.append(next_col)
            next_col += 1
        elif sense == ">=":
            row[next_col] = -ONE
            next_col += 1
            row[next_col] = ONE
            artificial.add(next_col)
            basis.append(next_col)
            next_col += 1
        else:
            row[next_col] = ONE
            artificial.add(next_col)
            basis.append(next_col)
            next_col += 1
        tab.append(row)
        rhs.append(b)

    m = len(tab)
    pivots = 0

    def reduced(cost: dict) -> dict:
        r = {j: Fraction(c) for j, c in cost.items() if c != 0}
        for i in range(m):
            cb = cost.get(basis[i])
            if cb:
                for j, a in tab[i].items():
                    nv = r.get(j, ZERO) - cb * a
                    if nv:
                        r[j] = nv
                    else:
                        r.pop(j, None)
        return r

    def pivot(pi: int, pj: int, r: dict) -> None:
        nonlocal pivots
        prow = tab[pi]
        pv = prow[pj]
        if pv != 1:
            tab[pi] = prow = {j: a / pv for j, a in prow.items()}
            rhs[pi] /= pv
        for i in range(m):
            if i == pi:
                continue
            f = tab[i].get(pj)
            if f:
                row = tab[i]
                for j, a in prow.items():
                    nv = row.get(j, ZERO) - f * a
                    if nv:
                        row[j] = nv
                    else:
                        row.pop(j, None)
                rhs[i] -= f * rhs[pi]
        f = r.get(pj)
        if f:
            for j, a in prow.items():
                nv = r.get(j, ZERO) - f * a
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
        basis[pi] = pj
        pivots += 1

    def run(cost: dict, blocked: set[int]) -> None:
        # Bland: entering = smallest eligible index with positive reduced
        # cost; leaving = minimum ratio, ties to the smallest basic index.
        r = reduced(cost)
        while True:
            enter = None
            for j in sorted(r):
                if r[j] > 0 and j not in blocked:
                    enter = j
                    break
            if enter is None:
                return
            leave = None
            best: Optional[Fraction] = None
            for i in range(m):
                a = tab[i].get(enter, ZERO)
                if a > 0:
                    ratio = rhs[i] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and basis[i] < basis[leave])
                    ):
                        best = ratio
                        leave = i
            if leave is None:
                raise LpError("unbounded program")
            pivot(leave, enter, r)

    if artificial:
        run({a: -ONE for a in artificial}, set())
        infeas = sum(
            (rhs[i] for i in range(m) if basis[i] in artificial), start=ZERO
        )
        if infeas > 0:
            return "infeasible", ZERO, {}, pivots
        # Drive degenerate artificials off the basis where a real pivot
        # exists; rows without one are redundant and stay at rhs zero.
        for i in range(m):
            if basis[i] in artificial:
                for j in sorted(tab[i]):
                    if j not in artificial and tab[i][j] != 0:
                        pivot(i, j, {})
                        break
    run({j: Fraction(c) for j, c in objective.items() if c != 0}, artificial)

    value = ZERO
    solution: dict[int, Fraction] = {}
    for i in range(m):
        bi = basis[i]
        if bi < n_vars and rhs[i] != 0:
            solution[bi] = rhs[i]
            c = objective.get(bi)
            if c:
                value += Fraction(c) * rhs[i]
    return "optimal", value, solution, pivots


# -- branch and bound -----------------------------------------------------


@dataclass
class IlpSolution:
    """Result of one exact 0/1 flow ILP solve.

    Attributes:
        values: Best integral assignment found, indexed like
            FlowProgram.var_names (zeros omitted).
        objective: Its objective value (exact).
        integral: Whether values is integral.  solve_ilp always keeps an
            integral incumbent, starting from the zero flow.
        nodes_explored: Branch-and-bound nodes whose relaxation was solved.
        lp_pivots: Simplex pivots summed over all nodes.
        root_value: Optimal value of the root LP relaxation.
        root_integral: Whether the vertex the simplex found for the root
            relaxation was integral.
        upper_bound: Proven upper bound on the integer optimum; equals
            objective when the search ran to completion.
        budget_exhausted: True when the node budget stopped the search.
    """

    values: dict
    objective: Fraction
    integral: bool
    nodes_explored: int
    lp_pivots: int
    root_value: Optional[Fraction]
    root_integral: Optional[bool]
    upper_bound: Fraction
    budget_exhausted: bool


def _is_integral(values: dict) -> bool:
    return all(v.denominator == 1 for v in values.values())


def solve_ilp(prog: FlowProgram, node_budget: Optional[int] = None) -> IlpSolution:
    """Solve the 0/1 program by depth-first branch and bound.

    Every node's relaxation is solved with the exact rational simplex, so
    bounds and integrality checks carry no floating error.  Branching
    fixes the most fractional variable (ties to the smallest index) and
    explores value 1 before value 0; fixings are substituted into the rows
    rather than added as constraints.

    Args:
        prog: Program from build_lp.
        node_budget: Optional cap on explored nodes.  When exhausted, the
            incumbent so far (at worst the zero flow) is returned with
            budget_exhausted set; upper_bound stays a valid bound.

    Returns:
        The solution record.
    """
    base_rows = [(row.coeffs, row.sense, row.rhs) for row in prog.rows]
    objective = {j: Fraction(c) for j, c in prog.objective.items() if c != 0}

    def reduce_rows(fixed: dict) -> list[tuple[dict, str, Fraction]]:
        out = []
        for coeffs, sense, rhs in base_rows:
            c2 = {}
            b = rhs
            for j, c in coeffs.items():
                if j in fixed:
                    b -= c * fixed[j]
                else:
                    c2[j] = c
            out.append((c2, sense, b))
        return out

    best_values: dict = {}
    best_obj = ZERO  # the zero flow is feasible for every flow program
    nodes = 0
    pivots = 0
    root_value: Optional[Fraction] = None
    root_integral: Optional[bool] = None
    budget_out = False
    upper = sum(objective.values(), start=ZERO)

    stack: list[dict] = [{}]
    while stack:
        if node_budget is not None and nodes >= node_budget:
            budget_out = True
            break
        fixed = stack.pop()
        status, value, solution, piv = _solve_lp(
            reduce_rows(fixed), objective, prog.n_vars
        )
        nodes += 1
        pivots += piv
        if status == "infeasible":
            continue
        for j, v in fixed.items():
            if v:
                solution[j] = ONE
                if j in objective:
                    value += objective[j]
        if nodes == 1:
            root_value = value
            root_integral = _is_integral(solution)
            upper = value
        if value <= best_obj:
            continue
        if _is_integral(solution):
            best_obj = value
            best_values = dict(solution)
            continue
        if value < best_obj + 1:
            # every integral point below scores at most floor(value)
            continue
        _, branch = min(
            (abs(v - Fraction(1, 2)), j)
            for j, v in sorted(solution.items())
            if v.denominator != 1
        )
        zero = dict(fixed)
        zero[branch] = ZERO
        one = dict(fixed)
        one[branch] = ONE
        stack.append(zero)  # LIFO: the value-1 child is explored first
        stack.append(one)
    if not budget_out:
        upper = best_obj
    return IlpSolution(
        values=best_values,
        objective=best_obj,
        integral=True,
        nodes_explored=nodes,
        lp_pivots=pivots,
        root_value=root_value,
        root_integral=root_integral,
        upper_bound=upper,
        budget_exhausted=budget_out,
    )


# -- unit max-flow with node capacities -----------------------------------


class _UnitFlowNet:
    """Max flow on a node-split network: every graph node gets capacity
    one, the virtual endpoints are uncapacitated.  Used both for exact
    upper bounds and for greedy integral routing."""

    def __init__(self, G: LatentDigraph, blocked: frozenset = frozenset()):
        self.G = G
        self.blocked = blocked
        n = len(G.nodes)
        self.S = 2 * n
        self.T = 2 * n + 1
        # arc: [to, capacity, reverse-index, original?]
        self.adj: list[list[list]] = [[] for _ in range(2 * n + 2)]
        self._split_added: set[int] = set()

    def _add(self, a: int, b: int) -> None:
        self.adj[a].append([b, 1, len(self.adj[b]), True])
        self.adj[b].append([a, 0, len(self.adj[a]) - 1, False])

    def _ensure_split(self, k: int) -> None:
        if k not in self._split_added:
            self._split_added.add(k)
            self._add(2 * k, 2 * k + 1)

    def build(
        self,
        edges: Iterable[tuple[str, str]],
        sources: Iterable[str],
        sinks: Iterable[str],
    ) -> None:
        idx = self.G.index
        for tail, head in edges:
            if tail in self.blocked or head in self.blocked:
                continue
            self._ensure_split(idx(tail))
            self._ensure_split(idx(head))
            self._add(2 * idx(tail) + 1, 2 * idx(head))
        for v in sources:
            if v not in self.blocked:
                self._ensure_split(idx(v))
                self._add(self.S, 2 * idx(v))
        for v in sinks:
            if v not in self.blocked:
                self._ensure_split(idx(v))
                self._add(2 * idx(v) + 1, self.T)

    def max_flow(self, limit: int) -> int:
        value = 0
        while value < limit and self._augment():
            value += 1
        return value

    def _augment(self) -> bool:
        prev: dict[int, tuple[int, int]] = {self.S: (-1, -1)}
        queue = [self.S]
        qi = 0
        while qi < len(queue):
            a = queue[qi]
            qi += 1
            if a == self.T:
                break
            for k, arc in enumerate(self.adj[a]):
                if arc[1] > 0 and arc[0] not in prev:
                    prev[arc[0]] = (a, k)
                    queue.append(arc[0])
        if self.T not in prev:
            return False
        b = self.T
        while b != self.S:
            a, k = prev[b]
            arc = self.adj[a][k]
            arc[1] -= 1
            self.adj[arc[0]][arc[2]][1] += 1
            b = a
        return True

    def flow_paths(self) -> list[tuple[str, ...]]:
        """Decompose the current flow into source-to-sink node paths.

        Unit node capacities make the out-flow of every visited node
        unique, so each path traces deterministically; flow cycles (never
        reachable from the source trace) are discarded.
        """
        paths = []
        for arc in self.adj[self.S]:
            if not (arc[3] and arc[1] == 0):
                continue
            nodes: list[str] = []
            cur = arc[0]
            ok = False
            while True:
                if cur == self.T:
                    ok = True
                    break
                if cur % 2 == 0:
                    nodes.append(self.G.nodes[cur // 2])
                nxt = None
                for a2 in self.adj[cur]:
                    if a2[3] and a2[1] == 0:
                        nxt = a2[0]
                        break
                if nxt is None:
                    break
                cur = nxt
            if ok:
                paths.append(tuple(nodes))
        return paths


# -- the decision procedure -----------------------------------------------


@dataclass
class FlowStats:
    """Counters accumulated across path-system queries.

    root_at_target counts ILP runs whose LP relaxation already scored the
    full |Z| + |P|; root_at_target_attained counts how many of those also
    produced an integral solution of that value, and a completed search
    that cannot is a genuine counterexample to the always-integral
    conjecture the audit watches for.
    """

    queries: int = 0
    fast_true: int = 0
    fast_false: int = 0
    ilp_runs: int = 0
    ilp_nodes: int = 0
    lp_pivots: int = 0
    root_at_target: int = 0
    root_at_target_attained: int = 0
    conjecture_counterexamples: int = 0
    budget_exhausted: int = 0

    def merge(self, other: "FlowStats") -> None:
        self.queries += other.queries
        self.fast_true += other.fast_true
        self.fast_false += other.fast_false
        self.ilp_runs += other.ilp_runs
        self.ilp_nodes += other.ilp_nodes
        self.lp_pivots += other.lp_pivots
        self.root_at_target += other.root_at_target
        self.root_at_target_attained += other.root_at_target_attained
        self.conjecture_counterexamples += other.conjecture_counterexamples
        self.budget_exhausted += other.budget_exhausted


@dataclass(frozen=True)
class PathSystemResult:
    """Answer to one path-system query.

    Attributes:
        found: Whether a qualifying path system exists.
        certain: False only when an exhausted node budget left the
            question undecided (found is then False).
        paths: Witness paths, in Z order then P order, each running from
            its source y to its sink; None when found is False.
        method: Which stage decided ("counting", "maxflow-z", "maxflow-p",
            "maxflow-merged", "greedy", "greedy-zfirst", "greedy-pfirst",
            "ilp", "ilp-budget", "trivial").
    """

    found: bool
    certain: bool
    paths: Optional[tuple[tuple[str, ...], ...]]
    method: str

    def __bool__(self) -> bool:
        return self.found

    @property
    def y_nodes(self) -> Optional[tuple[str, ...]]:
        if self.paths is None:
            return None
        return tuple(path[0] for path in self.paths)


def _order_paths(
    raw: list[tuple[str, ...]], sinks: tuple[str, ...]
) -> list[tuple[str, ...]]:
    by_sink = {path[-1]: path for path in raw}
    return [by_sink[s] for s in sinks]


def has_path_system(
    G: LatentDigraph,
    g1_edges: Iterable[tuple[str, str]],
    z: Iterable[str],
    p: Iterable[str],
    ya: Iterable[str],
    stats: Optional[FlowStats] = None,
    node_budget: Optional[int] = None,
) -> PathSystemResult:
    """Decide whether a qualifying path system exists, with witness.

    The answer is exact.  Cheap certain stages run first: counting,
    per-family max-flow feasibility, a merged max-flow upper bound, then
    greedy two-phase routing (which also produces the witness).  Only
    instances those stages cannot settle reach the exact integer program.

    Args:
        G: Host digraph.
        g1_edges: Edges Z-paths are confined to.
        z: Restricted sinks.
        p: Unrestricted sinks.
        ya: Allowed sources.
        stats: Optional counter accumulator.
        node_budget: Optional branch-and-bound node cap; when it runs out
            undecided, the result has certain=False.

    Returns:
        The query result.
    """
    d1 = _check_d1(G, g1_edges)
    zt, pt, yt = _check_query(G, z, p, ya)
    target = len(zt) + len(pt)
    if stats:
        stats.queries += 1

    def decided(res: PathSystemResult) -> PathSystemResult:
        if stats:
            if res.found:
                if res.method.startswith(("greedy", "trivial")):
                    stats.fast_true += 1
            elif res.method.startswith(("counting", "maxflow")):
                stats.fast_false += 1
        return res

    if target == 0:
        return decided(PathSystemResult(True, True, (), "trivial"))
    if len(yt) < target:
        return decided(PathSystemResult(False, True, None, "counting"))

    d1_list = [e for e in G.edges if e in d1]
    net_z = None
    net_p = None
    if zt:
        net_z = _UnitFlowNet(G)
        net_z.build(d1_list, yt, zt)
        if net_z.max_flow(len(zt)) < len(zt):
            return decided(PathSystemResult(False, True, None, "maxflow-z"))
    if pt:
        net_p = _UnitFlowNet(G)
        net_p.build(G.edges, yt, pt)
        if net_p.max_flow(len(pt)) < len(pt):
            return decided(PathSystemResult(False, True, None, "maxflow-p"))
    if zt and pt:
        merged = _UnitFlowNet(G)
        merged.build(G.edges, yt, tuple(zt) + tuple(pt))
        if merged.max_flow(target) < target:
            return decided(PathSystemResult(False, True, None, "maxflow-merged"))

    if not pt:
        paths = _order_paths(net_z.flow_paths(), zt)
        return decided(PathSystemResult(True, True, tuple(paths), "greedy"))
    if not zt:
        paths = _order_paths(net_p.flow_paths(), pt)
        return decided(PathSystemResult(True, True, tuple(paths), "greedy"))

    # Greedy: commit one family's max-flow routing, route the other in the
    # remaining nodes; try both orders.  Failure is not conclusive.
    paths_z = _order_paths(net_z.flow_paths(), zt)
    used = frozenset(v for path in paths_z for v in path)
    rest = _UnitFlowNet(G, blocked=used)
    rest.build(G.edges, yt, pt)
    if rest.max_flow(len(pt)) == len(pt):
        paths_p = _order_paths(rest.flow_paths(), pt)
        return decided(
            PathSystemResult(True, True, tuple(paths_z + paths_p), "greedy-zfirst")
        )
    paths_p = _order_paths(net_p.flow_paths(), pt)
    used = frozenset(v for path in paths_p for v in path)
    rest = _UnitFlowNet(G, blocked=used)
    rest.build(d1_list, yt, zt)
    if rest.max_flow(len(zt)) == len(zt):
        paths_z = _order_paths(rest.flow_paths(), zt)
        return decided(
            PathSystemResult(True, True, tuple(paths_z + paths_p), "greedy-pfirst")
        )

    fg = build_flow_graph(G, d1, zt, pt, yt)
    prog = build_lp(fg)
    sol = solve_ilp(prog, node_budget=node_budget)
    if stats:
        stats.ilp_runs += 1
        stats.ilp_nodes += sol.nodes_explored
        stats.lp_pivots += sol.lp_pivots
        if sol.budget_exhausted:
            stats.budget_exhausted += 1
        if sol.root_value == target:
            stats.root_at_target += 1
            if sol.objective == target:
                stats.root_at_target_attained += 1
            elif not sol.budget_exhausted:
                stats.conjecture_counterexamples += 1
    if sol.objective == target:
        paths = _ilp_witness(fg, sol.values)
        return PathSystemResult(True, True, tuple(paths), "ilp")
    if sol.budget_exhausted and sol.upper_bound >= target:
        return PathSystemResult(False, False, None, "ilp-budget")
    return PathSystemResult(False, True, None, "ilp")


def _ilp_witness(fg: FlowGraph, values: dict) -> list[tuple[str, ...]]:
    # The joint capacity row makes in-flow unique per node, so tracing
    # backwards from each sink edge is deterministic and never meets a
    # flow cycle.
    in_flow: list[dict[str, FlowEdge]] = [{}, {}]
    for i, e in enumerate(fg.edges):
        if e.head is None:
            continue
        for fam in (0, 1):
            if values.get(2 * i + fam) == 1:
                in_flow[fam][e.head] = e
    paths = []
    for fam, sinks in ((0, fg.z), (1, fg.p)):
        for s in sinks:
            path = [s]
            cur = s
            while True:
                e = in_flow[fam][cur]
                if e.kind == "source":
                    break
                cur = e.tail
                path.append(cur)
            paths.append(tuple(reversed(path)))
    return paths


def brute_force_path_system(
    G: LatentDigraph,
    g1_edges: Iterable[tuple[str, str]],
    z: Iterable[str],
    p: Iterable[str],
    ya: Iterable[str],
) -> bool:
    """Exhaustive path-system search for small instances (|V| <= 10).

    Enumerates every assignment of sources to sinks and every node-disjoint
    combination of simple paths, with Z-paths confined to the restricted
    edges.  Used as an oracle against has_path_system.
    """
    if len(G.nodes) > 10:
        raise GraphError("brute force is limited to graphs with at most 10 nodes")
    d1 = _check_d1(G, g1_edges)
    zt, pt, yt = _check_query(G, z, p, ya)
    d1_children = {
        v: tuple(w for w in G.children(v) if (v, w) in d1) for v in G.nodes
    }
    sinks = [(s, True) for s in zt] + [(s, False) for s in pt]

    def rec(k: int, used: frozenset) -> bool:
        if k == len(sinks):
            return True
        sink, restricted = sinks[k]
        children = d1_children if restricted else G._children
        for y in yt:
            if y in used:
                continue
            for path in _simple_paths(children, y, sink, used):
                if rec(k + 1, used | frozenset(path)):
                    return True
        return False

    return rec(0, frozenset())


def _simple_paths(
    children: dict, s: str, t: str, blocked: frozenset
) -> Iterator[tuple[str, ...]]:
    if s in blocked or t in blocked:
        return
    path = [s]
    on = {s}

    def rec(u: str) -> Iterator[tuple[str, ...]]:
        if u == t:
            yield tuple(path)
            return
        for w in children[u]:
            if w in blocked or w in on:
                continue
            path.append(w)
            on.add(w)
            yield from rec(w)
            path.pop()
            on.remove(w)

    yield from rec(s)


# -- the doubled graph and trek systems -----------------------------------


def build_glp(G: LatentDigraph) -> tuple[LatentDigraph, frozenset]:
    """Construct the doubled graph for trek-system queries.

    Every node v gains a primed copy v'; the unprimed copy carries the
    latent-subgraph edges reversed, a bridge v -> v' joins the copies, and
    the primed copy carries all edges of G forward.  A directed path from
    an unprimed y to a primed w' then crosses the bridge exactly once and
    spells out a trek from y to w: reversed prefix = left part, primed
    suffix = right part.  The returned edge subset (reversed edges, all
    bridges, primed latent-subgraph edges) confines the paths that must
    correspond to treks lying entirely in the latent subgraph.

    Args:
        G: Host graph; node names must not end with the prime marker.

    Returns:
        (doubled graph, restricted edge subset).  The doubled graph lists
        all nodes as observed; it is acyclic whenever G is.
    """
    for v in G.nodes:
        if v.endswith("'"):
            raise GraphError(f"node name {v!r} collides with the prime marker")
    edges: list[tuple[str, str]] = []
    d1: set[tuple[str, str]] = set()
    for u, w in G.edges:
        if G.is_latent(u):
            edges.append((w, u))
            d1.add((w, u))
    for v in G.nodes:
        e = (v, v + "'")
        edges.append(e)
        d1.add(e)
    for u, w in G.edges:
        e = (u + "'", w + "'")
        edges.append(e)
        if G.is_latent(u):
            d1.add(e)
    nodes = list(G.nodes) + [v + "'" for v in G.nodes]
    return LatentDigraph(nodes, [], edges), frozenset(d1)


@dataclass(frozen=True)
class TrekSystemResult:
    """Answer to one trek-system query.

    Attributes:
        found: Whether a qualifying trek system exists.
        certain: False only when a node budget ran out undecided.
        system: Witness trek system (sinks in Z order then P order), or
            None.
        method: The stage of the underlying path query that decided.
    """

    found: bool
    certain: bool
    system: Optional[TrekSystem]
    method: str

    def __bool__(self) -> bool:
        return self.found


def has_trek_system(
    G: LatentDigraph,
    z: Iterable[str],
    p: Iterable[str],
    ya: Iterable[str],
    stats: Optional[FlowStats] = None,
    node_budget: Optional[int] = None,
) -> TrekSystemResult:
    """Decide whether treks with no sided intersection run from within Ya
    onto Z and P.

    Every trek's left part must stay in the latent subgraph, and both
    parts of treks ending in Z must.  Decided via the doubled graph: sink
    nodes are primed, sources stay unprimed, path disjointness there is
    exactly sided disjointness here.

    Args:
        G: Host graph.
        z: Sinks whose treks lie entirely in the latent subgraph.
        p: Sinks with unrestricted right parts.
        ya: Allowed trek sources.
        stats: Optional counter accumulator.
        node_budget: Optional branch-and-bound node cap.

    Returns:
        The query result with a witness TrekSystem on success.
    """
    glp, d1 = build_glp(G)
    res = has_path_system(
        glp,
        d1,
        [v + "'" for v in z],
        [v + "'" for v in p],
        ya,
        stats=stats,
        node_budget=node_budget,
    )
    system = None
    if res.found:
        treks = []
        for path in res.paths:
            k = next(i for i, q in enumerate(path) if q.endswith("'"))
            left = tuple(reversed(path[:k]))
            right = tuple(q[:-1] for q in path[k:])
            treks.append(Trek(left=left, right=right))
        system = TrekSystem(tuple(treks))
    return TrekSystemResult(res.found, res.certain, system, res.method)


def brute_force_trek_system(
    G: LatentDigraph,
    z: Iterable[str],
    p: Iterable[str],
    ya: Iterable[str],
) -> bool:
    """Exhaustive trek-system search on small acyclic graphs.

    Enumerates all treks per sink (left parts confined to the latent
    subgraph, and right parts too for Z-sinks) and backtracks over
    combinations with pairwise disjoint left parts and pairwise disjoint
    right parts.  Used as an oracle against has_trek_system.
    """
    if not G.is_acyclic():
        raise GraphError("the exhaustive trek search needs an acyclic graph")
    if len(G.nodes) > 10:
        raise GraphError("the exhaustive trek search is limited to 10 nodes")
    dlat = frozenset(e for e in G.edges if G.is_latent(e[0]))
    zt, pt, yt = _check_query(G, z, p, ya)
    sinks = [(s, True) for s in zt] + [(s, False) for s in pt]

    candidates = []
    for sink, restricted in sinks:
        pool = []
        for y in yt:
            for trek in enumerate_treks(G, y, sink):
                if not set(zip(trek.left, trek.left[1:])) <= dlat:
                    continue
                if restricted and not set(zip(trek.right, trek.right[1:])) <= dlat:
                    continue
                pool.append(trek)
        candidates.append(pool)

    def rec(k: int, used_l: frozenset, used_r: frozenset) -> bool:
        if k == len(sinks):
            return True
        for trek in candidates[k]:
            lpart = frozenset(trek.left)
            rpart = frozenset(trek.right)
            if lpart & used_l or rpart & used_r:
                continue
            if rec(k + 1, used_l | lpart, used_r | rpart):
                return True
        return False

    return rec(0, frozenset(), frozenset())
