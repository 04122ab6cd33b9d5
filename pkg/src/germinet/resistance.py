"""Per-edge effective resistances, exact or sampled.

Two routes produce the same map:

* exact: resistances from the Laplacian pseudoinverse. Small graphs go
  through a dense pseudoinverse; larger ones fall back to one conjugate
  gradient solve per edge.
* sampled: the resistance of an edge equals the probability that the edge
  appears in a uniform random spanning tree, so it is estimated as the
  occurrence fraction over a Monte Carlo sample of trees (Wilson's
  loop-erased-random-walk sampler, which is exactly uniform).

Only edge-incident resistances are stored; that is all the greedy growth
stage ever reads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DataError
from .graph import Graph, LaplacianSystem, build_graph

DENSE_SOLVE_LIMIT = 2000
DEFAULT_NUM_TREES = 2000


@dataclass
class EdgeResistanceMap:
    """Sparse per-edge resistances aligned with the graph's canonical edge list."""

    graph: Graph
    values: np.ndarray
    method: str  # "exact" | "sampled"
    num_trees: int | None = None
    seed: int | None = None

    def resistance(self, u: int, v: int) -> float:
        idx = self.graph.edge_index(u, v)
        if idx < 0:
            raise KeyError(f"resistance not stored: ({u}, {v}) is not an edge")
        return float(self.values[idx])

    def slot_values(self) -> np.ndarray:
        """Resistances aligned with the directed CSR slots (length 2m)."""
        return self.values[self.graph.edge_slot]

    def total(self) -> float:
        return float(self.values.sum())


@dataclass
class SpanningTreeSample:
    """One spanning tree, parent-pointer encoded (parents[root] == -1)."""

    parents: np.ndarray
    root: int
    seed: int

    def edges(self) -> list[tuple[int, int]]:
        return [
            (min(v, int(p)), max(v, int(p)))
            for v, p in enumerate(self.parents)
            if p >= 0
        ]


def _dense_pseudoinverse(g: Graph) -> np.ndarray:
    adj = g.adjacency_matrix().toarray()
    lap = np.diag(g.degrees.astype(np.float64)) - adj
    return np.linalg.pinv(lap)


def _exact_values_dense(g: Graph) -> np.ndarray:
    lp = _dense_pseudoinverse(g)
    u, v = g.edges_u, g.edges_v
    return lp[u, u] + lp[v, v] - 2.0 * lp[u, v]


def _exact_values_cg(g: Graph, tol: float) -> np.ndarray:
    sys = LaplacianSystem(g, tol=tol)
    values = np.empty(g.m)
    b = np.zeros(g.n)
    for i in range(g.m):
        u, v = int(g.edges_u[i]), int(g.edges_v[i])
        b[u], b[v] = 1.0, -1.0
        p = sys.solve(b)
        values[i] = p[u] - p[v]
        b[u] = b[v] = 0.0
    return values


def exact_edge_resistances(
    g: Graph,
    *,
    dense_limit: int = DENSE_SOLVE_LIMIT,
    tol: float = 1e-8,
    on_disconnected: str = "error",
) -> EdgeResistanceMap:
    """Exact effective resistance of every edge.

    Args:
        g: the graph (connected, unless on_disconnected="components").
        dense_limit: component size up to which the dense pseudoinverse
            route is used; above it, one CG solve per edge.
        on_disconnected: "error" to reject disconnected input, or
            "components" to compute each component independently.
    """
    if g.is_connected():
        values = _exact_values_dense(g) if g.n <= dense_limit else _exact_values_cg(g, tol)
    elif on_disconnected != "components":
        raise DataError("graph is disconnected; pass on_disconnected='components'")
    else:
        values = np.empty(g.m)
        labels = g.component_labels()
        for c in range(labels.max() + 1):
            nodes = np.flatnonzero(labels == c)
            if len(nodes) < 2:
                continue
            sub, edge_ids = _component_subgraph(g, nodes)
            sub_map = exact_edge_resistances(sub, dense_limit=dense_limit, tol=tol)
            values[edge_ids] = sub_map.values
    # True edge resistances lie in (0, 1]; shave float noise off the top and
    # snap to a 1e-12 grid so structurally identical edges compare equal
    # (the greedy growth tie-breaks on exact value ties).
    np.minimum(values, 1.0, out=values)
    np.round(values, 12, out=values)
    return EdgeResistanceMap(g, values, "exact")


def _component_subgraph(g: Graph, nodes: np.ndarray) -> tuple[Graph, np.ndarray]:
    """Induced subgraph of one component plus parent-graph edge indices,
    aligned with the subgraph's canonical edge order."""
    mask = np.zeros(g.n, dtype=bool)
    mask[nodes] = True
    keep = mask[g.edges_u]  # component edges have both endpoints inside
    sub = build_graph(np.stack([g.edges_u[keep], g.edges_v[keep]], axis=1))
    edge_ids = np.flatnonzero(keep)
    # build_graph sorts canonically; parent edges restricted to a component
    # keep their relative lexicographic order, so the alignment holds.
    return sub, edge_ids


@njit(cache=True)
def _wilson_fill_tree(indptr, targets, slots, in_tree):
    """Sample one uniform spanning tree; fills slots[v] with the CSR slot of
    v's tree arrow. Returns the root. Last-exit arrows overwritten during the
    walk implement the loop erasure."""
    n = len(indptr) - 1
    for i in range(n):
        in_tree[i] = 0
        slots[i] = -1
    root = np.random.randint(0, n)
    in_tree[root] = 1
    for start in range(n):
        u = start
        while not in_tree[u]:
            lo = indptr[u]
            deg = indptr[u + 1] - lo
            k = lo + np.random.randint(0, deg)
            slots[u] = k
            u = targets[k]
        u = start
        while not in_tree[u]:
            in_tree[u] = 1
            u = targets[slots[u]]
    return root


@njit(cache=True)
def _wilson_single(indptr, targets, slots, in_tree, seed):
    np.random.seed(seed)
    return _wilson_fill_tree(indptr, targets, slots, in_tree)


@njit(cache=True)
def _wilson_edge_counts(indptr, targets, edge_slot, m, num_trees, seed):
    n = len(indptr) - 1
    counts = np.zeros(m, np.int64)
    slots = np.empty(n, np.int64)
    in_tree = np.zeros(n, np.uint8)
    np.random.seed(seed)
    for _ in range(num_trees):
        root = _wilson_fill_tree(indptr, targets, slots, in_tree)
        for v in range(n):
            if v != root:
                counts[edge_slot[slots[v]]] += 1
    return counts


def _kernel_seed(rng_seed) -> int:
    return int(np.random.SeedSequence(rng_seed).generate_state(1)[0])


def sample_spanning_tree(g: Graph, rng_state) -> SpanningTreeSample:
    """Draw one spanning tree from the uniform distribution.

    rng_state is an integer seed (or anything SeedSequence accepts).
    """
    if not g.is_connected():
        raise DataError("cannot sample a spanning tree of a disconnected graph")
    seed = _kernel_seed(rng_state)
    slots = np.empty(g.n, dtype=np.int64)
    in_tree = np.zeros(g.n, dtype=np.uint8)
    root = _wilson_single(g.indptr, g.targets, slots, in_tree, seed)
    parents = np.full(g.n, -1, dtype=np.int64)
    for v in range(g.n):
        if v != root:
            parents[v] = g.targets[slots[v]]
    return SpanningTreeSample(parents, int(root), seed)


def sampled_edge_resistances(g: Graph, num_trees: int = DEFAULT_NUM_TREES, rng_seed=0) -> EdgeResistanceMap:
    """Estimate edge resistances as spanning tree occurrence fractions.

    Estimates of 0 (edge never seen) are floored at 1/(2*num_trees) so the
    map stays strictly positive; the greedy stage takes minima over it.
    """
    if num_trees < 1:
        raise DataError("num_trees must be >= 1")
    if not g.is_connected():
        raise DataError("cannot sample spanning trees of a disconnected graph")
    seed = _kernel_seed(rng_seed)
    counts = _wilson_edge_counts(g.indptr, g.targets, g.edge_slot, g.m, num_trees, seed)
    values = counts / float(num_trees)
    np.maximum(values, 1.0 / (2.0 * num_trees), out=values)
    return EdgeResistanceMap(g, values, "sampled", num_trees=num_trees, seed=int(rng_seed))


def commute_time(rmap: EdgeResistanceMap, u: int, v: int) -> float:
    """Expected round-trip time of a random walk between edge endpoints:
    twice the edge count times the effective resistance."""
    return 2.0 * rmap.graph.m * rmap.resistance(u, v)


def write_resistance_tsv(rmap: EdgeResistanceMap, path) -> None:
    """Serialize to TSV: one header line, then 'u<TAB>v<TAB>r' per edge in
    original node ids (u < v); 17 significant digits round-trip exactly."""
    g = rmap.graph
    with open(path, "w", encoding="utf-8") as fh:
        if rmap.method == "sampled":
            fh.write(f"# method=sampled trees={rmap.num_trees} seed={rmap.seed}\n")
        else:
            fh.write("# method=exact\n")
        for i in range(g.m):
            a = int(g.original_ids[g.edges_u[i]])
            b = int(g.original_ids[g.edges_v[i]])
            if a > b:
                a, b = b, a
            fh.write(f"{a}\t{b}\t{rmap.values[i]:.17g}\n")


def read_resistance_tsv(path, g: Graph) -> EdgeResistanceMap:
    """Load a resistance map written by write_resistance_tsv for graph g."""
    values = np.full(g.m, np.nan)
    method, num_trees, seed = "exact", None, None
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.startswith("#"):
            fields = dict(
                part.split("=", 1) for part in header[1:].split() if "=" in part
            )
            method = fields.get("method", "exact")
            if "trees" in fields:
                num_trees = int(fields["trees"])
            if "seed" in fields:
                seed = int(fields["seed"])
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            a_s, b_s, r_s = line.split("\t")
            u = g.id_map.get(int(a_s))
            v = g.id_map.get(int(b_s))
            if u is None or v is None:
                raise DataError(f"{path}:{lineno}: unknown node id")
            idx = g.edge_index(u, v)
            if idx < 0:
                raise DataError(f"{path}:{lineno}: ({a_s}, {b_s}) is not an edge")
            values[idx] = float(r_s)
    if np.isnan(values).any():
        raise DataError("resistance file does not cover every edge")
    return EdgeResistanceMap(g, values, method, num_trees=num_trees, seed=seed)
