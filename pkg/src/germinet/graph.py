"""Undirected, unweighted graph storage and Laplacian solves.

Graphs are stored CSR-style (offsets + sorted neighbor lists) so that edge
membership queries are a binary search and per-node neighborhoods are array
slices. Node ids are dense integers 0..n-1; the mapping back to the ids seen
in the input is retained for file-based workflows.
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import DataError, SingularSystemError, SolverError

logger = logging.getLogger(__name__)


class Graph:
    """Immutable simple graph over nodes 0..n-1.

    Attributes:
        n: number of nodes.
        m: number of undirected edges.
        indptr, targets: CSR adjacency; neighbors of v are
            targets[indptr[v]:indptr[v+1]], sorted ascending.
        degrees: per-node degree array.
        edges_u, edges_v: canonical edge list with edges_u < edges_v,
            sorted lexicographically; edge index i refers to this list.
        edge_slot: for every directed adjacency slot, the index of its
            undirected edge in (edges_u, edges_v).
        original_ids: new id -> id seen in the input.
    """

    def __init__(self, indptr, targets, edges_u, edges_v, edge_slot, original_ids):
        self.indptr = indptr
        self.targets = targets
        self.edges_u = edges_u
        self.edges_v = edges_v
        self.edge_slot = edge_slot
        self.original_ids = original_ids
        self.n = len(indptr) - 1
        self.m = len(edges_u)
        self.degrees = np.diff(indptr)
        self.id_map = {int(old): new for new, old in enumerate(original_ids)}
        self._adjacency = None
        self._component_labels = None

    def neighbors(self, v: int) -> np.ndarray:
        return self.targets[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_index(u, v) >= 0

    def edge_index(self, u: int, v: int) -> int:
        """Index of undirected edge (u,v) in the canonical list, or -1."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        pos = lo + np.searchsorted(self.targets[lo:hi], v)
        if pos < hi and self.targets[pos] == v:
            return int(self.edge_slot[pos])
        return -1

    def adjacency_matrix(self) -> sp.csr_matrix:
        if self._adjacency is None:
            data = np.ones(len(self.targets))
            self._adjacency = sp.csr_matrix(
                (data, self.targets, self.indptr), shape=(self.n, self.n)
            )
        return self._adjacency

    def component_labels(self) -> np.ndarray:
        if self._component_labels is None:
            if self.n == 0:
                self._component_labels = np.empty(0, dtype=np.int64)
            else:
                _, labels = connected_components(self.adjacency_matrix(), directed=False)
                self._component_labels = labels
        return self._component_labels

    def is_connected(self) -> bool:
        return self.n <= 1 or self.component_labels().max() == 0

    def component_of(self, v: int) -> np.ndarray:
        """Node ids of the connected component containing v."""
        labels = self.component_labels()
        return np.flatnonzero(labels == labels[v])

    def to_original_ids(self, nodes: Iterable[int]) -> list[int]:
        return [int(self.original_ids[v]) for v in nodes]

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(edge_list: Sequence[tuple[int, int]]) -> Graph:
    """Build a Graph from an iterable of (u, v) pairs.

    Self-loops and duplicate edges are dropped, and node ids are compacted
    to 0..n-1 (the old->new mapping is kept on the graph). The cleaning is
    silent apart from a log line, matching how raw edge-list files are
    usually consumed.
    """
    arr = np.asarray(list(edge_list), dtype=np.int64)
    if arr.size == 0:
        raise DataError("empty graph: no edges provided")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DataError("edge list must be pairs of node ids")
    if (arr < 0).any():
        raise DataError("negative node id in edge list")

    loops = arr[:, 0] == arr[:, 1]
    n_loops = int(loops.sum())
    arr = arr[~loops]
    if len(arr) == 0:
        raise DataError("empty graph: all edges were self-loops")

    ids = np.unique(arr)
    compact = np.searchsorted(ids, arr)
    lo = np.minimum(compact[:, 0], compact[:, 1])
    hi = np.maximum(compact[:, 0], compact[:, 1])
    edges = np.unique(np.stack([lo, hi], axis=1), axis=0)
    n_dups = len(arr) - len(edges)
    if n_loops or n_dups:
        logger.info(
            "edge list cleaned: %d self-loops and %d duplicate edges removed",
            n_loops,
            n_dups,
        )

    n = len(ids)
    m = len(edges)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    eid = np.concatenate([np.arange(m), np.arange(m)])
    order = np.lexsort((dst, src))
    targets = dst[order]
    edge_slot = eid[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])

    return Graph(indptr, targets, edges[:, 0].copy(), edges[:, 1].copy(), edge_slot, ids)


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> Graph:
    """Subgraph induced by the node set.

    The subgraph's original_ids are the parent graph's node ids. Nodes with
    no edge inside the set do not appear (the edge list defines the node
    set), which cannot happen when the set is a connected component.
    """
    mask = np.zeros(g.n, dtype=bool)
    mask[np.asarray(list(nodes), dtype=np.int64)] = True
    keep = mask[g.edges_u] & mask[g.edges_v]
    if not keep.any():
        raise DataError("empty graph: induced subgraph has no edges")
    return build_graph(np.stack([g.edges_u[keep], g.edges_v[keep]], axis=1))


def check_node_set(g: Graph, nodes: Sequence[int]) -> list[int]:
    """Validate a node set against g: unique ids within range."""
    out = [int(v) for v in nodes]
    if any(v < 0 or v >= g.n for v in out):
        raise DataError(f"node id out of range 0..{g.n - 1}")
    if len(set(out)) != len(out):
        raise DataError("duplicate node ids in node set")
    return out


def volume(g: Graph, nodes: Sequence[int]) -> int:
    """Sum of degrees over the node set."""
    nodes = check_node_set(g, nodes)
    if not nodes:
        return 0
    return int(g.degrees[np.asarray(nodes, dtype=np.int64)].sum())


def cut_size(g: Graph, nodes: Sequence[int]) -> int:
    """Number of edges with exactly one endpoint in the node set."""
    nodes = check_node_set(g, nodes)
    mask = np.zeros(g.n, dtype=bool)
    mask[nodes] = True
    cut = 0
    for v in nodes:
        cut += int(np.count_nonzero(~mask[g.neighbors(v)]))
    return cut


class LaplacianSystem:
    """Solves L x = b on a graph, L being the degree-minus-adjacency form.

    The solver is Jacobi-preconditioned conjugate gradient with a mean-zero
    projection (per connected component) applied every iteration, so the
    returned solution is the minimum-norm one. Each solve allocates its own
    workspace; concurrent solves on one system are safe.
    """

    def __init__(self, g: Graph, tol: float = 1e-8, max_iter: int = 20000):
        self.graph = g
        self.tol = tol
        self.max_iter = max_iter
        self._adj = g.adjacency_matrix()
        self._inv_deg = 1.0 / np.maximum(g.degrees, 1)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Laplacian action: degree scaling minus neighbor sum."""
        return self.graph.degrees * x - self._adj @ x

    def incidence_matrix(self) -> sp.csr_matrix:
        """Signed edge-node incidence (one row per edge, +1 at the lower
        endpoint, -1 at the higher); its Gram matrix equals the Laplacian."""
        g = self.graph
        rows = np.repeat(np.arange(g.m), 2)
        cols = np.empty(2 * g.m, dtype=np.int64)
        cols[0::2] = g.edges_u
        cols[1::2] = g.edges_v
        data = np.tile([1.0, -1.0], g.m)
        return sp.csr_matrix((data, (rows, cols)), shape=(g.m, g.n))

    def solve(self, b: np.ndarray, tol: float | None = None) -> np.ndarray:
        """Minimum-norm solution of L x = b.

        Raises ValueError when b does not sum to zero on every connected
        component it touches (such a b is outside the Laplacian's range),
        and SolverError when CG fails to reach the residual tolerance.
        """
        g = self.graph
        b = np.asarray(b, dtype=np.float64)
        if b.shape != (g.n,):
            raise ValueError(f"right-hand side must have length {g.n}")
        tol = self.tol if tol is None else tol

        labels = g.component_labels()
        n_comp = int(labels.max()) + 1 if g.n else 0
        scale = max(float(np.abs(b).max()), 1.0)
        comp_sums = np.bincount(labels, weights=b, minlength=n_comp)
        if np.abs(comp_sums).max() > 1e-9 * scale:
            if n_comp > 1 and abs(b.sum()) <= 1e-9 * scale:
                raise SingularSystemError(
                    "singular system: right-hand side spans disconnected components"
                )
            raise ValueError("right-hand side must sum to zero (contract violation)")

        comp_counts = np.bincount(labels, minlength=n_comp).astype(np.float64)

        def project(x):
            means = np.bincount(labels, weights=x, minlength=n_comp) / comp_counts
            x -= means[labels]

        x = np.zeros(g.n)
        r = b.copy()
        z = r * self._inv_deg
        p = z.copy()
        rz = float(r @ z)
        for _ in range(self.max_iter):
            if np.abs(r).max() <= tol:
                break
            ap = self.apply(p)
            pap = float(p @ ap)
            if pap <= 0.0:
                break
            alpha = rz / pap
            x += alpha * p
            r -= alpha * ap
            project(x)
            z = r * self._inv_deg
            rz_new = float(r @ z)
            p = z + (rz_new / rz) * p
            rz = rz_new
        residual = b - self.apply(x)
        if np.abs(residual).max() > tol:
            raise SolverError(
                f"laplacian solve did not converge: residual {np.abs(residual).max():.3e}"
            )
        project(x)
        return x


def laplacian_solve(sys: LaplacianSystem, b: np.ndarray) -> np.ndarray:
    """Functional form of LaplacianSystem.solve."""
    return sys.solve(b)
