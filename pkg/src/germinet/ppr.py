"""Personalized PageRank score vectors and the conductance sweep cut.

Both backends target the same fixed point
    x = alpha * s + (1 - alpha) * W x
for the half-lazy walk W x = (x + A D^{-1} x) / 2 and the uniform seed
distribution s. Power iteration computes it globally; the residual-push
backend approximates it locally, touching only nodes whose residual exceeds
epsilon times their degree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DataError, SolverError
from .graph import Graph, check_node_set
from .scoring import GrowingCut, SweepProfile, detect_first_local_min

DEFAULT_ALPHA = 0.15
DEFAULT_POWER_TOL = 1e-10
DEFAULT_PUSH_EPSILON = 1e-7
MAX_POWER_ITERATIONS = 10000
PPR_SWEEP_RISE = 0.20


@dataclass
class ScoreVector:
    scores: np.ndarray
    alpha: float
    seeds: list[int]
    backend: str  # "seed" | "power" | "push"
    tol: float | None = None
    epsilon: float | None = None

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for v, score in enumerate(self.scores):
                fh.write(f"{v}\t{score:.17g}\n")


def seed_vector(g: Graph, seeds) -> ScoreVector:
    """Uniform mass 1/|seeds| on the seeds, zero elsewhere."""
    seeds = check_node_set(g, seeds)
    if not seeds:
        raise DataError("seed set must be nonempty")
    x = np.zeros(g.n)
    x[np.asarray(seeds, dtype=np.int64)] = 1.0 / len(seeds)
    return ScoreVector(x, alpha=1.0, seeds=list(seeds), backend="seed")


def _check_seed_component(g: Graph, seeds) -> list[int]:
    seeds = check_node_set(g, seeds)
    if not seeds:
        raise DataError("seed set must be nonempty")
    labels = g.component_labels()
    if len({int(labels[s]) for s in seeds}) > 1:
        raise DataError("seeds span multiple connected components")
    return seeds


def ppr_power_iteration(
    g: Graph,
    seeds,
    alpha: float = DEFAULT_ALPHA,
    tol: float = DEFAULT_POWER_TOL,
    max_iter: int = MAX_POWER_ITERATIONS,
) -> ScoreVector:
    """Power iteration until the L1 change between iterates drops below tol.

    alpha = 1 degenerates to the seed vector exactly.
    """
    if not (0.0 < alpha <= 1.0):
        raise DataError("alpha must be in (0, 1]")
    seeds = _check_seed_component(g, seeds)
    s = np.zeros(g.n)
    s[np.asarray(seeds, dtype=np.int64)] = 1.0 / len(seeds)
    adj = g.adjacency_matrix()
    inv_deg = 1.0 / g.degrees
    x = s.copy()
    for _ in range(max_iter):
        walked = 0.5 * (x + adj @ (x * inv_deg))
        x_next = alpha * s + (1.0 - alpha) * walked
        delta = float(np.abs(x_next - x).sum())
        x = x_next
        if delta < tol:
            return ScoreVector(x, alpha=alpha, seeds=seeds, backend="power", tol=tol)
    raise SolverError(f"power iteration did not converge within {max_iter} iterations")


def ppr_push(
    g: Graph,
    seeds,
    alpha: float = DEFAULT_ALPHA,
    epsilon: float = DEFAULT_PUSH_EPSILON,
    max_pushes: int = 50_000_000,
) -> ScoreVector:
    """Residual-push approximation of the same fixed point.

    Terminates when every node's residual is below epsilon * degree, which
    bounds the per-entry shortfall of the returned scores by the total
    leftover residual. The touched-node count depends on alpha and epsilon,
    not on the graph size.
    """
    if not (0.0 < alpha < 1.0):
        raise DataError("alpha must be in (0, 1) for the push backend")
    if epsilon <= 0.0:
        raise DataError("epsilon must be positive")
    seeds = _check_seed_component(g, seeds)
    p = np.zeros(g.n)
    r = np.zeros(g.n)
    r[np.asarray(seeds, dtype=np.int64)] = 1.0 / len(seeds)
    thresh = epsilon * g.degrees
    queue = deque(v for v in seeds if r[v] >= thresh[v])
    queued = np.zeros(g.n, dtype=bool)
    for v in queue:
        queued[v] = True
    pushes = 0
    while queue:
        u = queue.popleft()
        queued[u] = False
        ru = r[u]
        if ru < thresh[u]:
            continue
        p[u] += alpha * ru
        rest = (1.0 - alpha) * ru
        r[u] = 0.5 * rest
        share = 0.5 * rest / g.degree(u)
        for v in g.neighbors(u):
            r[v] += share
            if not queued[v] and r[v] >= thresh[v]:
                queue.append(v)
                queued[v] = True
        if not queued[u] and r[u] >= thresh[u]:
            queue.append(u)
            queued[u] = True
        pushes += 1
        if pushes > max_pushes:
            raise SolverError("push budget exhausted; raise epsilon or max_pushes")
    return ScoreVector(p, alpha=alpha, seeds=seeds, backend="push", epsilon=epsilon)


def ppr_sweep(
    g: Graph,
    x: ScoreVector,
    seeds,
    rise_threshold: float = PPR_SWEEP_RISE,
    mode: str = "local",
    degree_normalized: bool = False,
) -> tuple[list[int], SweepProfile]:
    """Sweep the score ranking for the best-conductance prefix.

    The ordering lists the seeds first, then the remaining positive-score
    nodes by descending score (optionally score/degree), ties broken by node
    id. mode "local" stops at the first local minimum that later rises by
    rise_threshold, falling back to the global minimum prefix when none
    qualifies; mode "global" takes the global minimum directly.
    """
    if mode not in ("local", "global"):
        raise DataError(f"unknown sweep mode: {mode}")
    if len(x.scores) != g.n:
        raise DataError("score vector does not match graph")
    seeds = check_node_set(g, seeds)
    if not np.any(x.scores > 0):
        raise DataError("all-zero score vector")

    seed_mask = np.zeros(g.n, dtype=bool)
    seed_mask[np.asarray(seeds, dtype=np.int64)] = True
    rank = x.scores / g.degrees if degree_normalized else x.scores
    rest = [int(v) for v in np.flatnonzero(~seed_mask & (x.scores > 0))]
    rest.sort(key=lambda v: (-rank[v], v))
    ordering = list(seeds) + rest

    cut = GrowingCut(g)
    scores: list[float] = []
    for v in ordering:
        cut.add(v)
        c = cut.conductance()
        if c is None:
            break  # prefix reached the whole graph; sweep ends
        scores.append(c)
    if not scores:
        raise DataError("sweep has no scoreable prefix")

    selected = None
    if mode == "local":
        selected = detect_first_local_min(
            scores, rise_threshold, min_prefix=len(seeds) + 1
        )
    if selected is None:
        selected = int(np.argmin(scores))
    profile = SweepProfile(ordering, scores, offset=1, selected=selected)
    community = ordering[: selected + 1]
    return community, profile
