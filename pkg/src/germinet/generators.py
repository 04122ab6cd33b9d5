"""Synthetic benchmark graphs with planted ground-truth communities.

Two families: a stochastic block model whose block-pair probabilities may be
nested hierarchically, and a power-law benchmark in the LFR style, built as
a configuration-model approximation (degree and community-size power laws
plus a mixing fraction of inter-community stubs). Both are deterministic
given their seed, and both guarantee every node ends up with at least one
edge so the planted communities partition the node set exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import Graph, build_graph

logger = logging.getLogger(__name__)

MAX_GENERATION_ATTEMPTS = 25
PAIRING_ROUNDS = 30
CONNECTIVITY_RETRIES = 10


@dataclass
class PlantedGraph:
    graph: Graph
    communities: list[list[int]]
    params: dict


def hsbm_probability_matrix(levels: int, branching: int, p_levels) -> np.ndarray:
    """Nested block-pair probability matrix.

    p_levels[0] is the within-block probability and p_levels[k] applies to
    block pairs whose deepest common ancestor in the block hierarchy is k
    levels up, so len(p_levels) == levels + 1. Probabilities normally
    decrease with k, giving the familiar blocks-within-blocks picture.
    """
    p_levels = list(p_levels)
    if len(p_levels) != levels + 1:
        raise DataError("p_levels must have one entry per hierarchy level + 1")
    blocks = branching**levels
    mat = np.empty((blocks, blocks))
    for i in range(blocks):
        for j in range(blocks):
            if i == j:
                mat[i, j] = p_levels[0]
                continue
            span = blocks
            dist = levels
            a, b = i, j
            while span > branching:
                span //= branching
                if a // span != b // span:
                    break
                a %= span
                b %= span
                dist -= 1
            mat[i, j] = p_levels[dist]
    return mat


def generate_hsbm(block_sizes, prob_matrix, rng_seed=0) -> PlantedGraph:
    """Sample a (hierarchical) stochastic block model realization.

    Every node pair is an edge independently with its block-pair
    probability; ground truth communities are the blocks. Realizations with
    isolated nodes are resampled a bounded number of times so the planted
    communities always partition the node set.
    """
    sizes = [int(s) for s in block_sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise DataError("block sizes must be positive")
    mat = np.asarray(prob_matrix, dtype=np.float64)
    if mat.shape != (len(sizes), len(sizes)):
        raise DataError("probability matrix must be square with one row per block")
    if not np.array_equal(mat, mat.T):
        raise DataError("probability matrix must be symmetric")
    if (mat < 0).any() or (mat > 1).any():
        raise DataError("probabilities must lie in [0, 1]")

    n = sum(sizes)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rng = np.random.default_rng(rng_seed)
    for attempt in range(MAX_GENERATION_ATTEMPTS):
        rows, cols = [], []
        for i in range(len(sizes)):
            for j in range(i, len(sizes)):
                p = mat[i, j]
                if p <= 0.0:
                    continue
                if i == j:
                    iu, iv = np.triu_indices(sizes[i], k=1)
                    mask = rng.random(len(iu)) < p
                    rows.append(iu[mask] + offsets[i])
                    cols.append(iv[mask] + offsets[i])
                else:
                    hit = rng.random((sizes[i], sizes[j])) < p
                    r, c = np.nonzero(hit)
                    rows.append(r + offsets[i])
                    cols.append(c + offsets[j])
        src = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
        dst = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
        present = np.zeros(n, dtype=bool)
        present[src] = True
        present[dst] = True
        if present.all():
            graph = build_graph(np.stack([src, dst], axis=1))
            communities = [
                list(range(offsets[i], offsets[i + 1])) for i in range(len(sizes))
            ]
            params = {
                "kind": "hsbm",
                "block_sizes": sizes,
                "prob_matrix": mat.tolist(),
                "seed": int(rng_seed),
                "attempts": attempt + 1,
            }
            return PlantedGraph(graph, communities, params)
        logger.info("block model realization left isolated nodes; resampling")
    raise DataError(
        "block model kept producing isolated nodes; raise the probabilities"
    )


def _truncated_power_law(rng, size, exponent, lo, hi):
    """Continuous inverse-CDF samples of x^-exponent on [lo, hi]."""
    a = 1.0 - exponent
    u = rng.random(size)
    return (lo**a + u * (hi**a - lo**a)) ** (1.0 / a)


def _power_law_mean(exponent, lo, hi):
    a = 1.0 - exponent
    b = 2.0 - exponent
    if abs(b) < 1e-12:
        return a * (math.log(hi) - math.log(lo)) / (hi**a - lo**a)
    return (a / b) * (hi**b - lo**b) / (hi**a - lo**a)


def _solve_power_law_min(exponent, hi, target_mean):
    """Lower cutoff making the truncated power law hit the target mean."""
    lo, up = 1.0, float(hi)
    if _power_law_mean(exponent, lo, hi) > target_mean:
        raise DataError(
            f"avg_degree {target_mean} is below the distribution minimum "
            f"{_power_law_mean(exponent, lo, hi):.2f}; raise avg_degree or the exponent"
        )
    for _ in range(200):
        mid = 0.5 * (lo + up)
        if _power_law_mean(exponent, mid, hi) < target_mean:
            lo = mid
        else:
            up = mid
    return 0.5 * (lo + up)


def _sample_degrees(rng, n, exponent, avg_degree, max_degree):
    d_min = _solve_power_law_min(exponent, max_degree, avg_degree)
    raw = _truncated_power_law(rng, n, exponent, d_min, max_degree)
    frac, base = np.modf(raw)
    degrees = (base + (rng.random(n) < frac)).astype(np.int64)
    np.clip(degrees, 1, max_degree, out=degrees)
    if abs(degrees.mean() - avg_degree) > 0.1 * avg_degree:
        raise DataError("degree sampling missed the target mean by over 10%")
    return degrees


def _sample_community_sizes(rng, n, exponent, lo, hi):
    sizes = []
    total = 0
    while total < n:
        s = int(round(_truncated_power_law(rng, 1, exponent, lo, hi)[0]))
        s = min(max(s, lo), hi)
        sizes.append(s)
        total += s
    excess = total - n
    for i in range(len(sizes) - 1, -1, -1):
        if excess == 0:
            break
        take = min(excess, sizes[i] - lo)
        sizes[i] -= take
        excess -= take
    while excess >= lo and len(sizes) > 1:
        sizes.pop()
        excess -= lo
    if excess > 0:
        # everything sits at the minimum; drop one community and spread it
        if len(sizes) < 2:
            raise DataError("community size range cannot tile the node count")
        sizes.pop()
        deficit = lo - excess
        i = 0
        while deficit > 0:
            if sizes[i % len(sizes)] < hi:
                sizes[i % len(sizes)] += 1
                deficit -= 1
            i += 1
            if i > len(sizes) * (hi - lo + 1):
                raise DataError("community size range cannot tile the node count")
    return sizes


def _pair_stubs(rng, stubs, existing, same_community=None):
    """Configuration-model pairing with rejection of self-loops, repeated
    edges and (optionally) same-community pairs. Returns accepted edges;
    stubs that stay unmatchable after the retry rounds are discarded."""
    pool = np.asarray(stubs, dtype=np.int64)
    edges = []
    for _ in range(PAIRING_ROUNDS):
        if len(pool) < 2:
            break
        pool = rng.permutation(pool)
        rejected = []
        for i in range(0, len(pool) - 1, 2):
            a, b = int(pool[i]), int(pool[i + 1])
            key = (a, b) if a < b else (b, a)
            if (
                a == b
                or key in existing
                or (same_community is not None and same_community[a] == same_community[b])
            ):
                rejected.append(a)
                rejected.append(b)
            else:
                existing.add(key)
                edges.append(key)
        if len(pool) % 2:
            rejected.append(int(pool[-1]))
        pool = np.asarray(rejected, dtype=np.int64)
    if len(pool):
        logger.info("discarded %d unmatchable stubs", len(pool))
    return edges


def _drop_one_stub(rng, counts, members):
    """Remove one stub uniformly at random over the members' stub multiset."""
    weights = counts[members]
    total = int(weights.sum())
    pick = int(rng.integers(total))
    acc = 0
    for v, w in zip(members, weights):
        acc += int(w)
        if pick < acc:
            counts[v] -= 1
            return


def _connected(members, edge_list) -> bool:
    adj = {v: [] for v in members}
    for a, b in edge_list:
        adj[a].append(b)
        adj[b].append(a)
    seen = {members[0]}
    stack = [members[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(members)


def generate_lfr_like(
    n: int,
    degree_exponent: float = 2.5,
    community_exponent: float = 1.5,
    mixing_mu: float = 0.2,
    avg_degree: float = 10.0,
    max_degree: int = 50,
    community_size_range: tuple[int, int] = (20, 100),
    rng_seed=0,
) -> PlantedGraph:
    """Power-law benchmark graph with planted communities.

    Degrees and community sizes follow truncated power laws; each node gets
    ceil((1 - mu) * degree) intra-community stubs, the rest inter-community,
    and stubs are matched configuration-model style with rejection of
    self-loops, duplicates and (for inter stubs) same-community pairs.
    Communities whose intra edges come out disconnected are re-paired a few
    times. The realized mixing fraction tracks mu by construction.
    """
    if degree_exponent <= 1 or community_exponent <= 1:
        raise DataError("power law exponents must exceed 1")
    if not (0.0 < mixing_mu < 1.0):
        raise DataError("mixing_mu must lie strictly between 0 and 1")
    lo, hi = int(community_size_range[0]), int(community_size_range[1])
    if lo < 3 or hi < lo or lo > n:
        raise DataError("invalid community size range")
    if max_degree >= n or max_degree < 1:
        raise DataError("max_degree must lie in [1, n)")

    rng = np.random.default_rng(rng_seed)
    for attempt in range(MAX_GENERATION_ATTEMPTS):
        result = _generate_lfr_attempt(
            rng, n, degree_exponent, community_exponent, mixing_mu,
            avg_degree, max_degree, lo, hi,
        )
        if result is not None:
            edges, communities = result
            graph = build_graph(edges)
            params = {
                "kind": "lfr",
                "n": n,
                "degree_exponent": degree_exponent,
                "community_exponent": community_exponent,
                "mixing_mu": mixing_mu,
                "avg_degree": avg_degree,
                "max_degree": max_degree,
                "community_size_range": [lo, hi],
                "seed": int(rng_seed),
                "attempts": attempt + 1,
            }
            return PlantedGraph(graph, communities, params)
        logger.info("benchmark realization left isolated nodes; resampling")
    raise DataError("benchmark generation kept producing isolated nodes")


def _generate_lfr_attempt(
    rng, n, degree_exponent, community_exponent, mixing_mu, avg_degree,
    max_degree, lo, hi,
):
    degrees = _sample_degrees(rng, n, degree_exponent, avg_degree, max_degree)
    sizes = _sample_community_sizes(rng, n, community_exponent, lo, hi)
    intra_target = np.ceil((1.0 - mixing_mu) * degrees).astype(np.int64)
    if intra_target.max() > hi - 1:
        raise DataError(
            f"a node needs {int(intra_target.max())} intra-community edges but the "
            f"largest community holds {hi} nodes; raise the community sizes"
        )

    # place high-requirement nodes first, among communities with room
    comm_of = np.full(n, -1, dtype=np.int64)
    remaining = np.asarray(sizes, dtype=np.int64).copy()
    order = np.argsort(-intra_target, kind="stable")
    size_arr = np.asarray(sizes, dtype=np.int64)
    for v in order:
        ok = np.flatnonzero((remaining > 0) & (size_arr - 1 >= intra_target[v]))
        if len(ok) == 0:
            raise DataError(
                "no community large enough for a node's intra-degree requirement"
            )
        c = int(ok[rng.integers(len(ok))])
        comm_of[v] = c
        remaining[c] -= 1

    communities = [list(map(int, np.flatnonzero(comm_of == c))) for c in range(len(sizes))]
    existing: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []

    intra_counts = intra_target.copy()
    for members in communities:
        member_arr = np.asarray(members, dtype=np.int64)
        if int(intra_counts[member_arr].sum()) % 2 == 1:
            _drop_one_stub(rng, intra_counts, members)
        stubs = np.repeat(member_arr, intra_counts[member_arr])
        accepted = None
        for _ in range(CONNECTIVITY_RETRIES):
            trial_existing = set(existing)
            trial = _pair_stubs(rng, stubs, trial_existing)
            if _connected(members, trial):
                accepted = trial
                existing = trial_existing
                break
        if accepted is None:
            # keep the last try; detection restricts to components anyway
            existing.update(trial)
            accepted = trial
            logger.info("community of size %d stayed disconnected", len(members))
        edges.extend(accepted)

    inter_counts = degrees - intra_target
    if len(sizes) > 1:
        if int(inter_counts.sum()) % 2 == 1:
            _drop_one_stub(rng, inter_counts, list(range(n)))
        stubs = np.repeat(np.arange(n), inter_counts)
        edges.extend(_pair_stubs(rng, stubs, existing, same_community=comm_of))

    present = np.zeros(n, dtype=bool)
    for a, b in edges:
        present[a] = True
        present[b] = True
    if not present.all():
        return None
    return edges, communities


def realized_mixing(planted: PlantedGraph) -> float:
    """Mean per-node fraction of edges leaving the node's community."""
    g = planted.graph
    comm_of = np.empty(g.n, dtype=np.int64)
    for c, members in enumerate(planted.communities):
        comm_of[np.asarray(members, dtype=np.int64)] = c
    fractions = np.empty(g.n)
    for v in range(g.n):
        nbrs = g.neighbors(v)
        fractions[v] = np.count_nonzero(comm_of[nbrs] != comm_of[v]) / len(nbrs)
    return float(fractions.mean())
