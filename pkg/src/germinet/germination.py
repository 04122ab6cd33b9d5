"""Greedy seed-set growth by smallest effective resistance into the set.

Grows the seed set one node at a time, always taking the frontier node whose
minimum resistance to the current set is smallest, scoring every prefix by
conductance, and trimming back to the first local minimum that qualifies
under a relative-rise rule. The growth loop keeps, per frontier node, its
best known resistance in a lazy-deletion heap, which preserves the rescan
semantics (argmin over frontier minima) at far lower cost.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import Graph, check_node_set
from .resistance import EdgeResistanceMap
from .scoring import GrowingCut, SweepProfile, detect_first_local_min

# A profile over fewer than two growth steps cannot hold an interior minimum.
MIN_GROWTH_STEPS = 2

DEFAULT_RISE_THRESHOLD = 0.05


@dataclass
class GerminationResult:
    seeds: list[int]
    germinated: list[int]
    ordering: list[int]
    profile: SweepProfile
    min_ers: list[float]
    stopped_at: str  # "local_min" | "frontier_exhausted" | "step_cap"

    def to_json_dict(self) -> dict:
        return {
            "seeds": self.seeds,
            "germinated": self.germinated,
            "ordering": self.ordering,
            "scores": [float(s) for s in self.profile.scores],
            "min_ers": [float(r) for r in self.min_ers],
            "stopped_at": self.stopped_at,
        }


def default_step_cap(seed_count: int) -> int:
    return max(5000, 50 * seed_count)


def grow_by_resistance(
    g: Graph,
    rmap: EdgeResistanceMap,
    seeds,
    step_cap: int | None = None,
    rise_threshold: float | None = DEFAULT_RISE_THRESHOLD,
) -> GerminationResult:
    """Run the greedy growth loop.

    rise_threshold enables the online stopping rule (trim at the first local
    conductance minimum that later rises by the given fraction); pass None to
    grow until the frontier is exhausted or step_cap is hit, leaving the
    profile unselected for the caller to cut.
    """
    if rmap.graph is not g:
        raise DataError("resistance map was built for a different graph")
    seeds = check_node_set(g, seeds)
    if not seeds:
        raise DataError("seed set must be nonempty")
    labels = g.component_labels()
    if len({int(labels[s]) for s in seeds}) > 1:
        raise DataError("seeds span multiple connected components")
    if step_cap is None:
        step_cap = default_step_cap(len(seeds))

    slot_r = rmap.slot_values()
    cut = GrowingCut(g)
    for s in seeds:
        cut.add(s)

    ordering = list(seeds)
    scores: list[float] = []
    min_ers: list[float] = []
    c0 = cut.conductance()
    if c0 is not None:
        scores.append(c0)

    # best known resistance into the set, per frontier node; heap entries
    # (r, node) are dropped as stale when they no longer match best[node]
    best: dict[int, float] = {}
    heap: list[tuple[float, int]] = []

    def open_frontier(v: int) -> None:
        lo, hi = g.indptr[v], g.indptr[v + 1]
        for pos in range(lo, hi):
            k = int(g.targets[pos])
            if cut.mask[k]:
                continue
            r = float(slot_r[pos])
            if r < best.get(k, np.inf):
                best[k] = r
                heapq.heappush(heap, (r, k))

    for s in seeds:
        open_frontier(s)

    stopped_at = "frontier_exhausted"
    selected: int | None = None
    steps = 0
    while heap:
        if steps >= step_cap:
            stopped_at = "step_cap"
            break
        r, v = heapq.heappop(heap)
        if cut.mask[v] or r != best[v]:
            continue
        del best[v]
        cut.add(v)
        ordering.append(v)
        min_ers.append(r)
        open_frontier(v)
        steps += 1
        c = cut.conductance()
        if c is None:
            break  # grew to the whole graph; score undefined, sweep ends
        scores.append(c)
        if rise_threshold is not None:
            hit = detect_first_local_min(scores, rise_threshold, MIN_GROWTH_STEPS)
            if hit is not None:
                selected = hit
                stopped_at = "local_min"
                break

    profile = SweepProfile(ordering, scores, offset=len(seeds), selected=selected)
    germinated = profile.selected_nodes()
    return GerminationResult(
        seeds=list(seeds),
        germinated=germinated,
        ordering=ordering,
        profile=profile,
        min_ers=min_ers,
        stopped_at=stopped_at,
    )


def germinate(
    g: Graph,
    rmap: EdgeResistanceMap,
    seeds,
    rise_threshold: float = DEFAULT_RISE_THRESHOLD,
    step_cap: int | None = None,
) -> GerminationResult:
    """Expand seeds greedily and trim at the first qualifying local minimum.

    When no local minimum ever qualifies, the whole ordering is returned as
    the germinated set.
    """
    return grow_by_resistance(g, rmap, seeds, step_cap, rise_threshold)


def er_diameter(pairwise: np.ndarray, nodes) -> float:
    """Largest pairwise resistance within the node set (0 for singletons)."""
    idx = np.asarray(list(nodes), dtype=np.int64)
    if len(idx) < 2:
        return 0.0
    return float(pairwise[np.ix_(idx, idx)].max())


def check_theorem2_bound(
    result: GerminationResult, pairwise: np.ndarray, tol: float = 1e-9
) -> bool:
    """Verify the per-step growth bound of the greedy loop.

    At every step, the increase of the set's resistance diameter must not
    exceed the minimum resistance between the added node and the previous
    set (the value that selected the node). pairwise is a full node-by-node
    resistance matrix, normally from a dense pseudoinverse at test scale.
    """
    members = list(result.seeds)
    diam = er_diameter(pairwise, members)
    additions = result.ordering[len(result.seeds) :]
    for step, v in enumerate(additions):
        idx = np.asarray(members, dtype=np.int64)
        new_diam = max(diam, float(pairwise[v, idx].max()))
        if new_diam > diam + result.min_ers[step] + tol:
            return False
        diam = new_diam
        members.append(v)
    return True
