"""End-to-end detectors: PPR only, resistance growth only, or both stages.

The two-stage detector runs the greedy resistance growth first, then hands
the trimmed set to personalized PageRank as the seed distribution for the
final sweep. The single-stage variants exist for head-to-head comparisons.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DataError
from .germination import (
    DEFAULT_RISE_THRESHOLD,
    GerminationResult,
    germinate,
    grow_by_resistance,
)
from .graph import Graph, check_node_set, induced_subgraph
from .ppr import (
    DEFAULT_ALPHA,
    DEFAULT_POWER_TOL,
    DEFAULT_PUSH_EPSILON,
    PPR_SWEEP_RISE,
    ppr_power_iteration,
    ppr_push,
    ppr_sweep,
)
from .resistance import (
    DEFAULT_NUM_TREES,
    EdgeResistanceMap,
    exact_edge_resistances,
    sampled_edge_resistances,
)
from .scoring import SweepProfile, detect_first_local_min

METHODS = ("ppr_only", "er_only", "germinate_then_ppr")

# Above this many edges, exact per-edge solves stop being worth it.
EXACT_BACKEND_EDGE_LIMIT = 200_000


@dataclass
class DetectorConfig:
    method: str = "germinate_then_ppr"
    er_backend: str = "auto"  # "exact" | "sampled" | "auto"
    num_trees: int = DEFAULT_NUM_TREES
    alpha: float = DEFAULT_ALPHA
    ppr_backend: str = "power"  # "power" | "push"
    ppr_tol: float = DEFAULT_POWER_TOL
    push_epsilon: float = DEFAULT_PUSH_EPSILON
    germination_rise: float = DEFAULT_RISE_THRESHOLD
    sweep_rise: float = PPR_SWEEP_RISE
    sweep_mode: str = "local"
    degree_normalized_rank: bool = False
    step_cap: int | None = None
    rng_seed: int = 0
    name: str | None = None

    def label(self) -> str:
        return self.name or self.method

    def __post_init__(self):
        if self.method not in METHODS:
            raise DataError(f"unknown method: {self.method!r}")
        if self.germination_rise <= 0 or self.sweep_rise <= 0:
            raise DataError("rise thresholds must be positive")


@dataclass
class DetectionOutcome:
    method: str
    seeds: list[int]
    estimate: list[int]
    stage_boundary: int | None
    germination: GerminationResult | None
    sweep_profile: SweepProfile | None
    flags: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json_dict(self, include_timings: bool = False) -> dict:
        out = {
            "method": self.method,
            "seeds": self.seeds,
            "estimate": self.estimate,
            "stage_boundary": self.stage_boundary,
            "flags": self.flags,
        }
        if self.germination is not None:
            out["germination"] = self.germination.to_json_dict()
        if self.sweep_profile is not None:
            out["sweep"] = {
                "ordering": list(self.sweep_profile.ordering),
                "scores": [float(s) for s in self.sweep_profile.scores],
                "offset": self.sweep_profile.offset,
                "selected": self.sweep_profile.selected,
            }
        if include_timings:
            out["timings"] = self.timings
        return out


def resistance_map(g: Graph, config: DetectorConfig) -> EdgeResistanceMap:
    backend = config.er_backend
    if backend == "auto":
        backend = "exact" if g.m <= EXACT_BACKEND_EDGE_LIMIT else "sampled"
    if backend == "exact":
        return exact_edge_resistances(g)
    if backend == "sampled":
        return sampled_edge_resistances(g, config.num_trees, config.rng_seed)
    raise DataError(f"unknown resistance backend: {config.er_backend!r}")


def _run_ppr(g: Graph, seeds, config: DetectorConfig):
    if config.ppr_backend == "power":
        return ppr_power_iteration(g, seeds, config.alpha, config.ppr_tol)
    if config.ppr_backend == "push":
        return ppr_push(g, seeds, config.alpha, config.push_epsilon)
    raise DataError(f"unknown ppr backend: {config.ppr_backend!r}")


def detect(g: Graph, seeds, config: DetectorConfig) -> DetectionOutcome:
    """Estimate the community around the seeds with the configured method.

    The estimate always contains the original seeds: orderings list seeds
    first, and a sweep cut shorter than the seed set is extended minimally
    (and flagged). On disconnected graphs the detection is restricted to the
    seeds' component and node ids are mapped back afterwards.
    """
    seeds = check_node_set(g, seeds)
    if not seeds:
        raise DataError("seed set must be nonempty")
    labels = g.component_labels()
    if len({int(labels[s]) for s in seeds}) > 1:
        raise DataError("seeds span multiple connected components")

    flags: dict = {}
    work = g
    back = None  # work-graph node -> original node
    if not g.is_connected():
        comp = g.component_of(seeds[0])
        if len(comp) < 2:
            # a single isolated seed cannot be expanded
            return DetectionOutcome(
                config.method, seeds, list(seeds), None, None, None,
                flags={"component_restricted": True},
            )
        work = induced_subgraph(g, comp)
        back = work.original_ids
        seed_lookup = {int(old): new for new, old in enumerate(back)}
        work_seeds = [seed_lookup[s] for s in seeds]
        flags["component_restricted"] = True
    else:
        work_seeds = seeds

    timings: dict = {}
    germination = None
    stage_boundary = None

    if config.method == "ppr_only":
        t0 = time.perf_counter()
        x = _run_ppr(work, work_seeds, config)
        timings["ppr"] = time.perf_counter() - t0
        community, profile = ppr_sweep(
            work, x, work_seeds, config.sweep_rise, config.sweep_mode,
            config.degree_normalized_rank,
        )
    elif config.method == "germinate_then_ppr":
        t0 = time.perf_counter()
        rmap = resistance_map(work, config)
        timings["resistance"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        germination = germinate(
            work, rmap, work_seeds, config.germination_rise, config.step_cap
        )
        timings["germination"] = time.perf_counter() - t0
        revised = germination.germinated
        stage_boundary = len(revised)
        t0 = time.perf_counter()
        x = _run_ppr(work, revised, config)
        timings["ppr"] = time.perf_counter() - t0
        community, profile = ppr_sweep(
            work, x, revised, config.sweep_rise, config.sweep_mode,
            config.degree_normalized_rank,
        )
    elif config.method == "er_only":
        t0 = time.perf_counter()
        rmap = resistance_map(work, config)
        timings["resistance"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        germination = grow_by_resistance(
            work, rmap, work_seeds, config.step_cap, rise_threshold=None
        )
        timings["germination"] = time.perf_counter() - t0
        scores = germination.profile.scores
        if not scores:
            raise DataError("growth profile has no scoreable prefix")
        selected = detect_first_local_min(scores, config.sweep_rise, 2)
        if selected is None:
            selected = int(np.argmin(scores))
        profile = replace(germination.profile, selected=selected)
        germination = replace(germination, profile=profile)
        community = profile.selected_nodes()
    else:  # pragma: no cover - rejected in DetectorConfig
        raise DataError(f"unknown method: {config.method!r}")

    if len(community) < len(work_seeds):
        # sweep cut dropped an original seed; cover them minimally
        community = list(profile.ordering[: len(work_seeds)])
        flags["coverage_extended"] = True

    if back is not None:
        def remap(nodes):
            return [int(back[v]) for v in nodes]

        community = remap(community)
        profile = replace(profile, ordering=remap(profile.ordering))
        if germination is not None:
            germination = replace(
                germination,
                seeds=remap(germination.seeds),
                germinated=remap(germination.germinated),
                ordering=remap(germination.ordering),
                profile=replace(
                    germination.profile,
                    ordering=remap(germination.profile.ordering),
                ),
            )

    return DetectionOutcome(
        method=config.method,
        seeds=seeds,
        estimate=community,
        stage_boundary=stage_boundary,
        germination=germination,
        sweep_profile=profile,
        flags=flags,
        timings=timings,
    )
