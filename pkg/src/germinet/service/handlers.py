"""Request handlers shared by the FastAPI endpoints and the CLI.

Each handler is a pure function of its request model, so a CLI invocation
and an HTTP call with the same payload produce the same response.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from .. import __version__
from ..bench import ExperimentSpec, build_generator, run_experiment
from ..errors import DataError
from ..generators import PlantedGraph
from ..graph import Graph
from ..io import parse_edge_list, write_communities, write_edge_list
from ..pipeline import detect
from ..ppr import ppr_power_iteration, ppr_push, ppr_sweep
from ..resistance import (
    exact_edge_resistances,
    sampled_edge_resistances,
    write_resistance_tsv,
)
from ..scoring import precision_recall_f1
from . import schemas as sc


@lru_cache(maxsize=8)
def _parse_cached(path: str, mtime: float) -> Graph:
    return parse_edge_list(path)


def load_graph(source: sc.GraphSource) -> tuple[Graph, PlantedGraph | None]:
    """Materialize a graph source; returns the planted truth when generated."""
    if source.path is not None:
        path = os.path.abspath(source.path)
        if not os.path.exists(path):
            raise DataError(f"no such file: {source.path}")
        return _parse_cached(path, os.path.getmtime(path)), None
    if source.edges is not None:
        from ..graph import build_graph

        return build_graph(source.edges), None
    planted = build_generator(source.generator.generator_dict(), source.seed)
    return planted.graph, planted


def _map_seeds(g: Graph, seeds: list[int]) -> list[int]:
    out = []
    for s in seeds:
        node = g.id_map.get(int(s))
        if node is None:
            raise DataError(f"seed {s} is not a node of the graph")
        out.append(node)
    return out


def _originals(g: Graph, nodes) -> list[int]:
    return [int(g.original_ids[v]) for v in nodes]


def handle_generate(req: sc.GenerateRequest) -> sc.GenerateResponse:
    planted = build_generator(req.spec.generator_dict(), req.seed)
    g = planted.graph
    files = {}
    if req.out_edges:
        write_edge_list(g, req.out_edges)
        files["edges"] = req.out_edges
    if req.out_communities:
        write_communities(g, planted.communities, req.out_communities)
        files["communities"] = req.out_communities
    inline = not files
    return sc.GenerateResponse(
        nodes=g.n,
        edges=g.m,
        communities=len(planted.communities),
        community_sizes=[len(c) for c in planted.communities],
        files=files,
        edge_list=[
            (int(g.original_ids[g.edges_u[i]]), int(g.original_ids[g.edges_v[i]]))
            for i in range(g.m)
        ]
        if inline
        else None,
        community_lists=[_originals(g, c) for c in planted.communities]
        if inline
        else None,
    )


def handle_resistance(req: sc.ResistanceRequest) -> sc.ResistanceResponse:
    g, _ = load_graph(req.graph)
    backend = req.backend
    if backend == "auto":
        from ..pipeline import EXACT_BACKEND_EDGE_LIMIT

        backend = "exact" if g.m <= EXACT_BACKEND_EDGE_LIMIT else "sampled"
    if backend == "exact":
        rmap = exact_edge_resistances(g)
    else:
        rmap = sampled_edge_resistances(g, req.num_trees, req.seed)
    out = None
    values = None
    if req.out:
        write_resistance_tsv(rmap, req.out)
        out = req.out
    else:
        values = [
            (
                int(g.original_ids[g.edges_u[i]]),
                int(g.original_ids[g.edges_v[i]]),
                float(rmap.values[i]),
            )
            for i in range(g.m)
        ]
    return sc.ResistanceResponse(
        nodes=g.n,
        edges=g.m,
        method=rmap.method,
        num_trees=rmap.num_trees,
        total=rmap.total(),
        out=out,
        values=values,
    )


def _germination_model(g: Graph, result) -> sc.GerminationModel:
    return sc.GerminationModel(
        seeds=_originals(g, result.seeds),
        germinated=_originals(g, result.germinated),
        ordering=_originals(g, result.ordering),
        scores=[float(s) for s in result.profile.scores],
        min_ers=[float(r) for r in result.min_ers],
        stopped_at=result.stopped_at,
    )


def handle_germinate(req: sc.GerminateRequest) -> sc.GerminationModel:
    from ..germination import germinate
    from ..pipeline import DetectorConfig, resistance_map

    g, _ = load_graph(req.graph)
    seeds = _map_seeds(g, req.seeds)
    cfg = DetectorConfig(
        er_backend=req.er_backend, num_trees=req.num_trees, rng_seed=req.er_seed
    )
    rmap = resistance_map(g, cfg)
    result = germinate(g, rmap, seeds, req.rise_threshold, req.step_cap)
    return _germination_model(g, result)


def handle_ppr(req: sc.PprRequest) -> sc.PprResponse:
    g, _ = load_graph(req.graph)
    seeds = _map_seeds(g, req.seeds)
    if req.backend == "power":
        x = ppr_power_iteration(g, seeds, req.alpha, req.tol)
    else:
        x = ppr_push(g, seeds, req.alpha, req.epsilon)
    nonzero = np.flatnonzero(x.scores > 0)
    scores = [(int(g.original_ids[v]), float(x.scores[v])) for v in nonzero]
    community = None
    sweep = None
    if req.sweep:
        comm, profile = ppr_sweep(
            g, x, seeds, req.rise_threshold, req.sweep_mode, req.degree_normalized
        )
        community = _originals(g, comm)
        sweep = sc.SweepModel(
            ordering=_originals(g, profile.ordering),
            scores=[float(s) for s in profile.scores],
            offset=profile.offset,
            selected=profile.selected,
        )
    return sc.PprResponse(
        seeds=_originals(g, seeds),
        alpha=req.alpha,
        backend=req.backend,
        scores=scores,
        community=community,
        sweep=sweep,
    )


def handle_detect(req: sc.DetectRequest) -> sc.DetectResponse:
    g, _ = load_graph(req.graph)
    seeds = _map_seeds(g, req.seeds)
    outcome = detect(g, seeds, req.config.to_config())
    germ = None
    if outcome.germination is not None:
        germ = _germination_model(g, outcome.germination)
    sweep = None
    if outcome.sweep_profile is not None:
        sweep = sc.SweepModel(
            ordering=_originals(g, outcome.sweep_profile.ordering),
            scores=[float(s) for s in outcome.sweep_profile.scores],
            offset=outcome.sweep_profile.offset,
            selected=outcome.sweep_profile.selected,
        )
    return sc.DetectResponse(
        method=outcome.method,
        seeds=_originals(g, seeds),
        estimate=_originals(g, outcome.estimate),
        estimate_size=len(outcome.estimate),
        stage_boundary=outcome.stage_boundary,
        flags=outcome.flags,
        germination=germ,
        sweep=sweep,
        timings=outcome.timings if req.include_timings else None,
    )


def handle_bench(req: sc.BenchRequest) -> sc.BenchResponse:
    spec = ExperimentSpec(
        dataset=req.dataset.to_dict(),
        detectors=[c.to_config() for c in req.detectors],
        runs=req.runs,
        seeds_per_run=req.seeds_per_run,
        min_community_size=req.min_community_size,
        community_policy=req.community_policy,
        fixed_community=req.fixed_community,
        master_seed=req.master_seed,
        threads=req.threads,
        curves_dir=req.curves_dir,
    )
    report = run_experiment(spec)
    return sc.BenchResponse(report=report.to_json_dict(req.include_timings))


def _read_truth_line(path: str, index: int) -> list[int]:
    communities = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            communities.append([int(tok) for tok in line.split()])
    if index < 0 or index >= len(communities):
        raise DataError(f"truth file has {len(communities)} communities; no index {index}")
    return communities[index]


def handle_eval(req: sc.EvalRequest) -> sc.EvalResponse:
    truth = req.truth if req.truth is not None else _read_truth_line(
        req.truth_path, req.truth_index
    )
    precision, recall, f1 = precision_recall_f1(req.estimate, truth)
    return sc.EvalResponse(
        precision=precision,
        recall=recall,
        f1=f1,
        estimate_size=len(set(req.estimate)),
        truth_size=len(set(truth)),
    )


def handle_health() -> sc.HealthResponse:
    return sc.HealthResponse(status="ok", version=__version__)
