"""Repeated-experiment harness: seed sampling, paired detection, reporting.

Every run samples one ground-truth community and a fixed number of seeds
from it, hands the identical (graph, seeds) pair to every configured
detector, and scores each estimate against the sampled community. Runs own
rng streams derived from (master seed, run index), so reports are identical
whatever the thread count.
"""

from __future__ import annotations

import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
import time

import numpy as np

from .errors import DataError
from .generators import PlantedGraph, generate_hsbm, generate_lfr_like, hsbm_probability_matrix
from .graph import Graph
from .io import parse_communities, parse_edge_list
from .pipeline import DetectorConfig, detect
from .scoring import pr_curve, precision_recall_f1


@dataclass
class ExperimentSpec:
    dataset: dict
    detectors: list[DetectorConfig]
    runs: int = 10
    seeds_per_run: int = 1
    min_community_size: int | None = None
    community_policy: str = "uniform"  # "uniform" | "fixed"
    fixed_community: int = 0
    master_seed: int = 0
    threads: int = 1
    curves_dir: str | None = None

    def effective_min_size(self) -> int:
        if self.min_community_size is not None:
            return self.min_community_size
        return max(self.seeds_per_run + 2, 5)

    def validate(self) -> None:
        if self.runs < 1:
            raise DataError("runs must be >= 1")
        if self.seeds_per_run < 1:
            raise DataError("seeds_per_run must be >= 1")
        if not self.detectors:
            raise DataError("at least one detector config is required")
        labels = [c.label() for c in self.detectors]
        if len(set(labels)) != len(labels):
            raise DataError(f"detector labels must be unique, got {labels}")
        if self.community_policy not in ("uniform", "fixed"):
            raise DataError(f"unknown community policy: {self.community_policy!r}")
        keys = set(self.dataset)
        if not ({"path"} <= keys or {"generator"} <= keys):
            raise DataError("dataset needs either a 'path' or a 'generator' entry")


@dataclass
class ExperimentReport:
    rows: list[dict]
    aggregates: dict
    improvement: dict
    baseline: str
    spec: dict
    runtimes: dict = field(default_factory=dict)

    def to_json_dict(self, include_timings: bool = False) -> dict:
        out = {
            "spec": self.spec,
            "baseline": self.baseline,
            "rows": [
                {k: v for k, v in row.items() if include_timings or k != "runtime"}
                for row in self.rows
            ],
            "aggregates": self.aggregates,
            "improvement": self.improvement,
        }
        if include_timings:
            out["runtimes"] = self.runtimes
        return out

    def to_text(self) -> str:
        labels = list(self.aggregates)
        width = max(len(label) for label in labels) + 2
        lines = ["Mean F1 per method"]
        lines.append(f"{'METHOD':<{width}} {'MEAN F1':>8} {'(SD)':>8}")
        for label in labels:
            agg = self.aggregates[label]
            lines.append(
                f"{label:<{width}} {agg['mean_f1']:>8.3f} ({agg['sd_f1']:.3f})"
            )
        for label, frac in self.improvement.items():
            lines.append(
                f"{label} beat {self.baseline} in {frac * 100:.0f}% of runs"
            )
        return "\n".join(lines) + "\n"


def build_generator(gen_spec: dict, seed: int) -> PlantedGraph:
    """Instantiate a generator dataset spec for one run."""
    kind = gen_spec.get("kind")
    params = {k: v for k, v in gen_spec.items() if k != "kind"}
    if kind == "hsbm":
        if "prob_matrix" not in params:
            if "p_in" in params and "p_out" in params:
                k = len(params["block_sizes"])
                p_in, p_out = params.pop("p_in"), params.pop("p_out")
                params["prob_matrix"] = [
                    [p_in if i == j else p_out for j in range(k)] for i in range(k)
                ]
            elif {"levels", "branching", "p_levels", "block_size"} <= set(params):
                mat = hsbm_probability_matrix(
                    params.pop("levels"), params.pop("branching"), params.pop("p_levels")
                )
                params["block_sizes"] = [params.pop("block_size")] * len(mat)
                params["prob_matrix"] = mat.tolist()
            else:
                raise DataError(
                    "hsbm spec needs prob_matrix, p_in/p_out, or a hierarchy"
                )
        return generate_hsbm(rng_seed=seed, **params)
    if kind == "lfr":
        if "community_size_range" in params:
            params["community_size_range"] = tuple(params["community_size_range"])
        return generate_lfr_like(rng_seed=seed, **params)
    raise DataError(f"unknown generator kind: {kind!r}")


def _load_file_dataset(spec: ExperimentSpec) -> tuple[Graph, list[list[int]]]:
    g = parse_edge_list(spec.dataset["path"])
    cmty_path = spec.dataset.get("communities")
    if not cmty_path:
        raise DataError("file datasets need a 'communities' path for ground truth")
    communities = parse_communities(cmty_path, g)
    if not communities:
        raise DataError("no usable communities in the ground truth file")
    return g, communities


def _run_once(spec: ExperimentSpec, run_index: int, fixed_data) -> list[dict]:
    ss = np.random.SeedSequence(entropy=spec.master_seed, spawn_key=(run_index,))
    gen_ss, pick_ss, det_ss = ss.spawn(3)

    if fixed_data is not None:
        g, communities = fixed_data
    else:
        gen_seed = int(gen_ss.generate_state(1)[0])
        planted = build_generator(spec.dataset["generator"], gen_seed)
        g, communities = planted.graph, planted.communities

    min_size = spec.effective_min_size()
    eligible = [i for i, c in enumerate(communities) if len(c) >= min_size]
    if not eligible:
        raise DataError(f"no ground-truth community reaches size {min_size}")
    rng = np.random.default_rng(pick_ss)
    if spec.community_policy == "fixed":
        cidx = spec.fixed_community
        if cidx not in eligible:
            raise DataError(f"fixed community {cidx} is missing or too small")
        rng.integers(len(eligible))  # keep the stream aligned across policies
    else:
        cidx = eligible[int(rng.integers(len(eligible)))]
    community = communities[cidx]
    picked = rng.choice(len(community), size=spec.seeds_per_run, replace=False)
    seeds = [int(community[i]) for i in picked]
    det_seed = int(det_ss.generate_state(1)[0])

    rows = []
    for config in spec.detectors:
        cfg = replace(config, rng_seed=det_seed)
        t0 = time.perf_counter()
        outcome = detect(g, seeds, cfg)
        runtime = time.perf_counter() - t0
        precision, recall, f1 = precision_recall_f1(outcome.estimate, community)
        rows.append(
            {
                "run": run_index,
                "method": config.label(),
                "community": cidx,
                "community_size": len(community),
                "seeds": [int(g.original_ids[s]) for s in seeds],
                "estimate_size": len(outcome.estimate),
                "precision": precision,
                "recall": recall,
                "f1": f1,
                "flags": outcome.flags,
                "runtime": runtime,
            }
        )
        if spec.curves_dir:
            curve = pr_curve(outcome.sweep_profile.ordering, community)
            path = Path(spec.curves_dir) / f"run{run_index}_{config.label()}.csv"
            curve.write_csv(path)
    return rows


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Execute the experiment and aggregate a Table-style report."""
    spec.validate()
    fixed_data = None
    if "path" in spec.dataset:
        fixed_data = _load_file_dataset(spec)
    if spec.curves_dir:
        Path(spec.curves_dir).mkdir(parents=True, exist_ok=True)

    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            per_run = list(
                pool.map(lambda i: _run_once(spec, i, fixed_data), range(spec.runs))
            )
    else:
        per_run = [_run_once(spec, i, fixed_data) for i in range(spec.runs)]

    rows = [row for run_rows in per_run for row in run_rows]
    labels = [c.label() for c in spec.detectors]
    by_label = {
        label: [row["f1"] for row in rows if row["method"] == label]
        for label in labels
    }
    aggregates = {
        label: {
            "mean_f1": statistics.fmean(scores),
            "sd_f1": statistics.stdev(scores) if len(scores) > 1 else 0.0,
        }
        for label, scores in by_label.items()
    }
    baseline = labels[0]
    improvement = {
        label: sum(
            1 for a, b in zip(by_label[label], by_label[baseline]) if a > b
        ) / len(by_label[label])
        for label in labels[1:]
    }
    spec_echo = {
        "dataset": spec.dataset,
        "detectors": [asdict(c) for c in spec.detectors],
        "runs": spec.runs,
        "seeds_per_run": spec.seeds_per_run,
        "min_community_size": spec.effective_min_size(),
        "community_policy": spec.community_policy,
        "master_seed": spec.master_seed,
    }
    runtimes = {
        label: sum(row["runtime"] for row in rows if row["method"] == label)
        for label in labels
    }
    return ExperimentReport(rows, aggregates, improvement, baseline, spec_echo, runtimes)
