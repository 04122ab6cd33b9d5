"""Request/response models shared by the HTTP endpoints and the CLI.

Node ids at this boundary are always the original ids from the input files
or generators; the core package's compact ids never leak out.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from ..pipeline import DetectorConfig


class HsbmSpec(BaseModel):
    kind: Literal["hsbm"] = "hsbm"
    block_sizes: Optional[list[int]] = None
    prob_matrix: Optional[list[list[float]]] = None
    p_in: Optional[float] = None
    p_out: Optional[float] = None
    levels: Optional[int] = None
    branching: Optional[int] = None
    block_size: Optional[int] = None
    p_levels: Optional[list[float]] = None

    @model_validator(mode="after")
    def _check_one_form(self):
        explicit = self.prob_matrix is not None
        flat = self.p_in is not None and self.p_out is not None
        nested = all(
            v is not None
            for v in (self.levels, self.branching, self.block_size, self.p_levels)
        )
        if sum([explicit, flat, nested]) != 1:
            raise ValueError(
                "specify exactly one of prob_matrix, p_in/p_out, or a hierarchy"
            )
        if (explicit or flat) and not self.block_sizes:
            raise ValueError("block_sizes is required with prob_matrix or p_in/p_out")
        return self

    def generator_dict(self) -> dict:
        out = {"kind": "hsbm"}
        if self.prob_matrix is not None:
            out.update(block_sizes=self.block_sizes, prob_matrix=self.prob_matrix)
        elif self.p_in is not None:
            out.update(block_sizes=self.block_sizes, p_in=self.p_in, p_out=self.p_out)
        else:
            out.update(
                levels=self.levels,
                branching=self.branching,
                block_size=self.block_size,
                p_levels=self.p_levels,
            )
        return out


class LfrSpec(BaseModel):
    kind: Literal["lfr"] = "lfr"
    n: int
    degree_exponent: float = 2.5
    community_exponent: float = 1.5
    mixing_mu: float = 0.2
    avg_degree: float = 10.0
    max_degree: int = 50
    min_community: int = 20
    max_community: int = 100

    def generator_dict(self) -> dict:
        return {
            "kind": "lfr",
            "n": self.n,
            "degree_exponent": self.degree_exponent,
            "community_exponent": self.community_exponent,
            "mixing_mu": self.mixing_mu,
            "avg_degree": self.avg_degree,
            "max_degree": self.max_degree,
            "community_size_range": [self.min_community, self.max_community],
        }


GeneratorSpec = Annotated[Union[HsbmSpec, LfrSpec], Field(discriminator="kind")]


class GraphSource(BaseModel):
    """Where a graph comes from: a file, inline edges, or a generator."""

    path: Optional[str] = None
    edges: Optional[list[tuple[int, int]]] = None
    generator: Optional[GeneratorSpec] = None
    seed: int = 0  # generator seed

    @model_validator(mode="after")
    def _check_one_source(self):
        given = [x is not None for x in (self.path, self.edges, self.generator)]
        if sum(given) != 1:
            raise ValueError("specify exactly one of path, edges, or generator")
        return self


class DetectorConfigModel(BaseModel):
    method: Literal["ppr_only", "er_only", "germinate_then_ppr"] = "germinate_then_ppr"
    er_backend: Literal["exact", "sampled", "auto"] = "auto"
    num_trees: int = 2000
    alpha: float = 0.15
    ppr_backend: Literal["power", "push"] = "power"
    ppr_tol: float = 1e-10
    push_epsilon: float = 1e-7
    germination_rise: float = 0.05
    sweep_rise: float = 0.20
    sweep_mode: Literal["local", "global"] = "local"
    degree_normalized_rank: bool = False
    step_cap: Optional[int] = None
    rng_seed: int = 0
    name: Optional[str] = None

    def to_config(self) -> DetectorConfig:
        return DetectorConfig(**self.model_dump())


class GenerateRequest(BaseModel):
    spec: GeneratorSpec
    seed: int = 0
    out_edges: Optional[str] = None
    out_communities: Optional[str] = None


class GenerateResponse(BaseModel):
    nodes: int
    edges: int
    communities: int
    community_sizes: list[int]
    files: dict[str, str] = {}
    edge_list: Optional[list[tuple[int, int]]] = None
    community_lists: Optional[list[list[int]]] = None


class ResistanceRequest(BaseModel):
    graph: GraphSource
    backend: Literal["exact", "sampled", "auto"] = "auto"
    num_trees: int = 2000
    seed: int = 0
    out: Optional[str] = None


class ResistanceResponse(BaseModel):
    nodes: int
    edges: int
    method: str
    num_trees: Optional[int] = None
    total: float
    out: Optional[str] = None
    values: Optional[list[tuple[int, int, float]]] = None


class GerminateRequest(BaseModel):
    graph: GraphSource
    seeds: list[int]
    rise_threshold: float = 0.05
    step_cap: Optional[int] = None
    er_backend: Literal["exact", "sampled", "auto"] = "auto"
    num_trees: int = 2000
    er_seed: int = 0


class GerminationModel(BaseModel):
    seeds: list[int]
    germinated: list[int]
    ordering: list[int]
    scores: list[float]
    min_ers: list[float]
    stopped_at: str


class SweepModel(BaseModel):
    ordering: list[int]
    scores: list[float]
    offset: int
    selected: Optional[int] = None


class PprRequest(BaseModel):
    graph: GraphSource
    seeds: list[int]
    alpha: float = 0.15
    backend: Literal["power", "push"] = "power"
    tol: float = 1e-10
    epsilon: float = 1e-7
    sweep: bool = True
    rise_threshold: float = 0.20
    sweep_mode: Literal["local", "global"] = "local"
    degree_normalized: bool = False


class PprResponse(BaseModel):
    seeds: list[int]
    alpha: float
    backend: str
    scores: list[tuple[int, float]]  # (original id, score), nonzero entries
    community: Optional[list[int]] = None
    sweep: Optional[SweepModel] = None


class DetectRequest(BaseModel):
    graph: GraphSource
    seeds: list[int]
    config: DetectorConfigModel = DetectorConfigModel()
    include_timings: bool = False


class DetectResponse(BaseModel):
    method: str
    seeds: list[int]
    estimate: list[int]
    estimate_size: int
    stage_boundary: Optional[int] = None
    flags: dict = {}
    germination: Optional[GerminationModel] = None
    sweep: Optional[SweepModel] = None
    timings: Optional[dict] = None


class BenchDataset(BaseModel):
    path: Optional[str] = None
    communities: Optional[str] = None
    generator: Optional[GeneratorSpec] = None

    @model_validator(mode="after")
    def _check(self):
        if (self.path is None) == (self.generator is None):
            raise ValueError("specify exactly one of path or generator")
        if self.path is not None and self.communities is None:
            raise ValueError("file datasets need a communities path")
        return self

    def to_dict(self) -> dict:
        if self.path is not None:
            return {"path": self.path, "communities": self.communities}
        return {"generator": self.generator.generator_dict()}


class BenchRequest(BaseModel):
    dataset: BenchDataset
    detectors: list[DetectorConfigModel]
    runs: int = 10
    seeds_per_run: int = 1
    min_community_size: Optional[int] = None
    community_policy: Literal["uniform", "fixed"] = "uniform"
    fixed_community: int = 0
    master_seed: int = 0
    threads: int = 1
    curves_dir: Optional[str] = None
    include_timings: bool = False


class BenchResponse(BaseModel):
    report: dict


class EvalRequest(BaseModel):
    estimate: list[int]
    truth: Optional[list[int]] = None
    truth_path: Optional[str] = None
    truth_index: int = 0

    @model_validator(mode="after")
    def _check(self):
        if (self.truth is None) == (self.truth_path is None):
            raise ValueError("specify exactly one of truth or truth_path")
        return self


class EvalResponse(BaseModel):
    precision: float
    recall: float
    f1: float
    estimate_size: int
    truth_size: int


class HealthResponse(BaseModel):
    status: str
    version: str
