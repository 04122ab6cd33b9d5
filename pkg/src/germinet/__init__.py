"""Local community detection by seed-set germination and PageRank propagation."""

from .errors import DataError, GerminetError, SingularSystemError, SolverError
from .graph import (
    Graph,
    LaplacianSystem,
    build_graph,
    cut_size,
    induced_subgraph,
    laplacian_solve,
    volume,
)
from .resistance import (
    EdgeResistanceMap,
    SpanningTreeSample,
    commute_time,
    exact_edge_resistances,
    read_resistance_tsv,
    sample_spanning_tree,
    sampled_edge_resistances,
    write_resistance_tsv,
)
from .scoring import (
    PRCurve,
    SweepProfile,
    conductance,
    detect_first_local_min,
    pr_curve,
    precision_recall_f1,
)
from .germination import (
    GerminationResult,
    check_theorem2_bound,
    er_diameter,
    germinate,
    grow_by_resistance,
)
from .ppr import ScoreVector, ppr_power_iteration, ppr_push, ppr_sweep, seed_vector
from .pipeline import DetectionOutcome, DetectorConfig, detect
from .generators import PlantedGraph, generate_hsbm, generate_lfr_like, hsbm_probability_matrix
from .io import parse_communities, parse_edge_list, write_communities, write_edge_list
from .bench import ExperimentReport, ExperimentSpec, run_experiment

__version__ = "0.1.0"
