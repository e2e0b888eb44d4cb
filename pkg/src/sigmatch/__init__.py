"""Multistage signature matching for correlated Erdős–Rényi graphs."""

from ._kernels import BACKEND
from .binomial import QuantileCutoffs, binom_cdf, bucket_of, quantile_cutoffs
from .diagnostics import (
    DiagnosticsReport, accuracy, first_gen_overlap_stats, model_stats, second_gen_overlap_stats,
)
from .graph import Graph, GraphInputError, VertexSet, from_edge_list, read_edge_list, write_edge_list
from .matcher import (
    AlgoParams, MatchResult, aggregate, degree_baseline_match, match_graphs, paper_params,
    practical_params, run_round, simplified_match,
)
from .model import (
    CorrelatedInstance, ModelParams, apply_permutation, estimate_p, load_instance, sample_correlated,
    sample_permutation, save_instance,
)

__version__ = "0.1.0"
