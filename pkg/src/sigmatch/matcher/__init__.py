from .params import AlgoParams, FeasibilityWarning, ParamError, paper_params, practical_params
from .rounds import (
    MatchResult, MatchTally, RoundResult, aggregate, match_graphs, read_match_result, relabel_result,
    resolve_p, round_rng, run_round, write_match_result,
)
from .simplified import degree_baseline_match, simplified_match, simplified_state
from .stages import (
    SecondGeneration, SignatureTable, Split, agreement_matrix, agreement_threshold, count_threshold,
    first_generation, potential_match, sample_index_set, second_generation, signatures,
    split_vertices,
)

__all__ = [n for n in dir() if not n.startswith("_")]
