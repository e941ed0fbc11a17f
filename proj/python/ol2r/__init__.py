"""Online learning-to-rank simulation: perturbed-ensemble exploration,
confidence-interval baselines, click simulation and ranking metrics."""

from ._core import (
    ClickSim,
    Dataset,
    RunResult,
    cumulative_ndcg,
    default_config,
    make_synthetic_files,
    ndcg_at_k,
    pairwise_regret,
    run_experiment,
    topo_rank,
)

__all__ = [
    "ClickSim",
    "Dataset",
    "RunResult",
    "cumulative_ndcg",
    "default_config",
    "make_synthetic_files",
    "ndcg_at_k",
    "pairwise_regret",
    "run_experiment",
    "topo_rank",
]
