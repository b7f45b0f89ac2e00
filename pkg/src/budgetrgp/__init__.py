"""Budget-constrained random graph process toolkit.

Run Builder strategies against streamed random edge offers, detect and count
small target subgraphs, evaluate budget-threshold formulas, and estimate
success probabilities over (t, b) grids.
"""

from .engine import (BuilderContext, ProcessStream, SubprocessView, TrialResult,
                     derive_seed, new_process, next_offer, pair_count, run_trial,
                     subprocess_view, trial_stream)
from .errors import (ExhaustedProcessError, IncompleteInputError,
                     InfeasibleParametersError, InternalCheckError,
                     InvalidParameterError, InvalidPatternError, StrategyError)
from .graphs import Graph, load_graph_json
from .patterns import (Embedding, PatternGraph, contains, count_labelled,
                       count_unlabelled, find_embedding, incremental_contains,
                       load_pattern_json, make_clique, make_cycle, make_k1t,
                       make_wheel, tree_path, tree_star)
from .analysis import (BoundReport, Monomial, ThresholdFormula,
                       containment_probability_bound, copy_count_bound,
                       crossover_of, expected_copies_gt, expected_copies_process,
                       k_edge_subgraphs, nc_soundness_report, threshold,
                       threshold_formula)
from .strategies import (BuyAll, BuyNone, ParamSet, PerOffer, Strategy,
                         choose_params, cycle_subset, default_strategy_for_family,
                         depth_clique, k1t_dense, k1t_sparse, k5_dense, k5_sparse,
                         parse_strategy, tree_greedy, wheel_dense, wheel_sparse)

__version__ = "0.1.0"
