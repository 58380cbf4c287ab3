"""Overlap-time tail distributions for GI^B/GI/inf queues."""

from .analytic import (METHODS, MeanResult, PairBatch, PairIndividual, TailCurve, TupleQuery,
                       available_methods, default_grid, default_t_max, min_max_tail,
                       overlap_mean, pair_batch_first_tail, pair_batch_last_tail,
                       pair_individual_tail, query_from_dict, shared_first_mean_closed_form,
                       tail_curve, tuple_first_tail, tuple_individual_tail, tuple_last_tail)
from .distributions import (BlockSum, DeterministicBatch, Deterministic, Erlang, ExplicitBatch,
                            Exponential, GeometricBatch, HyperExponential, LogNormal,
                            QueueModel, Uniform, ZeroTruncatedPoisson, kfold_density)
from .errors import (DomainError, ModelSpecError, OverlapError, QuadratureError,
                     UnsupportedCombination)
from .numerics import Quadrature, dkw_halfwidth, grid_convolve, integrate_semiinfinite
from .simulation import (SimEstimate, TrajectoryLog, direct_sample_overlap, estimate_tail,
                         overlaps_from_trajectory, simulate_trajectory)
from .validation import (ValidationReport, compare_curves, reduction_suite,
                         semantics_adjudication)

__version__ = "0.1.0"

__all__ = [
    "BlockSum", "Deterministic", "DeterministicBatch", "DomainError", "Erlang",
    "ExplicitBatch", "Exponential", "GeometricBatch", "HyperExponential", "LogNormal",
    "METHODS", "MeanResult", "ModelSpecError", "OverlapError", "PairBatch",
    "PairIndividual", "Quadrature", "QuadratureError", "QueueModel", "SimEstimate",
    "TailCurve", "TrajectoryLog", "TupleQuery", "Uniform", "UnsupportedCombination",
    "ValidationReport", "ZeroTruncatedPoisson", "available_methods", "compare_curves",
    "default_grid", "default_t_max", "direct_sample_overlap", "dkw_halfwidth",
    "estimate_tail", "grid_convolve", "integrate_semiinfinite", "kfold_density",
    "min_max_tail", "overlap_mean", "overlaps_from_trajectory", "pair_batch_first_tail",
    "pair_batch_last_tail", "pair_individual_tail", "query_from_dict", "reduction_suite",
    "semantics_adjudication", "shared_first_mean_closed_form", "simulate_trajectory",
    "tail_curve", "tuple_first_tail", "tuple_individual_tail", "tuple_last_tail",
    "__version__",
]
