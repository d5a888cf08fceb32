"""Ising model structure learning from samples with missing or flipped entries."""

from .corruption import (
    CorruptionChannel,
    SampleSet,
    corrupt_flip,
    corrupt_missing,
    estimate_p,
    read_samples,
    write_samples,
)
from .estimators import estimator_bound, g_flip, g_miss, g_miss_meanfield, sigma
from .geometry import ball_to_simplex, simplex_to_ball
from .model import (
    ExactDistribution,
    IsingModel,
    exact_probabilities,
    gibbs_sample,
    gibbs_samples,
    new_model,
    read_model,
    sample_exact,
    write_model,
)
from .objective import (
    ScreeningProblem,
    iso_gradient_exact,
    iso_value_empirical,
    iso_value_exact,
    true_minimizer,
)
from .optimizer import SmgConfig, SmgTrace, default_step_size, smg_minimize
from .recovery import (
    RecoveryConfig,
    RecoveryResult,
    recover_graph,
    recover_graph_unknown_p,
    recover_neighborhood,
)

__version__ = "0.1.0"
