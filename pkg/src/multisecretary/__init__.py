"""Multisecretary problem with standard-uniform valuations.

Exact dynamic programming for the optimal and myopic hiring policies,
the open-positions random walk, seeded Monte Carlo checks, and the
logarithmic regret bounds.
"""
from .bounds import (BoundsReport, RegretCurve, build_report, growth_fit,
                     lower_bound, sweep, upper_bound)
from .core_math import (ConvergenceError, beta_reg, cdf_integral, mu,
                        myopic_regret, offline_value, option_value,
                        orderstat_cdf)
from .dp import DpTables, solve_myopic, solve_optimal, solve_value_direct
from .simulate import SimConfig, SimSummary, estimate_regret
from .walk import (expected_mistakes, expected_myopic_regret,
                   forward_distribution, mistake_probability,
                   reference_variance, step_covariance, walk_moments)

__version__ = "0.1.0"
