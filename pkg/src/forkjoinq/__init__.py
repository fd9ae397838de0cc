"""forkjoinq: sojourn-time analysis of (n,k) fork-join queues.

Exact order-statistic transformation weights, lifted Nelson/Varma
approximations for non-purging queues, bounds for purging queues, and a
deterministic discrete-event simulator to validate all of it.
"""

from .analytic import (
    EXACT,
    FLOATING,
    ApproxValue,
    HarmonicCache,
    QueueSpec,
    harmonics,
    nelson_basic,
    nelson_lt,
    varma_basic,
    varma_lt,
)
from .bounds import (
    BoundSet,
    ExpOrderMoments,
    bound_set,
    naive_upper,
    refined_upper,
    split_merge_lower,
    split_merge_upper,
    staging_lower,
)
from .coeffs import WTable, a_coefficient, load_table, save_table, w_coefficient, w_table
from .errors import (
    CacheFormatError,
    DomainError,
    ForkJoinError,
    InapplicableError,
    InstabilityError,
)
from .ordstat import (
    DiscreteJointDistribution,
    LTIdentityReport,
    maxima_cdf,
    order_statistic_cdf,
    standard_test_family,
    verify_lt_identity,
)
from .sim import SimConfig, SimResult, run, run_joint, sample_paths

__version__ = "0.1.0"

__all__ = [
    "EXACT",
    "FLOATING",
    "ApproxValue",
    "HarmonicCache",
    "QueueSpec",
    "harmonics",
    "nelson_basic",
    "nelson_lt",
    "varma_basic",
    "varma_lt",
    "BoundSet",
    "ExpOrderMoments",
    "bound_set",
    "naive_upper",
    "refined_upper",
    "split_merge_lower",
    "split_merge_upper",
    "staging_lower",
    "WTable",
    "a_coefficient",
    "load_table",
    "save_table",
    "w_coefficient",
    "w_table",
    "CacheFormatError",
    "DomainError",
    "ForkJoinError",
    "InapplicableError",
    "InstabilityError",
    "DiscreteJointDistribution",
    "LTIdentityReport",
    "maxima_cdf",
    "order_statistic_cdf",
    "standard_test_family",
    "verify_lt_identity",
    "SimConfig",
    "SimResult",
    "run",
    "run_joint",
    "sample_paths",
    "__version__",
]
