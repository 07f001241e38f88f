"""Privacy of quantum channels against hypothesis-testing adversaries.

Submodules:
    linalg       Hermitian eigensolver and matrix functions
    quantum      density operators and channels
    divergences  optimal tests and quantum divergences
    privacy      audits, bounds and parameter translations
    cli          command-line front end
"""

from .divergences import (
    LogBase,
    PriorPair,
    d_eta,
    d_max,
    d_zero,
    helstrom,
    hockey_stick,
    neyman_pearson,
    relative_entropy,
    trace_distance,
)
from .errors import HtPrivacyError, InvalidInput, NumericalFailure
from .privacy import (
    DpParams,
    ExplicitPairs,
    HtPrivacyParams,
    Status,
    TraceDistanceNeighborhood,
    audit_dp,
    audit_ht,
)
from .quantum import DensityOperator, DepolarizingChannel, KrausChannel

__version__ = "0.1.0"
