"""Multi-survivor dynamic programming for constrained discrete optimization."""

from .core import (
    Alphabet,
    Assignment,
    CompletionBound,
    Counters,
    CsfOracle,
    FunctionCsf,
    PartialAssignment,
    ProblemH,
    StructuredCsf,
    Verdict,
    evaluate_objective,
    extend,
)
from .trellis import Trellis, build_trellis
from .solver import (
    InfeasibleError,
    SolveReport,
    Survivor,
    SurvivorPolicy,
    acms,
    completion_search,
    measure_ne_bound,
    msdp_solve,
)
from .baselines import SaConfig, exhaustive_search, simulated_annealing
from .kernels import BACKEND

__version__ = "0.1.0"
