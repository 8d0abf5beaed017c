"""Bin packing with general cardinality cost structures.

Exact solvers for the tractable cost classes, an asymptotic approximation
scheme for the general case, a subset-DP oracle and instance generators,
all in exact rational arithmetic.
"""

from .classify import Classification, Verdict, average_cost, minimizer_k
from .core import (
    BadAnchor,
    BadEpsilon,
    CostFunction,
    Density,
    GcbpError,
    Instance,
    Item,
    NonMonotoneCost,
    Packing,
    SizeOutOfRange,
    VerificationReport,
    bin_density_class,
    packing_cost,
    validate_instance,
    verify_packing,
)
from .driver import AptasBudgetExceeded, AptasCertificate, aptas
from .exact_poly import WrongClass, max_weight_matching_exact_size, solve_k1, solve_k2
from .milp import BudgetExceeded, MilpModel, solve_ip, solve_milp
from .oracle import TooLarge, brute_force_opt, greedy_baseline
from .rational_lp import LpModel, LpSolution, Relation, Status, find_basic_feasible, solve_lp

__version__ = "0.1.0"
