"""lq-constrained variational minimization via q-dependent shrinkage.

Closed-form constant-factor minimizers for weighted lq penalties
(0 <= q <= 2) built from a catalog of shrinkage rules, a shrinked
Landweber iteration for ill-posed first-kind problems, and brute-force
oracles that verify every closed-form claim at desk scale.
"""

from .estimators import MaxEntRegressor, ShrinkedLandweber
from .frames import (
    BiFrame,
    ForwardProblem,
    Frame,
    NotAFrameError,
    canonical_dual,
    frame_bounds,
    make_pseudo_inverse,
)
from .prox import (
    DecoupledProblem,
    ProxResult,
    constant_factor_audit,
    oracle_minimize,
    oracle_scalar,
    shrink_minimize,
    zero_threshold,
)
from .shrinkage import (
    QDependentRule,
    ShrinkageRule,
    catalog,
    check_axioms,
    hard_soft_constant,
    hard_soft_rule,
    rule_by_name,
    wrap_q,
)
from .solver import (
    DivergedError,
    LandweberConfig,
    SolverTrace,
    landweber_shrink,
    maxent_solve,
    objective_monotone_check,
)
from .variational import (
    VariationalProblem,
    analysis_objective,
    synthesis_minimizer,
    synthesis_objective,
    variational_minimizer,
)

__version__ = "0.1.0"

__all__ = [
    "BiFrame",
    "DecoupledProblem",
    "DivergedError",
    "ForwardProblem",
    "Frame",
    "LandweberConfig",
    "MaxEntRegressor",
    "NotAFrameError",
    "ProxResult",
    "QDependentRule",
    "ShrinkageRule",
    "ShrinkedLandweber",
    "SolverTrace",
    "VariationalProblem",
    "analysis_objective",
    "canonical_dual",
    "catalog",
    "check_axioms",
    "constant_factor_audit",
    "frame_bounds",
    "hard_soft_constant",
    "hard_soft_rule",
    "landweber_shrink",
    "make_pseudo_inverse",
    "maxent_solve",
    "objective_monotone_check",
    "oracle_minimize",
    "oracle_scalar",
    "rule_by_name",
    "shrink_minimize",
    "synthesis_minimizer",
    "synthesis_objective",
    "variational_minimizer",
    "wrap_q",
    "zero_threshold",
]
