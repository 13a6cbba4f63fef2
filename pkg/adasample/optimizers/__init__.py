"""Ada-SGD, Ada-ADAM, Ada-momentum and the fixed-step baselines."""

from .directions import (
    AdamDirection,
    AdamState,
    MomentumDirection,
    MomentumState,
    SgdDirection,
    make_direction,
)
from .engine import initial_state, resolve_lambda, run_loop
from .records import RunLog, RunStatus
from .runners import (
    run_ada_adam,
    run_ada_momentum,
    run_ada_sgd,
    run_baseline,
    run_milestone_mode,
    run_optimizer,
)

__all__ = [
    "AdamDirection",
    "AdamState",
    "MomentumDirection",
    "MomentumState",
    "SgdDirection",
    "make_direction",
    "initial_state",
    "resolve_lambda",
    "run_loop",
    "RunLog",
    "RunStatus",
    "run_ada_adam",
    "run_ada_momentum",
    "run_ada_sgd",
    "run_baseline",
    "run_milestone_mode",
    "run_optimizer",
]
