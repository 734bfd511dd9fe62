"""Structure-preserving simulation of a planar Cosserat rod rolling without sliding."""
from .core import (
    BC,
    REFERENCE_PARAMETERS,
    FieldLevel,
    GhostKind,
    Grid,
    InitialData,
    RodParameters,
    StatePair,
    diff1_central,
    diff1_forward,
    diff2,
    diff4,
    ghost_value,
)
from .diagnostics import (
    DiagnosticsRecord,
    angular_momentum,
    constraint_residuals,
    linear_momentum,
    stretch_extrema,
    torsional_momentum,
    total_energy,
)
from .stepper import (
    ConstraintViolation,
    Multipliers,
    StepResult,
    build_initial_pair,
    constrained_step,
    constraint_coefficients,
    free_predictor,
    free_step,
    solve_multipliers,
    stability_limit,
)
from .config import RunConfig, load_config, parse_config
from .simulate import convergence, integrate, run, simulate

__version__ = "0.1.0"
