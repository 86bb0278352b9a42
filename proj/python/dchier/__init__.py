"""Direction-constrained hierarchical control."""

from ._dchier import (
    BracketError,
    ConfigError,
    InvalidInput,
    admittance_step,
    angle,
    forward_kinematics,
    get_range,
    jacobian,
    merge,
    null_projector,
    pinv,
    run_scenario,
    solve,
    steady_deviation,
)

__all__ = [
    "BracketError",
    "ConfigError",
    "InvalidInput",
    "admittance_step",
    "angle",
    "forward_kinematics",
    "get_range",
    "jacobian",
    "merge",
    "null_projector",
    "pinv",
    "run_scenario",
    "solve",
    "steady_deviation",
]
