"""Hybrid-model analysis of single-coil electromechanical switching devices."""

from .bifurcation import (
    BranchData,
    HysteresisLoop,
    SwitchingCase,
    classify_case,
    hysteresis_dynamic,
    hysteresis_quasistatic,
    sweep,
)
from .equilibria import (
    CriticalPoints,
    Equilibrium,
    Stability,
    classify_stability,
    continuous_equilibria,
    critical_points,
    hybrid_equilibria,
    jacobian,
    steady_flux,
)
from .hybrid import (
    EventKind,
    Mode,
    SimOptions,
    SimulationError,
    State,
    Trajectory,
    VoltageProfile,
    flow,
    in_flow_set,
    jump,
    simulate,
)
from .params import BASIC, ActuatorParams, DomainError, ModelError, ReluctanceModel, table_i

__version__ = "0.1.0"

__all__ = [
    "BranchData",
    "HysteresisLoop",
    "SwitchingCase",
    "classify_case",
    "hysteresis_dynamic",
    "hysteresis_quasistatic",
    "sweep",
    "CriticalPoints",
    "Equilibrium",
    "Stability",
    "classify_stability",
    "continuous_equilibria",
    "critical_points",
    "hybrid_equilibria",
    "jacobian",
    "steady_flux",
    "EventKind",
    "Mode",
    "SimOptions",
    "SimulationError",
    "State",
    "Trajectory",
    "VoltageProfile",
    "flow",
    "in_flow_set",
    "jump",
    "simulate",
    "BASIC",
    "ActuatorParams",
    "DomainError",
    "ModelError",
    "ReluctanceModel",
    "table_i",
]
