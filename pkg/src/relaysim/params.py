"""Physical parameters of a single-coil reluctance actuator and the reluctance law."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class ModelError(ValueError):
    """Invalid parameter set or a violated modelling assumption."""


class DomainError(ValueError):
    """A state lies outside the domain where the model is defined."""


# |phi| >= phi_sat * (1 - FLUX_MARGIN) is rejected.
FLUX_MARGIN = 1e-12


@dataclass(frozen=True)
class ActuatorParams:
    """All constants of the device, in SI units.

    ``phi_sat`` is only used by the saturation model; ``z_max`` may be
    ``math.inf`` when there is no upper mechanical stop.
    """

    R: float  # coil resistance, ohm
    N: int  # number of turns
    R0: float  # core reluctance, 1/H
    kR: float  # gap reluctance slope, 1/(H m)
    m: float  # armature mass, kg
    ks: float  # spring stiffness, N/m
    zs: float  # spring rest position, m
    c: float  # damping, N s/m
    z_min: float = 0.0
    z_max: float = math.inf
    phi_sat: float | None = None  # Wb

    def __post_init__(self):
        for name in ("R", "R0", "kR", "m", "ks", "c", "zs"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ModelError(f"{name} must be finite and > 0 (got {value!r})")
        if int(self.N) != self.N or self.N <= 0:
            raise ModelError(f"N must be a positive integer (got {self.N!r})")
        if not (math.isfinite(self.z_min) and self.z_min >= 0):
            raise ModelError(f"z_min must satisfy 0 <= z_min (got {self.z_min!r})")
        if math.isnan(self.z_max) or not self.z_min < self.z_max:
            raise ModelError(
                f"z_min < z_max violated (z_min={self.z_min!r}, z_max={self.z_max!r})"
            )
        if self.phi_sat is not None and not (self.phi_sat > 0):
            raise ModelError(f"phi_sat must be > 0 (got {self.phi_sat!r})")

    def with_(self, **changes) -> "ActuatorParams":
        return replace(self, **changes)

    def model(self, kind: str = "basic") -> "ReluctanceModel":
        """Reluctance model of the given kind using this device's ``phi_sat``."""
        if kind == "basic":
            return BASIC
        if kind == "saturation":
            if self.phi_sat is None:
                raise ModelError("saturation model requires phi_sat")
            return ReluctanceModel.saturation(self.phi_sat)
        raise ModelError(f"unknown reluctance model {kind!r}")


@dataclass(frozen=True)
class ReluctanceModel:
    """Basic (``phi_sat is None``) or Froehlich-Kennelly saturation reluctance."""

    phi_sat: float | None = None

    def __post_init__(self):
        if self.phi_sat is not None and not (self.phi_sat > 0):
            raise ModelError(f"phi_sat must be > 0 (got {self.phi_sat!r})")

    @classmethod
    def basic(cls) -> "ReluctanceModel":
        return cls(None)

    @classmethod
    def saturation(cls, phi_sat: float) -> "ReluctanceModel":
        return cls(float(phi_sat))

    @property
    def saturated(self) -> bool:
        return self.phi_sat is not None

    @property
    def name(self) -> str:
        return "saturation" if self.saturated else "basic"

    @property
    def flux_limit(self) -> float:
        """Largest admissible |phi| (``inf`` for the basic model)."""
        if self.phi_sat is None:
            return math.inf
        return self.phi_sat * (1.0 - FLUX_MARGIN)


BASIC = ReluctanceModel()


def table_i(z_min: float = 0.0, z_max: float = math.inf) -> ActuatorParams:
    """Parameters of the commercial relay used throughout the analysis.

    The stroke limits are not part of the reference set; pass them explicitly.
    """
    return ActuatorParams(
        R=50.0,
        N=1200,
        R0=1.5e7,
        kR=2e10,
        m=1e-3,
        ks=55.0,
        zs=15e-3,
        c=0.1,
        z_min=z_min,
        z_max=z_max,
        phi_sat=20e-6,
    )
