"""Reluctance laws, reluctance force and the flux/current map (Hopkinson's law)."""

from __future__ import annotations

import math

from .params import ActuatorParams, DomainError, ReluctanceModel


def _check(model: ReluctanceModel, z: float, phi: float) -> None:
    if z < 0:
        raise DomainError(f"gap must be non-negative (z={z!r})")
    if abs(phi) >= model.flux_limit:
        raise DomainError(f"|phi|={abs(phi)!r} outside (-phi_sat, phi_sat)")


def core_reluctance(model: ReluctanceModel, params: ActuatorParams, phi: float) -> float:
    if model.phi_sat is None:
        return params.R0
    return params.R0 / (1.0 - abs(phi) / model.phi_sat)


def reluctance(model: ReluctanceModel, params: ActuatorParams, z: float, phi: float) -> float:
    """Magnetic circuit reluctance at gap ``z`` and flux ``phi`` (1/H)."""
    _check(model, z, phi)
    return core_reluctance(model, params, phi) + params.kR * z


def reluctance_dz(model: ReluctanceModel, params: ActuatorParams, z: float, phi: float) -> float:
    """Partial derivative of the reluctance w.r.t. the gap; ``kR`` for both laws."""
    _check(model, z, phi)
    return params.kR


def mmf_dphi(model: ReluctanceModel, params: ActuatorParams, z: float, phi: float) -> float:
    """d(phi * R(z, phi)) / d(phi).

    For the saturated core term this is ``R0 / (1 - |phi|/phi_sat)**2``, which
    is continuous through ``phi = 0``.
    """
    _check(model, z, phi)
    if model.phi_sat is None:
        return params.R0 + params.kR * z
    s = 1.0 - abs(phi) / model.phi_sat
    return params.R0 / (s * s) + params.kR * z


def force(params: ActuatorParams, phi: float) -> float:
    """Reluctance force, always attractive (<= 0) and even in ``phi``."""
    return -0.5 * params.kR * phi * phi


def current_from_flux(
    model: ReluctanceModel, params: ActuatorParams, z: float, phi: float
) -> float:
    return phi * reluctance(model, params, z, phi) / params.N


def spring_force(params: ActuatorParams, z: float) -> float:
    return -params.ks * (z - params.zs)


def flux_for_force_balance(params: ActuatorParams, z: float) -> float:
    """Non-negative flux whose force balances the spring at rest at ``z``.

    Returns ``nan`` for ``z > zs`` where no such flux exists.
    """
    arg = 2.0 * params.ks * (params.zs - z) / params.kR
    return math.sqrt(arg) if arg >= 0 else math.nan
