import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaysim.magnetics import (
    core_reluctance,
    current_from_flux,
    flux_for_force_balance,
    force,
    mmf_dphi,
    reluctance,
    reluctance_dz,
    spring_force,
)
from relaysim.params import (
    BASIC,
    ActuatorParams,
    DomainError,
    ModelError,
    ReluctanceModel,
    table_i,
)

P = table_i()
SAT = ReluctanceModel.saturation(20e-6)

gaps = st.floats(0.0, 0.05, allow_nan=False)
fluxes = st.floats(-19.9e-6, 19.9e-6, allow_nan=False)


def test_basic_reluctance_is_affine_in_gap():
    assert reluctance(BASIC, P, 0.0, 0.0) == P.R0
    assert reluctance(BASIC, P, 0.01, 5e-6) == pytest.approx(P.R0 + P.kR * 0.01, rel=1e-15)


def test_saturated_reluctance_at_half_saturation_doubles_core():
    assert reluctance(SAT, P, 0.0, 10e-6) == pytest.approx(2 * P.R0, rel=1e-14)


def test_force_value():
    # -0.5 * 2e10 * (1e-5)^2
    assert force(P, 1e-5) == pytest.approx(-1.0, rel=1e-14)


def test_spring_force_sign():
    assert spring_force(P, P.zs) == 0.0
    assert spring_force(P, 0.0) == pytest.approx(P.ks * P.zs)


def test_current_from_flux_hopkinson():
    z, phi = 0.004, 3e-6
    assert current_from_flux(BASIC, P, z, phi) * P.N == pytest.approx(phi * (P.R0 + P.kR * z))


def test_domain_errors():
    with pytest.raises(DomainError):
        reluctance(BASIC, P, -1e-9, 0.0)
    with pytest.raises(DomainError):
        reluctance(SAT, P, 0.0, 20e-6)
    with pytest.raises(DomainError):
        mmf_dphi(SAT, P, 0.0, -20e-6)


def test_flux_for_force_balance():
    phi = flux_for_force_balance(P, 0.0)
    assert force(P, phi) + spring_force(P, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert math.isnan(flux_for_force_balance(P, 2 * P.zs))


def test_parameter_validation():
    with pytest.raises(ModelError, match="z_min < z_max"):
        table_i(z_min=0.01, z_max=0.005)
    with pytest.raises(ModelError):
        P.with_(R=-1.0)
    with pytest.raises(ModelError):
        P.with_(N=1.5)
    with pytest.raises(ModelError, match="phi_sat"):
        ActuatorParams(50, 1200, 1.5e7, 2e10, 1e-3, 55, 0.015, 0.1).model("saturation")
    with pytest.raises(ModelError):
        ReluctanceModel.saturation(0.0)


@given(gaps, fluxes)
def test_force_even_and_attractive(z, phi):
    assert force(P, phi) <= 0.0
    assert force(P, phi) == force(P, -phi)


@given(gaps, fluxes)
def test_saturation_never_below_basic(z, phi):
    assert reluctance(SAT, P, z, phi) >= reluctance(BASIC, P, z, phi)
    assert reluctance_dz(SAT, P, z, phi) == reluctance_dz(BASIC, P, z, phi) == P.kR


@given(gaps, fluxes)
def test_reluctance_even_in_flux(z, phi):
    assert reluctance(SAT, P, z, phi) == reluctance(SAT, P, z, -phi)


@settings(max_examples=200)
@given(gaps, st.floats(-19e-6, 19e-6).filter(lambda f: abs(f) > 1e-8))
def test_mmf_derivative_matches_difference_quotient(z, phi):
    def mmf(f):
        return f * reluctance(SAT, P, z, f)

    h = 1e-4 * min(abs(phi), SAT.phi_sat - abs(phi))
    fd = (mmf(phi + h) - mmf(phi - h)) / (2 * h)
    assert mmf_dphi(SAT, P, z, phi) == pytest.approx(fd, rel=1e-6)


def test_mmf_derivative_continuous_through_zero():
    left = mmf_dphi(SAT, P, 0.003, -1e-15)
    right = mmf_dphi(SAT, P, 0.003, 1e-15)
    at = mmf_dphi(SAT, P, 0.003, 0.0)
    assert left == pytest.approx(at, rel=1e-9) and right == pytest.approx(at, rel=1e-9)


@given(gaps)
def test_huge_saturation_flux_recovers_basic(z):
    big = ReluctanceModel.saturation(1e6)
    assert core_reluctance(big, P, 1e-5) == pytest.approx(P.R0, rel=1e-10)
    assert reluctance(big, P, z, 1e-5) == pytest.approx(reluctance(BASIC, P, z, 1e-5), rel=1e-10)
