import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from relaysim.equilibria import (
    Stability,
    classify_stability,
    continuous_equilibria,
    critical_points,
    hybrid_equilibria,
    jacobian,
    scaled_residual,
    steady_flux,
)
from relaysim.hybrid import Mode
from relaysim.params import BASIC, ModelError, ReluctanceModel, table_i

P = table_i()
RELAY = table_i(z_min=0.0, z_max=5e-3)
SAT = ReluctanceModel.saturation(20e-6)
MODELS = [BASIC, SAT]
model_ids = ["basic", "saturation"]


def mmf(model, z, phi):
    core = P.R0 if model.phi_sat is None else P.R0 / (1 - abs(phi) / model.phi_sat)
    return phi * (core + P.kR * z)


def brentq_flux(model, z, u):
    b = P.N * u / P.R
    hi = 1.0 if model.phi_sat is None else model.phi_sat * (1 - 1e-15)
    return brentq(lambda f: mmf(model, z, f) - b, 0.0, hi, xtol=1e-24, rtol=1e-15)


@pytest.mark.parametrize("model", MODELS, ids=model_ids)
@pytest.mark.parametrize("z,u", [(0.0, 5.0), (0.005, 20.0), (0.015, 45.0), (0.03, 1e-3)])
def test_steady_flux_against_bracketing(model, z, u):
    want = brentq_flux(model, z, u)
    assert steady_flux(P, model, z, u) == pytest.approx(want, rel=1e-12)
    assert steady_flux(P, model, z, -u) == pytest.approx(-want, rel=1e-12)


def test_steady_flux_saturation_lowers_flux():
    basic = steady_flux(P, BASIC, 0.0, 5.0)
    sat = steady_flux(P, SAT, 0.0, 5.0)
    assert basic == pytest.approx(8e-6, rel=1e-12)
    assert sat < basic
    assert abs(mmf(SAT, 0.0, sat) - P.N * 5.0 / P.R) < 1e-12 * P.N * 5.0 / P.R


@settings(max_examples=150)
@given(st.floats(0.0, 0.05), st.floats(-500.0, 500.0))
def test_steady_flux_within_saturation(z, u):
    phi = steady_flux(P, SAT, z, u)
    assert abs(phi) < SAT.phi_sat
    assert math.copysign(1.0, phi) == math.copysign(1.0, u) or phi == 0.0


def test_steady_flux_rejects_negative_gap():
    with pytest.raises(ValueError):
        steady_flux(P, BASIC, -1e-3, 1.0)


def test_classify_stability():
    assert classify_stability(np.diag([-1.0, -2.0])) is Stability.STABLE
    assert classify_stability(np.diag([-1.0, 3.0])) is Stability.UNSTABLE
    assert classify_stability(np.array([[0.0, 1.0], [-1.0, 0.0]])) is Stability.MARGINAL
    with pytest.raises(ValueError):
        classify_stability(np.array([[np.nan]]))


@pytest.mark.parametrize("model", MODELS, ids=model_ids)
@settings(max_examples=120, deadline=None)
@given(u=st.floats(-60.0, 60.0))
def test_continuous_equilibria_are_equilibria(model, u):
    eqs = continuous_equilibria(P, model, u)
    assert len(eqs) <= 3
    for e in eqs:
        assert e.z >= 0.0 and e.v == 0.0
        assert scaled_residual(P, model, e) < 1e-10
        assert e.phi * u >= 0.0


@pytest.mark.parametrize("model", MODELS, ids=model_ids)
@settings(max_examples=100, deadline=None)
@given(u=st.floats(0.1, 60.0))
def test_equilibria_odd_in_voltage(model, u):
    plus = continuous_equilibria(P, model, u)
    minus = continuous_equilibria(P, model, -u)
    assert len(plus) == len(minus)
    for a, b in zip(sorted(plus, key=lambda e: e.z), sorted(minus, key=lambda e: e.z)):
        assert a.z == pytest.approx(b.z, rel=1e-9, abs=1e-15)
        assert a.phi == pytest.approx(-b.phi, rel=1e-9, abs=1e-20)
        assert a.stability == b.stability


def test_zero_voltage_rest_position():
    (eq,) = continuous_equilibria(P, BASIC, 0.0)
    assert eq.z == P.zs and eq.phi == 0.0 and eq.stability is Stability.STABLE


def test_basic_branch_stability_pattern():
    eqs = continuous_equilibria(P, BASIC, 20.0)
    assert [e.stability for e in sorted(eqs, key=lambda e: -e.z)] == [
        Stability.STABLE,
        Stability.UNSTABLE,
    ]


@pytest.mark.parametrize("model", MODELS, ids=model_ids)
def test_hybrid_equilibria_pinned_states_are_exact(model):
    for e in hybrid_equilibria(RELAY, model, 20.0):
        if e.mode is Mode.MAX_GAP:
            assert e.z == RELAY.z_max
        elif e.mode is Mode.MIN_GAP:
            assert e.z == RELAY.z_min
        else:
            assert RELAY.z_min < e.z < RELAY.z_max
        assert scaled_residual(RELAY, model, e) < 1e-10


def test_hybrid_equilibria_low_voltage_only_open():
    eqs = hybrid_equilibria(RELAY, BASIC, 2.0)
    assert [e.mode for e in eqs] == [Mode.MAX_GAP]
    assert eqs[0].stability is Stability.STABLE


def test_lift_off_voltage_is_marginal():
    cp = critical_points(RELAY, BASIC)
    eqs = hybrid_equilibria(RELAY, BASIC, cp.u_max)
    top = [e for e in eqs if e.mode is Mode.MAX_GAP]
    assert top and top[0].stability is Stability.MARGINAL


def test_critical_points_closed_form_basic():
    cp = critical_points(RELAY, BASIC)
    phi0 = math.sqrt(2 * P.ks * P.zs / P.kR)
    assert cp.phi0 == pytest.approx(phi0, rel=1e-15)
    assert cp.u0 == pytest.approx(P.R * P.R0 * phi0 / P.N, rel=1e-15)
    assert cp.zb == pytest.approx(2 * P.zs / 3 - P.R0 / (3 * P.kR), rel=1e-15)
    assert cp.u_min == cp.u0
    assert cp.u0_sat is None and cp.ub_sat is None
    assert cp.closing_voltage(False) == cp.u_max and cp.opening_voltage(False) == cp.u_min


def test_critical_points_fold_is_maximum_of_parabola_voltage():
    # along the force-balance parabola, u(phi) peaks at the fold
    def u_of_phi(phi):
        z = P.zs - P.kR * phi**2 / (2 * P.ks)
        return P.R * mmf(BASIC, z, phi) / P.N

    def du(phi, h=1e-12):
        return (u_of_phi(phi + h) - u_of_phi(phi - h)) / (2 * h)

    phi_peak = brentq(du, 1e-7, 9e-6, xtol=1e-20)
    cp = critical_points(P, BASIC)
    assert cp.phib == pytest.approx(phi_peak, rel=1e-6)
    assert cp.ub == pytest.approx(u_of_phi(phi_peak), rel=1e-10)


def test_critical_points_unbounded_top_has_no_u_max():
    cp = critical_points(P, BASIC)
    assert cp.u_max is None and cp.phi_max is None


def test_saturation_below_closing_flux_rejected():
    with pytest.raises(ModelError):
        critical_points(P, ReluctanceModel.saturation(5e-6))


@pytest.mark.parametrize("phi_sat", [15e-6, 20e-6, 50e-6, 1e-3])
def test_saturation_ordering_over_phi_sat(phi_sat):
    b = critical_points(RELAY, BASIC)
    s = critical_points(RELAY, ReluctanceModel.saturation(phi_sat))
    assert s.u0_sat > b.u0 and s.u_max_sat > b.u_max
    assert s.zb_sat < b.zb and s.phib_sat > b.phib


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 0.03), st.floats(-3e-5, 3e-5), st.floats(-60, 60))
def test_jacobian_structure(z, phi, u):
    J = jacobian(P, BASIC, (z, 0.3, phi), u)
    assert J[0].tolist() == [0.0, 1.0, 0.0]
    assert J[1, 0] == -P.ks / P.m and J[2, 1] == 0.0
    assume(z > 0)
    assert J[2, 2] < 0.0
