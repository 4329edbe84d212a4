import numpy as np
import pytest

from relaysim.bifurcation import (
    EndpointKind,
    SwitchingCase,
    classify_case,
    hysteresis_dynamic,
    hysteresis_quasistatic,
    sweep,
)
from relaysim.equilibria import Stability, critical_points
from relaysim.hybrid import Mode, SimOptions
from relaysim.params import BASIC, ModelError, ReluctanceModel, table_i

P = table_i()
RELAY = table_i(z_min=0.0, z_max=5e-3)
SAT = ReluctanceModel.saturation(20e-6)


def test_continuous_sweep_topology():
    cp = critical_points(P, BASIC)
    data = sweep(P, BASIC, (0.0, 55.0), 551)
    # one branch from u = 0 and one born at u0 where the solution leaves z >= 0
    ids = {r.branch for r in data.records}
    assert len(ids) == 2
    kinds = {(a.branch, a.kind) for a in data.annotations}
    tang = [a for a in data.annotations if a.kind is EndpointKind.TANGENTIAL]
    assert len(tang) == 2 and len({a.branch for a in tang}) == 2
    for a in tang:
        assert a.u == pytest.approx(cp.ub, rel=1e-6)
    (exit_,) = [a for a in data.annotations if a.kind is EndpointKind.DOMAIN_EXIT]
    assert exit_.u == pytest.approx(cp.u0, rel=1e-6)
    assert len(kinds) == 3


def test_sweep_branches_keep_stability():
    data = sweep(P, BASIC, (1.0, 45.0), 201)
    for b in {r.branch for r in data.records}:
        pts = data.branch_points(b)
        assert len({p.stability for p in pts}) == 1
        # a branch is continuous in the normalized state
        z = np.array([p.z for p in pts])
        assert np.all(np.abs(np.diff(z)) < 0.2 * P.zs)


def test_hybrid_sweep_case3():
    cp = critical_points(RELAY, BASIC)
    data = sweep(RELAY, BASIC, (0.0, 50.0), 501, hybrid=True)
    modes = {b.mode for b in data.branches.values()}
    assert modes == {Mode.MAX_GAP, Mode.MOTION, Mode.MIN_GAP}
    lift = data.endpoint_voltages(EndpointKind.LIFT_OFF)
    assert any(abs(u - cp.u_max) < 1e-5 for u in lift)
    assert any(abs(u - cp.u_min) < 1e-5 for u in lift)
    for r in data.records:
        if r.mode is Mode.MOTION:
            assert r.stability is Stability.UNSTABLE
        else:
            assert r.stability is not Stability.UNSTABLE


def test_sweep_single_point_and_validation():
    data = sweep(P, BASIC, (20.0, 20.0))
    assert len(data.records) == 2
    with pytest.raises(ValueError):
        sweep(P, BASIC, (0.0, 1.0), 1)


@pytest.mark.parametrize(
    "z_max,case",
    [(0.02, SwitchingCase.CASE1), (0.012, SwitchingCase.CASE2), (0.005, SwitchingCase.CASE3)],
)
def test_classify_case(z_max, case):
    assert classify_case(table_i(0.0, z_max), BASIC) is case


def test_classify_case_rejects_high_lower_stop():
    with pytest.raises(ModelError):
        classify_case(table_i(0.0099, 0.012), BASIC)


def test_saturated_case_uses_saturated_fold():
    # between the two fold gaps the classification depends on the law
    z = 0.0096
    assert classify_case(table_i(0.0, z), BASIC) is SwitchingCase.CASE3
    assert classify_case(table_i(0.0, z), SAT) is SwitchingCase.CASE2


def test_quasistatic_loop_shape():
    loop = hysteresis_quasistatic(RELAY, BASIC, n_points=101)
    cp = critical_points(RELAY, BASIC)
    assert loop.closing_voltage == pytest.approx(cp.u_max, rel=1e-10)
    assert loop.opening_voltage == pytest.approx(cp.u_min, rel=1e-10)
    assert set(np.unique(loop.up_z)) <= {RELAY.z_min, RELAY.z_max}
    assert np.all(np.diff(loop.up_u) >= 0) and np.all(np.diff(loop.down_u) <= 0)
    assert loop.up_z[0] == RELAY.z_max and loop.up_z[-1] == RELAY.z_min
    assert loop.down_z[0] == RELAY.z_min and loop.down_z[-1] == RELAY.z_max


def test_quasistatic_requires_case3():
    with pytest.raises(ModelError):
        hysteresis_quasistatic(table_i(0.0, 0.02), BASIC)


def test_dynamic_loop_basic():
    cp = critical_points(RELAY, BASIC)
    loop = hysteresis_dynamic(RELAY, BASIC, 2.0)
    assert loop.closing_voltage == pytest.approx(cp.u_max, rel=0.01)
    assert loop.opening_voltage == pytest.approx(cp.u_min, rel=0.01)
    assert loop.closing_voltage > cp.u_max  # the armature needs time to travel


def test_dynamic_fast_ramp_warns():
    with pytest.warns(RuntimeWarning, match="quasi-static"):
        hysteresis_dynamic(RELAY, BASIC, 2000.0, opts=SimOptions(output_dt=1e-5), check_convergence=True)


def test_dynamic_rejects_bad_rate():
    with pytest.raises(ValueError):
        hysteresis_dynamic(RELAY, BASIC, 0.0)
