import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexjoint.control import (Controller, ControllerKind, DivergedTrajectory,
                               GainSet, Reference, cascaded_torque,
                               fuzzy_cascaded_torque, motor_reference, pd,
                               simulate, single_pd_torque)
from flexjoint.fuzzy import FlrBounds
from flexjoint.plant import (DisturbanceModel, PlantParams, SimConfig, State,
                             disturbance_sample, euler_step)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


# ---------------------------------------------------------------------------
# control-law pieces

@given(kp=st.floats(0, 100), kd=st.floats(0, 100), e=finite, de=finite,
       a=st.floats(-10, 10))
@settings(max_examples=200, deadline=None)
def test_pd_linear(kp, kd, e, de, a):
    assert pd(kp, kd, a * e, a * de) == pytest.approx(a * pd(kp, kd, e, de),
                                                      rel=1e-9, abs=1e-9)


def test_motor_reference_at_rest(params):
    # frozen from 40-digit decimal arithmetic: mgl/k
    assert motor_reference(params, 0.0, 0.0) == pytest.approx(0.05000352,
                                                              rel=1e-12)


def test_gain_set_validation():
    with pytest.raises(ValueError):
        GainSet(kp1=-1.0)


def test_cascaded_torque_frozen(params, gains):
    # all intermediate values recomputed independently at 40-digit precision
    u, d = cascaded_torque(params, gains, State(0.0, 0.0, 0.0, 0.0),
                           (1.0, 0.0, 0.0))
    assert d.u_pd1 == pytest.approx(52.19, abs=0.0)
    assert d.x3d == pytest.approx(0.57190352, rel=1e-15)
    assert (d.e1, d.e2, d.e4) == (1.0, 0.0, 0.0)
    assert d.e3 == d.x3d
    assert u == pytest.approx(139.83041064, rel=1e-12)
    assert (d.kp1_eff, d.kd1_eff, d.kp2_eff, d.kd2_eff) == (
        52.19, 10.18, 144.5, 8.636)


@given(x1d=st.floats(-1.5, 1.5))
@settings(max_examples=100, deadline=None)
def test_set_point_consistency(x1d):
    # at the exact set point all errors vanish and the torque just holds
    # the link against gravity
    p, g = PlantParams(), GainSet()
    x3d = motor_reference(p, x1d, 0.0)
    u, d = cascaded_torque(p, g, State(x1d, 0.0, x3d, 0.0), (x1d, 0.0, 0.0))
    assert (d.e1, d.e2, d.e3, d.e4) == (0.0, 0.0, 0.0, 0.0)
    assert u == pytest.approx(p.mgl * math.cos(x1d), rel=1e-12)


def test_fuzzy_degenerates_to_plain_cascade(params, gains, rng):
    zero = FlrBounds()
    for _ in range(1000):
        s = State(*rng.uniform(-2, 2, size=4))
        ref = (rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0)
        assert fuzzy_cascaded_torque(params, gains, zero, s, ref) == \
            cascaded_torque(params, gains, s, ref)


def test_fuzzy_loops_can_be_disabled(params, gains, bounds):
    s = State(0.2, -0.1, 0.15, 0.3)
    ref = (1.0, 0.0, 0.0)
    _, d_both = fuzzy_cascaded_torque(params, gains, bounds, s, ref)
    _, d_outer = fuzzy_cascaded_torque(params, gains, bounds, s, ref,
                                       fuzzy_loop2=False)
    _, d_inner = fuzzy_cascaded_torque(params, gains, bounds, s, ref,
                                       fuzzy_loop1=False)
    assert d_outer.kp1_eff == d_both.kp1_eff != gains.kp1
    assert d_outer.kp2_eff == gains.kp2
    assert d_inner.kp1_eff == gains.kp1
    assert d_inner.kd2_eff != gains.kd2


def test_single_pd_torque_is_plain_pd():
    u, d = single_pd_torque((117.0, 29.99), State(0.2, 0.1, 0.0, 0.0),
                            (1.0, 0.0, 0.0))
    assert u == pytest.approx(117.0 * 0.8 + 29.99 * (-0.1), rel=1e-12)
    assert math.isnan(d.x3d) and math.isnan(d.e3)


def test_controller_dispatch(params, gains, bounds):
    s = State(0.1, 0.0, 0.05, 0.0)
    ref = (1.0, 0.0, 0.0)
    for kind in ControllerKind:
        c = Controller(kind=kind, gains=gains, flr_bounds=bounds)
        u, d = c.torque(params, s, ref)
        assert math.isfinite(u)
    plain = Controller(kind=ControllerKind.CASCADED_PD, gains=gains)
    assert plain.torque(params, s, ref) == cascaded_torque(params, gains, s, ref)


# ---------------------------------------------------------------------------
# references

def test_square_reference():
    r = Reference(kind="square")
    assert r(0.0) == (1.0, 0.0, 0.0)
    assert r(9.95) == (1.0, 0.0, 0.0)
    assert r(10.0) == (0.0, 0.0, 0.0)


def test_sine_reference():
    r = Reference(kind="sine")
    x, dx, ddx = r(0.7)
    assert (x, dx, ddx) == (math.sin(0.7), math.cos(0.7), -math.sin(0.7))


def test_constant_reference():
    assert Reference(kind="constant", value=0.5)(3.0) == (0.5, 0.0, 0.0)


def test_reference_validation():
    with pytest.raises(ValueError):
        Reference(kind="triangle")


# ---------------------------------------------------------------------------
# closed-loop simulation

def test_simulate_record_grid(params, sim, gains):
    traj = simulate(params, sim, Controller(ControllerKind.CASCADED_PD, gains),
                    Reference("square"), DisturbanceModel())
    assert len(traj.records) == 200
    np.testing.assert_allclose(traj.t, np.arange(200) * 0.05, atol=1e-12)
    assert traj.records[0].state == State(0.0, 0.0, 0.0, 0.0)


def test_simulate_zero_horizon_single_record(params, gains):
    sim = SimConfig(horizon=0.0)
    traj = simulate(params, sim, Controller(ControllerKind.CASCADED_PD, gains),
                    Reference("square"), DisturbanceModel())
    assert len(traj.records) == 1
    assert traj.records[0].t == 0.0
    assert traj.final_state == State(0.0, 0.0, 0.0, 0.0)


def test_simulate_zoh_replay(params, gains):
    """Strong integration oracle: every control period is reproduced exactly
    by re-integrating from the recorded state with the held torque and the
    same indexed disturbance draws."""
    sim = SimConfig(horizon=2.0)
    dist = DisturbanceModel(kind="uniform", amplitude=10.0, seed=42)
    traj = simulate(params, sim, Controller(ControllerKind.CASCADED_PD, gains),
                    Reference("square"), dist)
    for n in range(len(traj.records) - 1):
        s = traj.records[n].state
        u = traj.records[n].u
        for j in range(sim.substeps):
            d1, d2 = disturbance_sample(dist, n * sim.substeps + j)
            s = euler_step(params, s, u, d1, d2, sim.sim_dt)
        assert s == traj.records[n + 1].state


def test_simulate_per_control_step_hold(params, gains):
    sim = SimConfig(horizon=1.0)
    dist = DisturbanceModel(kind="uniform", amplitude=10.0, seed=9,
                            hold="per-control-step")
    traj = simulate(params, sim, Controller(ControllerKind.CASCADED_PD, gains),
                    Reference("square"), dist)
    # replay: one draw per control period, indexed by the control step
    s = traj.records[3].state
    u = traj.records[3].u
    d1, d2 = disturbance_sample(dist, 3)
    for _ in range(sim.substeps):
        s = euler_step(params, s, u, d1, d2, sim.sim_dt)
    assert s == traj.records[4].state


def test_simulate_deterministic(params, sim, gains, bounds):
    c = Controller(ControllerKind.FUZZY_CASCADED, gains, bounds)
    dist = DisturbanceModel(kind="uniform", amplitude=10.0, seed=11)
    a = simulate(params, sim, c, Reference("square"), dist)
    b = simulate(params, sim, c, Reference("square"), dist)
    assert a.final_state == b.final_state
    assert list(a.e1) == list(b.e1)


def test_single_pd_diverges(params, sim):
    with pytest.raises(DivergedTrajectory) as exc:
        simulate(params, sim, Controller(ControllerKind.SINGLE_PD),
                 Reference("square"), DisturbanceModel())
    assert exc.value.sim_step > 0
    assert "diverged" in str(exc.value)


def test_error_rows_exact_per_step(params, gains):
    """Discrete error-propagation identities, one integration step per
    control step so every record is one Euler step:
      e1' = e1 + dt*e2
      e2' = e2 - dt*(-kp1*e1 - kd1*e2 + (k/I_l)*e3)   [constant reference]
      e4' = e4 + dt*(-((k+kp2)/I_m)*e3 - ((mu+kd2)/I_m)*e4)
    These hold to rounding error; the third error coordinate has no such
    closed row because the motor reference moves with the state."""
    # one integration step per control step; dt small enough that the
    # forward-Euler discretization of the fast loop stays stable
    sim = SimConfig(sim_dt=0.005, control_dt=0.005, horizon=1.0)
    traj = simulate(params, sim, Controller(ControllerKind.CASCADED_PD, gains),
                    Reference("constant"), DisturbanceModel())
    dt = sim.sim_dt
    p, g = params, gains
    for a, b in zip(traj.records[:-1], traj.records[1:]):
        da, db = a.diag, b.diag
        e2dot = g.kp1 * da.e1 + g.kd1 * da.e2 - p.k / p.I_l * da.e3
        e4dot = -(p.k + g.kp2) / p.I_m * da.e3 - (p.mu + g.kd2) / p.I_m * da.e4
        assert db.e1 == pytest.approx(da.e1 + dt * da.e2, rel=1e-9, abs=1e-12)
        assert db.e2 == pytest.approx(da.e2 - dt * e2dot, rel=1e-9, abs=1e-12)
        assert db.e4 == pytest.approx(da.e4 + dt * e4dot, rel=1e-9, abs=1e-12)


def test_trajectory_array_views(params, gains):
    sim = SimConfig(horizon=1.0)
    traj = simulate(params, sim, Controller(ControllerKind.CASCADED_PD, gains),
                    Reference("square"), DisturbanceModel())
    assert traj.e1.shape == traj.x1.shape == traj.t.shape == (20,)
    assert traj.e1[0] == 1.0 and traj.x1[0] == 0.0
