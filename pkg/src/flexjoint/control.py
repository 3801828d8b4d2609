"""Cascaded PD control of the flexible-joint plant.

The loop structure: a virtual PD on the link error produces a desired link
acceleration; solving the link equation for the motor angle turns that into
a motor reference x3d; a second PD tracks x3d, and the torque compensates
the spring-coupling and gravity terms.  Optional fuzzy regulators shift the
PD gains online.  The motor-reference rate is taken as zero (its full
chain-rule expression is deliberately not implemented), so the inner-loop
velocity error is simply -x4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .fuzzy import FlrBounds, RuleBase, infer
from .plant import (DisturbanceModel, PlantParams, SimConfig, State,
                    disturbance_sample, euler_step)

DIVERGENCE_LIMIT = 1e6


class DivergedTrajectory(RuntimeError):
    """Simulation aborted because a state component exceeded the limit."""

    def __init__(self, sim_step: int, t: float, state: State):
        self.sim_step = sim_step
        self.t = t
        self.state = state
        super().__init__(
            f"trajectory diverged at sim step {sim_step} (t={t:.4f}s): "
            f"|state| > {DIVERGENCE_LIMIT:g}")


@dataclass(frozen=True)
class GainSet:
    kp1: float = 52.19
    kd1: float = 10.18
    kp2: float = 144.5
    kd2: float = 8.636

    def __post_init__(self):
        for name in ("kp1", "kd1", "kp2", "kd2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


class ControllerKind(str, enum.Enum):
    SINGLE_PD = "single-pd"
    CASCADED_PD = "cascaded"
    FUZZY_CASCADED = "fuzzy-cascaded"
    FUZZY1_PD2 = "fuzzy1-pd2"
    PD1_FUZZY2 = "pd1-fuzzy2"


@dataclass(frozen=True)
class Reference:
    """Tracked link-angle signal; evaluates to (x1d, x1d_dot, x1d_ddot).

    square: 1 rad for t < 10 s, 0 afterwards, derivatives zero.
    sine:   (sin t, cos t, -sin t).
    constant: a fixed set point.
    """

    kind: str = "square"
    value: float = 1.0

    def __post_init__(self):
        if self.kind not in ("square", "sine", "constant"):
            raise ValueError(f"unknown reference kind {self.kind!r}")

    def __call__(self, t: float) -> tuple[float, float, float]:
        if self.kind == "square":
            return (1.0 if t < 10.0 else 0.0), 0.0, 0.0
        if self.kind == "sine":
            return math.sin(t), math.cos(t), -math.sin(t)
        return self.value, 0.0, 0.0


@dataclass(frozen=True)
class Diagnostics:
    """Per-step controller internals recorded alongside the torque."""

    u_pd1: float
    x3d: float
    e1: float
    e2: float
    e3: float
    e4: float
    kp1_eff: float
    kd1_eff: float
    kp2_eff: float
    kd2_eff: float


def pd(kp: float, kd: float, e: float, e_dot: float) -> float:
    """Proportional-derivative law kp*e + kd*e_dot."""
    return kp * e + kd * e_dot


def motor_reference(params: PlantParams, x1: float, u_pd1: float) -> float:
    """Motor angle x3d that makes the link equation deliver u_pd1:
    x3d = u_pd1*I_l/k + x1 + mgl*cos(x1)/k."""
    p = params
    return u_pd1 * p.I_l / p.k + x1 + p.mgl * math.cos(x1) / p.k


def _cascade(params: PlantParams, kp1, kd1, kp2, kd2,
             s: State, ref: tuple[float, float, float]) -> tuple[float, Diagnostics]:
    x1d, x1d_dot, _ = ref
    e1 = x1d - s.x1
    e2 = x1d_dot - s.x2
    u_pd1 = pd(kp1, kd1, e1, e2)
    x3d = motor_reference(params, s.x1, u_pd1)
    e3 = x3d - s.x3
    e4 = 0.0 - s.x4  # x3d rate fixed to zero
    u_pd2 = pd(kp2, kd2, e3, e4)
    u = u_pd2 + u_pd1 * params.I_l + params.mgl * math.cos(s.x1)
    return u, Diagnostics(u_pd1, x3d, e1, e2, e3, e4, kp1, kd1, kp2, kd2)


def cascaded_torque(params: PlantParams, gains: GainSet, s: State,
                    ref: tuple[float, float, float]) -> tuple[float, Diagnostics]:
    """Cascaded PD torque u = u_pd2 + u_pd1*I_l + mgl*cos(x1)."""
    return _cascade(params, gains.kp1, gains.kd1, gains.kp2, gains.kd2, s, ref)


def fuzzy_cascaded_torque(params: PlantParams, base: GainSet, bounds: FlrBounds,
                          s: State, ref: tuple[float, float, float],
                          fuzzy_loop1: bool = True, fuzzy_loop2: bool = True,
                          ) -> tuple[float, Diagnostics]:
    """Cascaded PD with per-step fuzzy gain offsets.

    Loop 1 feeds (e1, e2) to a regulator bounded by (dkp1, dkd1); loop 2
    feeds (e3, e4) to one bounded by (dkp2, dkd2).  Effective gains are
    base + increment; a loop with fuzzy disabled (or zero-width bounds)
    reduces exactly to the plain cascade.
    """
    x1d, x1d_dot, _ = ref
    e1 = x1d - s.x1
    e2 = x1d_dot - s.x2
    kp1, kd1 = base.kp1, base.kd1
    if fuzzy_loop1:
        rb1 = RuleBase(bounds.dkp1, bounds.dkd1)
        dkp1, dkd1 = infer(rb1, e1, e2)
        kp1, kd1 = kp1 + dkp1, kd1 + dkd1
    u_pd1 = pd(kp1, kd1, e1, e2)
    x3d = motor_reference(params, s.x1, u_pd1)
    e3 = x3d - s.x3
    e4 = 0.0 - s.x4
    kp2, kd2 = base.kp2, base.kd2
    if fuzzy_loop2:
        rb2 = RuleBase(bounds.dkp2, bounds.dkd2)
        dkp2, dkd2 = infer(rb2, e3, e4)
        kp2, kd2 = kp2 + dkp2, kd2 + dkd2
    u_pd2 = pd(kp2, kd2, e3, e4)
    u = u_pd2 + u_pd1 * params.I_l + params.mgl * math.cos(s.x1)
    return u, Diagnostics(u_pd1, x3d, e1, e2, e3, e4, kp1, kd1, kp2, kd2)


def single_pd_torque(gains2: tuple[float, float], s: State,
                     ref: tuple[float, float, float]) -> tuple[float, Diagnostics]:
    """Reduced-order baseline: one PD on the link error, no reference
    shaping and no compensation."""
    kp, kd = gains2
    x1d, x1d_dot, _ = ref
    e1 = x1d - s.x1
    e2 = x1d_dot - s.x2
    u = pd(kp, kd, e1, e2)
    nan = float("nan")
    return u, Diagnostics(u, nan, e1, e2, nan, nan, kp, kd, nan, nan)


@dataclass(frozen=True)
class Controller:
    """Value object bundling a controller kind with its parameters."""

    kind: ControllerKind = ControllerKind.FUZZY_CASCADED
    gains: GainSet = field(default_factory=GainSet)
    flr_bounds: FlrBounds = field(default_factory=FlrBounds)
    single_gains: tuple[float, float] = (117.0, 29.99)

    def torque(self, params: PlantParams, s: State,
               ref: tuple[float, float, float]) -> tuple[float, Diagnostics]:
        k = self.kind
        if k is ControllerKind.SINGLE_PD:
            return single_pd_torque(self.single_gains, s, ref)
        if k is ControllerKind.CASCADED_PD:
            return cascaded_torque(params, self.gains, s, ref)
        f1 = k in (ControllerKind.FUZZY_CASCADED, ControllerKind.FUZZY1_PD2)
        f2 = k in (ControllerKind.FUZZY_CASCADED, ControllerKind.PD1_FUZZY2)
        return fuzzy_cascaded_torque(params, self.gains, self.flr_bounds,
                                     s, ref, fuzzy_loop1=f1, fuzzy_loop2=f2)


@dataclass(frozen=True)
class Record:
    """One trajectory row, taken at a control-step boundary."""

    t: float
    state: State
    x1d: float
    u: float
    diag: Diagnostics


@dataclass
class Trajectory:
    """Control-rate record of a simulation run.

    ``records[i]`` is taken at t = i*control_dt just before the i-th torque
    is applied; ``final_state`` is the plant state at the end of the
    horizon.  A zero-length horizon yields a single record of the initial
    conditions with the torque that would have been applied.
    """

    records: list[Record]
    final_state: State

    @property
    def e1(self) -> np.ndarray:
        return np.array([r.diag.e1 for r in self.records])

    @property
    def x1(self) -> np.ndarray:
        return np.array([r.state.x1 for r in self.records])

    @property
    def t(self) -> np.ndarray:
        return np.array([r.t for r in self.records])


def simulate(params: PlantParams, sim: SimConfig, controller: Controller,
             ref: Reference, dist: DisturbanceModel,
             initial_state: State = State(0.0, 0.0, 0.0, 0.0)) -> Trajectory:
    """Run the closed loop with zero-order-hold torque.

    The torque is recomputed every control_dt and held over the
    control_dt/sim_dt Euler sub-steps.  Disturbances are indexed by sim step
    (or by control step under the per-control-step hold).  Raises
    DivergedTrajectory as soon as any state magnitude exceeds 1e6.
    """
    s = initial_state
    records: list[Record] = []
    sub = sim.substeps
    sim_step = 0
    for n in range(sim.n_control_steps):
        t = n * sim.control_dt
        r = ref(t)
        u, diag = controller.torque(params, s, r)
        records.append(Record(t, s, r[0], u, diag))
        for _ in range(sub):
            idx = n if dist.hold == "per-control-step" else sim_step
            d1, d2 = disturbance_sample(dist, idx)
            s = euler_step(params, s, u, d1, d2, sim.sim_dt)
            sim_step += 1
            if max(abs(s.x1), abs(s.x2), abs(s.x3), abs(s.x4)) > DIVERGENCE_LIMIT:
                raise DivergedTrajectory(sim_step, sim_step * sim.sim_dt, s)
    if not records:
        t = 0.0
        r = ref(t)
        u, diag = controller.torque(params, s, r)
        records.append(Record(t, s, r[0], u, diag))
    return Trajectory(records=records, final_state=s)
