"""Scenario execution with the two-rate control loop.

The plant and the inner torque loop run at 250 Hz; the outer loop (pose
sampling, travel-direction estimate, desired-heading logic, reference
update) runs at 120 Hz.  The rates are not integer multiples, so outer
ticks are laid on the inner grid by a fixed repeating gap pattern whose
mean spacing is exactly 25/12 inner ticks.  Everything is seed-free:
identical inputs produce bit-identical telemetry.
"""

import math
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .control import (ControlMode, ControllerConfig, ReferenceState,
                      desaturate_reference, desaturated_torque,
                      limit_cycle_torque, outer_loop_reference, wrap_to_pi)
from .dynamics import INNER_DT, BoatParams, SimState, rk4_step
from .estimation import InsufficientHistory, TravelEstimator

INNER_RATE = 250.0
OUTER_RATE = 120.0
# 12 outer ticks per 25 inner ticks; eleven gaps of 2 and one of 3
_OUTER_GAPS = (2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 3)

TELEMETRY_COLUMNS = ("t", "theta", "theta_dot", "phi", "phi_dot", "theta_t_dot",
                     "x", "y", "vx", "vy", "theta_r", "theta_des", "psi_hat",
                     "tau", "waypoint_index")


class ConfigError(Exception):
    """Raised when a mission specification is invalid."""


class MissionKind(Enum):
    CONVERGE = "converge"
    STEP_TEST = "step"
    WAYPOINTS = "waypoints"
    STATION_KEEP = "station_keep"


@dataclass
class MissionSpec:
    """Declarative description of one scenario run."""

    kind: MissionKind
    duration: float                       # s
    heading: float = 0.0                  # desired travel direction, rad
    waypoints: tuple = ()                 # ordered (x, y) targets, m
    tolerance_radius: float = 0.1         # segment-transition radius, m
    step_schedule: tuple = ()             # (time s, heading change rad) pairs
    disturbances: tuple = ()              # (time s, (dvx, dvy) m/s) impulses
    controller_mode: ControlMode | None = None  # None: take ControllerConfig.mode
    initial_theta: float | None = None    # None: start at the initial reference
    start: tuple[float, float] = (0.0, 0.0)
    warm_start: bool = True               # substitute heading for early estimates


@dataclass
class TelemetryLog:
    """Per-tick record columns, uniformly sampled at the inner rate."""

    t: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    phi: np.ndarray
    phi_dot: np.ndarray
    theta_t_dot: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    theta_r: np.ndarray
    theta_des: np.ndarray
    psi_hat: np.ndarray
    tau: np.ndarray
    waypoint_index: np.ndarray
    period: float = 1.0         # controller oscillation period, s
    body_length: float = 0.15   # m, carried along for BL-normalised metrics

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name not in TELEMETRY_COLUMNS:
            raise KeyError(name)
        return getattr(self, name)


def apply_disturbance(state: SimState, impulse: tuple[float, float]) -> SimState:
    """Instantaneous velocity impulse; all other fields unchanged."""
    return replace(state, vel=(state.vel[0] + impulse[0], state.vel[1] + impulse[1]))


def waypoint_heading(state: SimState, spec: MissionSpec,
                     active_index: int) -> tuple[float, int]:
    """Desired heading toward the active waypoint, advancing it on arrival.

    The index advances at most once per call and the last waypoint is held
    forever, which is what makes a single-waypoint mission station-keep.
    """
    if not 0 <= active_index < len(spec.waypoints):
        raise IndexError(f"active_index {active_index} out of range")
    px, py = state.pos
    wx, wy = spec.waypoints[active_index]
    if (math.hypot(wx - px, wy - py) <= spec.tolerance_radius
            and active_index < len(spec.waypoints) - 1):
        active_index += 1
        wx, wy = spec.waypoints[active_index]
    return math.atan2(wy - py, wx - px), active_index


def validate_spec(spec: MissionSpec) -> None:
    """Raise ConfigError if the mission specification is not runnable."""
    if not isinstance(spec.kind, MissionKind):
        raise ConfigError(f"unknown mission kind: {spec.kind!r}")
    if not (math.isfinite(spec.duration) and spec.duration >= 0.0):
        raise ConfigError("duration must be finite and non-negative")
    if spec.tolerance_radius <= 0.0:
        raise ConfigError("tolerance_radius must be positive")
    if spec.kind in (MissionKind.WAYPOINTS, MissionKind.STATION_KEEP):
        if not spec.waypoints:
            raise ConfigError(f"{spec.kind.value} mission needs at least one waypoint")
        if spec.step_schedule:
            raise ConfigError("step_schedule is only valid for converge/step missions")
    times = [ts for ts, _ in spec.step_schedule]
    if any(t1 < t0 for t0, t1 in zip(times, times[1:])):
        raise ConfigError("step_schedule times must be non-decreasing")
    dtimes = [ts for ts, _ in spec.disturbances]
    if any(t1 < t0 for t0, t1 in zip(dtimes, dtimes[1:])):
        raise ConfigError("disturbance times must be non-decreasing")


def _desired_heading(spec: MissionSpec, state: SimState, t: float,
                     active_index: int) -> tuple[float, int]:
    if spec.kind in (MissionKind.WAYPOINTS, MissionKind.STATION_KEEP):
        return waypoint_heading(state, spec, active_index)
    heading = spec.heading
    for step_time, delta in spec.step_schedule:
        if t >= step_time - 1e-12:
            heading += delta
        else:
            break
    return heading, active_index


def _initial_desired_heading(spec: MissionSpec) -> float:
    if spec.kind in (MissionKind.WAYPOINTS, MissionKind.STATION_KEEP):
        wx, wy = spec.waypoints[0]
        return math.atan2(wy - spec.start[1], wx - spec.start[0])
    return spec.heading


def run_mission(params: BoatParams, cfg: ControllerConfig,
                spec: MissionSpec) -> TelemetryLog:
    """Run one scenario deterministically and return its full telemetry."""
    validate_spec(spec)
    mode = spec.controller_mode if spec.controller_mode is not None else cfg.mode
    dt = INNER_DT
    n_steps = round(spec.duration * INNER_RATE)
    period = cfg.period
    thrust = params.k_thrust * cfg.K

    theta_des = _initial_desired_heading(spec)
    theta0 = spec.initial_theta if spec.initial_theta is not None else theta_des
    state = SimState(t=0.0, theta=theta0, pos=spec.start)
    ref = ReferenceState(theta_r=theta_des, theta_des=theta_des)
    est = TravelEstimator(period, theta_des_fallback=theta_des,
                          warm_start_enabled=spec.warm_start)

    # trailing one-period boxcar of the reaction-mass rate and hull heading
    window: deque[tuple[float, float, float]] = deque()
    window.append((0.0, state.top_rate, state.theta))
    rate_sum = state.top_rate
    theta_sum = state.theta

    psi_hat = theta_des
    active_idx = 0
    next_dist = 0
    next_outer = 0
    gap_i = 0

    rows = []
    for i in range(n_steps + 1):
        t = state.t
        while (next_dist < len(spec.disturbances)
               and spec.disturbances[next_dist][0] <= t + 1e-12):
            state = apply_disturbance(state, spec.disturbances[next_dist][1])
            next_dist += 1

        if i == next_outer:
            next_outer += _OUTER_GAPS[gap_i % len(_OUTER_GAPS)]
            gap_i += 1
            est.add_pose(t, state.pos[0], state.pos[1])
            try:
                psi_hat = est.travel_direction(t)
            except InsufficientHistory:
                psi_hat = wrap_to_pi(theta_des)  # no estimate yet: assume on course
            theta_des, active_idx = _desired_heading(spec, state, t, active_idx)
            if mode is ControlMode.LIMIT_CYCLE_ONLY:
                # reference driven directly; unwrapped commands pass through
                ref = replace(ref, theta_r=theta_des, theta_des=theta_des)
            else:
                target = outer_loop_reference(cfg, theta_des, psi_hat)
                pending = wrap_to_pi(target - ref.theta_r)
                ref = replace(ref, theta_r=ref.theta_r + pending, theta_des=theta_des)
                if mode is ControlMode.DESATURATED_THRUST_DIRECTION:
                    mean_rate = rate_sum / len(window)
                    ref = desaturate_reference(ref, mean_rate, t, cfg, pending)

        if mode is ControlMode.THRUST_DIRECTION:
            tau = limit_cycle_torque(cfg, t, state.theta, ref.theta_r)
        else:
            tau = desaturated_torque(cfg, t, state.theta, ref.theta_r)

        rows.append((t, state.theta, state.theta_dot, state.phi, state.phi_dot,
                     state.top_rate, state.pos[0], state.pos[1],
                     state.vel[0], state.vel[1], ref.theta_r, theta_des,
                     psi_hat, tau, active_idx))

        if i == n_steps:
            break
        if cfg.thrust_from_mean_heading:
            heading_cmd = theta_sum / len(window)
        else:
            heading_cmd = ref.theta_r
        state = rk4_step(params, state, tau, heading_cmd, dt, thrust)
        window.append((state.t, state.top_rate, state.theta))
        rate_sum += state.top_rate
        theta_sum += state.theta
        floor = state.t - period
        while window[0][0] <= floor:
            _, old_rate, old_theta = window.popleft()
            rate_sum -= old_rate
            theta_sum -= old_theta

    cols = list(zip(*rows))
    return TelemetryLog(
        t=np.array(cols[0]), theta=np.array(cols[1]), theta_dot=np.array(cols[2]),
        phi=np.array(cols[3]), phi_dot=np.array(cols[4]), theta_t_dot=np.array(cols[5]),
        x=np.array(cols[6]), y=np.array(cols[7]), vx=np.array(cols[8]),
        vy=np.array(cols[9]), theta_r=np.array(cols[10]), theta_des=np.array(cols[11]),
        psi_hat=np.array(cols[12]), tau=np.array(cols[13]),
        waypoint_index=np.array(cols[14], dtype=np.int64),
        period=period, body_length=params.body_length)


def run_step_test(params: BoatParams, cfg: ControllerConfig, delta: float,
                  initial_leg: float = 15.0,
                  second_leg: float = 15.0) -> tuple[float, float]:
    """Step-input test: swim straight, step the desired heading, swim again.

    Returns the commanded change and the settled change in the measured
    travel direction, the latter taken as the difference of the mean
    estimate over the final quarter of each leg.
    """
    if not 0.0 <= delta < math.tau:
        raise ValueError("delta must lie in [0, 2*pi)")
    spec = MissionSpec(kind=MissionKind.STEP_TEST,
                       duration=initial_leg + second_leg,
                       heading=0.0,
                       step_schedule=((initial_leg, delta),))
    log = run_mission(params, cfg, spec)
    psi = np.unwrap(log.psi_hat)
    leg1 = (log.t >= 0.75 * initial_leg) & (log.t < initial_leg)
    leg2 = log.t >= initial_leg + 0.75 * second_leg
    observed = float(np.mean(psi[leg2]) - np.mean(psi[leg1]))
    return delta, observed
