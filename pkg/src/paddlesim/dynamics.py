"""Planar rigid-body plant for a single-motor oscillating surface swimmer.

The hull (bottom body) carries the passive flippers and exchanges angular
momentum with the reaction mass (top body) through the motor, so commanding
a motor acceleration produces an opposite hull acceleration.  Orientation
follows a damped rotational ODE; planar translation is approximated as a
point mass pushed along the commanded heading against quadratic drag.
"""

import math
from dataclasses import dataclass

INNER_DT = 1.0 / 250.0  # fixed integration step, matches the motor command rate


@dataclass
class BoatParams:
    """Physical constants of the plant.

    The rotational constants default to the test platform's identified
    values; the translational ones are model choices (steady speed is
    sqrt(k_thrust * K / C_v), 0.1 m/s at the default gains).
    """

    I_b: float = 5.2e-6          # hull moment of inertia, kg m^2
    I_t: float = 1.0e-3          # reaction-mass moment of inertia, kg m^2
    C_f: float = 1.0e-4          # flipper drag constant (quadratic), N m s^2
    C_r: float = 0.0             # cylindrical drag constant (linear), N m s
    mass: float = 1.0            # kg
    C_v: float = 5.0             # translational quadratic drag, kg/m
    k_thrust: float = 0.05 / 15.0  # thrust per unit forcing amplitude, N
    body_length: float = 0.15    # m, normalisation for BL metrics
    body_radius: float = 0.075   # m

    def __post_init__(self):
        if self.I_b <= 0.0 or self.I_t <= 0.0:
            raise ValueError("moments of inertia must be positive")
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.C_f < 0.0 or self.C_r < 0.0 or self.C_v < 0.0:
            raise ValueError("drag coefficients must be non-negative")
        if self.k_thrust < 0.0:
            raise ValueError("k_thrust must be non-negative")
        if self.body_length <= 0.0 or self.body_radius <= 0.0:
            raise ValueError("body dimensions must be positive")


@dataclass
class SimState:
    """Full continuous state at one time instant.  Treated as a value."""

    t: float = 0.0
    theta: float = 0.0       # hull orientation, rad, unwrapped
    theta_dot: float = 0.0   # rad/s
    phi: float = 0.0         # motor angle, rad
    phi_dot: float = 0.0     # rad/s
    pos: tuple[float, float] = (0.0, 0.0)   # m
    vel: tuple[float, float] = (0.0, 0.0)   # m/s

    @property
    def top_rate(self) -> float:
        """Angular velocity of the reaction mass (hull rate + motor rate)."""
        return self.theta_dot + self.phi_dot


def orientation_accel(params: BoatParams, theta_dot: float, phi_ddot: float) -> float:
    """Hull angular acceleration for a given hull rate and motor acceleration.

    theta_dot * abs(theta_dot) realises the signed quadratic drag with
    sign(0) = 0.
    """
    drag = params.C_f * theta_dot * abs(theta_dot) + params.C_r * theta_dot
    return -(drag + params.I_t * phi_ddot) / (params.I_b + params.I_t)


def _planar_accel(params: BoatParams, vx: float, vy: float,
                  tx: float, ty: float) -> tuple[float, float]:
    """Point-mass acceleration under a fixed thrust vector and quadratic drag."""
    speed = math.hypot(vx, vy)
    cd = params.C_v * speed
    return (tx - cd * vx) / params.mass, (ty - cd * vy) / params.mass


def translational_accel(params: BoatParams, state: SimState,
                        thrust_heading: float, thrust_mag: float) -> tuple[float, float]:
    """Planar acceleration with thrust of the given magnitude along a heading."""
    if thrust_mag < 0.0:
        raise ValueError("thrust_mag must be non-negative")
    tx = thrust_mag * math.cos(thrust_heading)
    ty = thrust_mag * math.sin(thrust_heading)
    return _planar_accel(params, state.vel[0], state.vel[1], tx, ty)


def rk4_step(params: BoatParams, state: SimState, control_torque: float,
             thrust_heading: float, dt: float, thrust_mag: float = 0.0) -> SimState:
    """Advance the state by one classical fourth-order step.

    The commanded motor acceleration and the thrust vector are held constant
    across the step (zero-order hold); time advances by exactly dt.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    a = control_torque  # motor acceleration, constant over the step
    tx = thrust_mag * math.cos(thrust_heading)
    ty = thrust_mag * math.sin(thrust_heading)

    w = state.theta_dot
    vx, vy = state.vel
    half = 0.5 * dt

    # rotational stages: theta's stage derivative is the stage value of theta_dot
    k1 = orientation_accel(params, w, a)
    s2 = w + half * k1
    k2 = orientation_accel(params, s2, a)
    s3 = w + half * k2
    k3 = orientation_accel(params, s3, a)
    s4 = w + dt * k3
    k4 = orientation_accel(params, s4, a)
    theta = state.theta + dt / 6.0 * (w + 2.0 * s2 + 2.0 * s3 + s4)
    theta_dot = w + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    # translational stages
    ax1, ay1 = _planar_accel(params, vx, vy, tx, ty)
    ux2, uy2 = vx + half * ax1, vy + half * ay1
    ax2, ay2 = _planar_accel(params, ux2, uy2, tx, ty)
    ux3, uy3 = vx + half * ax2, vy + half * ay2
    ax3, ay3 = _planar_accel(params, ux3, uy3, tx, ty)
    ux4, uy4 = vx + dt * ax3, vy + dt * ay3
    ax4, ay4 = _planar_accel(params, ux4, uy4, tx, ty)
    x = state.pos[0] + dt / 6.0 * (vx + 2.0 * ux2 + 2.0 * ux3 + ux4)
    y = state.pos[1] + dt / 6.0 * (vy + 2.0 * uy2 + 2.0 * uy3 + uy4)
    new_vx = vx + dt / 6.0 * (ax1 + 2.0 * ax2 + 2.0 * ax3 + ax4)
    new_vy = vy + dt / 6.0 * (ay1 + 2.0 * ay2 + 2.0 * ay3 + ay4)

    # constant motor acceleration integrates exactly
    phi = state.phi + state.phi_dot * dt + 0.5 * a * dt * dt
    phi_dot = state.phi_dot + a * dt

    return SimState(t=state.t + dt, theta=theta, theta_dot=theta_dot,
                    phi=phi, phi_dot=phi_dot, pos=(x, y), vel=(new_vx, new_vy))


def rk4_step_controlled(params: BoatParams, state: SimState, torque_fn,
                        thrust_heading: float, dt: float,
                        thrust_mag: float = 0.0) -> SimState:
    """One fourth-order step with the torque law evaluated at the stage points.

    torque_fn(t, theta, theta_dot) is sampled inside the step, so a smooth
    feedback law integrates at the full order of the method.  Use rk4_step
    for the sampled-command (zero-order hold) plant that missions run.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    tx = thrust_mag * math.cos(thrust_heading)
    ty = thrust_mag * math.sin(thrust_heading)

    t0 = state.t
    th, w = state.theta, state.theta_dot
    ph, pd = state.phi, state.phi_dot
    vx, vy = state.vel
    half = 0.5 * dt

    tau1 = torque_fn(t0, th, w)
    k1w = orientation_accel(params, w, tau1)

    th2, w2 = th + half * w, w + half * k1w
    tau2 = torque_fn(t0 + half, th2, w2)
    k2w = orientation_accel(params, w2, tau2)

    th3, w3 = th + half * w2, w + half * k2w
    tau3 = torque_fn(t0 + half, th3, w3)
    k3w = orientation_accel(params, w3, tau3)

    th4, w4 = th + dt * w3, w + dt * k3w
    tau4 = torque_fn(t0 + dt, th4, w4)
    k4w = orientation_accel(params, w4, tau4)

    theta = th + dt / 6.0 * (w + 2.0 * w2 + 2.0 * w3 + w4)
    theta_dot = w + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
    phi = ph + dt / 6.0 * (pd + 2.0 * (pd + half * tau1) + 2.0 * (pd + half * tau2)
                           + (pd + dt * tau3))
    phi_dot = pd + dt / 6.0 * (tau1 + 2.0 * tau2 + 2.0 * tau3 + tau4)

    ax1, ay1 = _planar_accel(params, vx, vy, tx, ty)
    ux2, uy2 = vx + half * ax1, vy + half * ay1
    ax2, ay2 = _planar_accel(params, ux2, uy2, tx, ty)
    ux3, uy3 = vx + half * ax2, vy + half * ay2
    ax3, ay3 = _planar_accel(params, ux3, uy3, tx, ty)
    ux4, uy4 = vx + dt * ax3, vy + dt * ay3
    ax4, ay4 = _planar_accel(params, ux4, uy4, tx, ty)
    x = state.pos[0] + dt / 6.0 * (vx + 2.0 * ux2 + 2.0 * ux3 + ux4)
    y = state.pos[1] + dt / 6.0 * (vy + 2.0 * uy2 + 2.0 * uy3 + uy4)
    new_vx = vx + dt / 6.0 * (ax1 + 2.0 * ax2 + 2.0 * ax3 + ax4)
    new_vy = vy + dt / 6.0 * (ay1 + 2.0 * ay2 + 2.0 * ay3 + ay4)

    return SimState(t=t0 + dt, theta=theta, theta_dot=theta_dot,
                    phi=phi, phi_dot=phi_dot, pos=(x, y), vel=(new_vx, new_vy))
