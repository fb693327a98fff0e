"""Torque and reference-heading laws for the oscillatory paddling controller.

The inner loop oscillates the hull about a reference heading; paddling
thrust then points, on average, along that reference.  The outer loop
steers the reference so the measured direction of travel tracks the desired
one, and the unwind logic keeps the reaction mass from spinning up by
commanding full-turn-offset (congruent) references.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

_WRAP_EPS = 1e-9  # slack for the wrapped-equality test at the +/- pi boundary


class ControlMode(Enum):
    """Which control layers a mission runs."""

    LIMIT_CYCLE_ONLY = "limit_cycle"
    THRUST_DIRECTION = "thrust_direction"
    DESATURATED_THRUST_DIRECTION = "desaturated"


@dataclass
class ControllerConfig:
    """Gains and switches for the controller variants."""

    omega: float = math.tau       # forcing angular frequency, rad/s
    K: float = 15.0               # forcing amplitude
    beta: float = 40.0            # convergence gain
    K_p: float = 1.5              # outer-loop proportional gain
    mode: ControlMode = ControlMode.THRUST_DIRECTION
    desat_interval: float | None = None   # min time between reference
                                          # unwinds, s; None: two periods
    desat_threshold: float = 3.0  # |mean top rate| that arms an unwind, rad/s
    thrust_from_mean_heading: bool = False  # thrust along mean hull heading
                                            # instead of the reference

    def __post_init__(self):
        if self.omega <= 0.0:
            raise ValueError("omega must be positive")
        if self.K <= 0.0 or self.beta <= 0.0:
            raise ValueError("K and beta must be positive")
        if self.K_p < 0.0:
            raise ValueError("K_p must be non-negative")
        if self.desat_interval is None:
            self.desat_interval = 2.0 * self.period
        if self.desat_interval < self.period:
            raise ValueError("desat_interval must be at least one period")

    @property
    def period(self) -> float:
        """Oscillation period, s."""
        return math.tau / self.omega


@dataclass
class ReferenceState:
    """Unwrapped reference heading plus the unwind rate-limit bookkeeping."""

    theta_r: float = 0.0
    theta_des: float = 0.0
    last_desat_time: float = -math.inf


def wrap_to_pi(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = angle - math.tau * math.floor((angle + math.pi) / math.tau)
    if wrapped <= -math.pi:  # floor maps +pi to -pi; the boundary belongs at +pi
        wrapped += math.tau
    return wrapped


def limit_cycle_torque(cfg: ControllerConfig, t: float, theta: float,
                       theta_r: float) -> float:
    """Motor acceleration command: sinusoidal forcing plus convergence term."""
    return -cfg.K * math.sin(cfg.omega * t) - cfg.beta * math.sin(theta_r - theta)


def resonant_beta(cfg_omega: float, I_b: float, I_t: float) -> float:
    """Convergence gain that puts the forced oscillation at resonance."""
    if I_b <= 0.0 or I_t <= 0.0:
        raise ValueError("moments of inertia must be positive")
    return cfg_omega * cfg_omega * (I_t + I_b) / I_t


def wrap_override(theta: float, theta_r: float) -> int:
    """Unwind drive: +/-1 while the raw heading error lies outside (-pi, pi].

    Returns 0 once theta is within a half turn of the unwrapped reference,
    at which point the plain convergence term takes over.
    """
    diff = theta_r - theta
    if abs(wrap_to_pi(diff) - diff) < _WRAP_EPS:
        return 0
    return 1 if diff > 0.0 else -1


def desaturated_torque(cfg: ControllerConfig, t: float, theta: float,
                       theta_r: float) -> float:
    """Wrap-aware torque command; equals limit_cycle_torque inside +/- pi."""
    xi = wrap_override(theta, theta_r)
    return -cfg.K * math.sin(cfg.omega * t) - cfg.beta * (math.sin(theta_r - theta) + xi)


def desaturate_reference(ref: ReferenceState, mean_top_velocity: float, t: float,
                         cfg: ControllerConfig, pending_delta: float = 0.0) -> ReferenceState:
    """Offset the reference by a full turn when the reaction mass runs fast.

    A positive reference change spins the reaction mass down and vice versa,
    so the offset takes the sign of the accumulated rate.  The jump is
    skipped while the rate is small, inside the rate-limit interval, or when
    the pending reference change this tick already pushes the rate the right
    way (pending_delta and the mean rate sharing a sign).
    """
    if abs(mean_top_velocity) <= cfg.desat_threshold:
        return ref
    if t - ref.last_desat_time < cfg.desat_interval:
        return ref
    if pending_delta * mean_top_velocity > 0.0:
        return ref
    jump = math.tau if mean_top_velocity > 0.0 else -math.tau
    return replace(ref, theta_r=ref.theta_r + jump, last_desat_time=t)


def outer_loop_reference(cfg: ControllerConfig, theta_des: float, psi_hat: float) -> float:
    """Reference heading that steers the travel direction toward theta_des.

    Works on unit vectors, so the output stays well behaved for any error
    magnitude; the antipodal degenerate case falls back to theta_des.
    """
    dx, dy = math.cos(theta_des), math.sin(theta_des)
    px, py = math.cos(psi_hat), math.sin(psi_hat)
    wx = dx + cfg.K_p * (dx - px)
    wy = dy + cfg.K_p * (dy - py)
    if math.hypot(wx, wy) < 1e-9:  # unreachable for K_p >= 0, kept as a guard
        return theta_des
    return math.atan2(wy, wx)
