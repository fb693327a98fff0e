"""Small builders shared by the test modules."""

import numpy as np

from paddlesim.mission import TelemetryLog


def make_log(t, *, x=None, y=None, psi_hat=None, theta=None, theta_t_dot=None,
             theta_r=None, period=1.0, body_length=0.15):
    """Synthetic telemetry with zeros for everything not supplied."""
    t = np.asarray(t, dtype=float)
    n = len(t)

    def col(v):
        return np.zeros(n) if v is None else np.asarray(v, dtype=float)

    return TelemetryLog(
        t=t, theta=col(theta), theta_dot=np.zeros(n), phi=np.zeros(n),
        phi_dot=np.zeros(n), theta_t_dot=col(theta_t_dot), x=col(x), y=col(y),
        vx=np.zeros(n), vy=np.zeros(n), theta_r=col(theta_r),
        theta_des=np.zeros(n), psi_hat=col(psi_hat), tau=np.zeros(n),
        waypoint_index=np.zeros(n, dtype=np.int64),
        period=period, body_length=body_length)
