"""Travel-direction estimation from pose history.

The hull oscillates as it paddles, so differentiating the trajectory
directly gives a wildly swinging heading.  Instead the displacement over
one oscillation period (the period-wise velocity) is smoothed again by
averaging its orientation over a trailing period.  Until enough history
exists the estimate can warm-start from the commanded travel direction,
which is a fair assumption in still water.
"""

import math
from bisect import bisect_right

from .control import wrap_to_pi

_SPEED_FLOOR = 1e-6   # m/s below which the heading sample holds its last value
_TIME_SLACK = 1e-12   # tolerance when testing window coverage, s
_COMPACT_AT = 4096    # dropped-prefix length that triggers list compaction


class InsufficientHistory(Exception):
    """Raised when a query reaches back before the buffered history."""


class TravelEstimator:
    """Ring buffers of pose and period-wise heading with interpolating queries.

    Poses arrive through add_pose with strictly increasing timestamps; each
    arrival that is at least one period past the first pose also appends a
    period-wise heading sample.  Buffers are pruned to a little over the
    span queries can reach (two periods for poses, one for headings).
    """

    def __init__(self, period: float, theta_des_fallback: float = 0.0,
                 warm_start_enabled: bool = True):
        if period <= 0.0:
            raise ValueError("period must be positive")
        self.period = period
        self.theta_des_fallback = theta_des_fallback
        self.warm_start_enabled = warm_start_enabled
        self._first_pose_t: float | None = None
        # pose samples
        self._pt: list[float] = []
        self._px: list[float] = []
        self._py: list[float] = []
        self._p0 = 0  # live start index
        # heading samples: time, unwrapped value, running trapezoid integral
        self._ht: list[float] = []
        self._hu: list[float] = []
        self._hc: list[float] = []
        self._h0 = 0

    # ------------------------------------------------------------------ input

    def add_pose(self, t: float, x: float, y: float) -> None:
        """Append a pose sample and derive a heading sample once possible."""
        if self._pt and t <= self._pt[-1]:
            raise ValueError("pose timestamps must be strictly increasing")
        if self._first_pose_t is None:
            self._first_pose_t = t
        self._pt.append(t)
        self._px.append(x)
        self._py.append(y)

        if t - self._first_pose_t >= self.period - _TIME_SLACK:
            vx, vy = self._velocity_at(t)
            if math.hypot(vx, vy) < _SPEED_FLOOR:
                # near-zero net displacement: hold the previous heading
                if self._hu:
                    unwrapped = self._hu[-1]
                else:
                    unwrapped = wrap_to_pi(self.theta_des_fallback)
            else:
                raw = math.atan2(vy, vx)
                if self._hu:
                    unwrapped = self._hu[-1] + wrap_to_pi(raw - self._hu[-1])
                else:
                    unwrapped = raw
            if self._ht:
                cum = self._hc[-1] + 0.5 * (unwrapped + self._hu[-1]) * (t - self._ht[-1])
            else:
                cum = 0.0
            self._ht.append(t)
            self._hu.append(unwrapped)
            self._hc.append(cum)

        self._prune(t)

    def _prune(self, now: float) -> None:
        pose_floor = now - 2.5 * self.period
        while self._p0 < len(self._pt) - 1 and self._pt[self._p0 + 1] <= pose_floor:
            self._p0 += 1
        head_floor = now - 1.5 * self.period
        while self._h0 < len(self._ht) - 1 and self._ht[self._h0 + 1] <= head_floor:
            self._h0 += 1
        if self._p0 > _COMPACT_AT:
            del self._pt[:self._p0], self._px[:self._p0], self._py[:self._p0]
            self._p0 = 0
        if self._h0 > _COMPACT_AT:
            del self._ht[:self._h0], self._hu[:self._h0], self._hc[:self._h0]
            self._h0 = 0

    # ---------------------------------------------------------------- queries

    def _interp_pose(self, q: float) -> tuple[float, float]:
        """Linear interpolation of the position, held flat at the buffer ends."""
        pt, lo = self._pt, self._p0
        if q >= pt[-1]:
            return self._px[-1], self._py[-1]
        if q <= pt[lo]:
            return self._px[lo], self._py[lo]
        i = bisect_right(pt, q, lo=lo) - 1
        f = (q - pt[i]) / (pt[i + 1] - pt[i])
        return (self._px[i] + f * (self._px[i + 1] - self._px[i]),
                self._py[i] + f * (self._py[i + 1] - self._py[i]))

    def _velocity_at(self, t: float) -> tuple[float, float]:
        x1, y1 = self._interp_pose(t)
        x0, y0 = self._interp_pose(t - self.period)
        return (x1 - x0) / self.period, (y1 - y0) / self.period

    def periodwise_velocity(self, t: float) -> tuple[float, float]:
        """Displacement over the trailing period divided by the period."""
        if not self._pt:
            if self.warm_start_enabled:
                return 0.0, 0.0
            raise InsufficientHistory("no pose samples buffered")
        if t - self.period < self._pt[self._p0] - _TIME_SLACK:
            if not self.warm_start_enabled:
                raise InsufficientHistory(
                    f"pose history does not reach back to t - T = {t - self.period:.6g}")
            # startup: displacement over the span available, still over a full T
        return self._velocity_at(t)

    def _heading_cumint(self, x: float) -> float:
        """Cumulative integral of the piecewise-linear unwrapped heading."""
        ht, lo = self._ht, self._h0
        if x <= ht[lo]:
            return self._hc[lo]
        if x >= ht[-1]:
            return self._hc[-1] + self._hu[-1] * (x - ht[-1])
        i = bisect_right(ht, x, lo=lo) - 1
        f = (x - ht[i]) / (ht[i + 1] - ht[i])
        v = self._hu[i] + f * (self._hu[i + 1] - self._hu[i])
        return self._hc[i] + 0.5 * (self._hu[i] + v) * (x - ht[i])

    def _mean_heading(self, t: float, pad_allowed: bool) -> float:
        a, b = t - self.period, t
        if not self._ht:
            if pad_allowed:
                return wrap_to_pi(self.theta_des_fallback)
            raise InsufficientHistory("no heading samples buffered yet")
        first = self._ht[self._h0]
        if a < first - _TIME_SLACK:
            if not pad_allowed:
                raise InsufficientHistory(
                    f"heading history does not reach back to t - T = {a:.6g}")
            # pad the missing prefix with the fallback, on the branch nearest
            # the first real sample so the unwrapped average stays coherent
            anchor = self._hu[self._h0]
            pad_val = anchor + wrap_to_pi(self.theta_des_fallback - anchor)
            pad_end = min(b, first)
            total = pad_val * (pad_end - a)
            if b > first:
                total += self._heading_cumint(b) - self._heading_cumint(first)
        else:
            total = self._heading_cumint(b) - self._heading_cumint(a)
        return wrap_to_pi(total / self.period)

    def travel_direction(self, t: float) -> float:
        """Smoothed direction of travel: trailing-period mean of the heading."""
        return self._mean_heading(t, pad_allowed=self.warm_start_enabled)

    def warm_start_direction(self, t: float) -> float:
        """Travel direction with the commanded-direction substitution active."""
        if not self.warm_start_enabled:
            raise ValueError("warm start is disabled on this estimator")
        return self._mean_heading(t, pad_allowed=True)
