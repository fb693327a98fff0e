"""Maneuvering metrics computed from telemetry.

Covers the turn metrics (rise time at a configurable threshold with a
one-period hold, path length during the turn, body-length normalisation),
straight-segment cross-track error against the infinite ideal line, and
mean orbit radius for station-keeping runs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .mission import TelemetryLog


class NotSettled(Exception):
    """The response never reached and held the rise threshold in the log."""


class DegenerateSegment(Exception):
    """The two segment endpoints coincide."""


@dataclass
class TurnEvent:
    """Summary of one commanded heading change."""

    command_time: float     # s
    delta: float            # rad
    rise_time: float        # s, from the command
    travel_distance: float  # m, path length while turning
    travel_BL: float        # travel_distance / body length


@dataclass
class SegmentError:
    """Cross-track statistics against the line through two endpoints."""

    p0: tuple[float, float]
    p1: tuple[float, float]
    rms_perp: float   # m
    max_perp: float   # m


def rolling_mean(t: np.ndarray, values: np.ndarray, window: float) -> np.ndarray:
    """Trailing boxcar mean over (t - window, t] at every sample.

    Early samples average over whatever part of the window exists.
    """
    csum = np.concatenate(([0.0], np.cumsum(values)))
    idx = np.arange(len(values))
    start = np.searchsorted(t, t - window, side="right")
    return (csum[idx + 1] - csum[start]) / (idx + 1 - start)


def rise_time(log: TelemetryLog, command_time: float, delta: float,
              fraction: float = 0.9, hold_period: float | None = None) -> float:
    """Time after the command for the travel-direction change to reach
    fraction * delta and stay within the remaining band for one period.

    Raises NotSettled if that never happens inside the log.
    """
    if delta == 0.0:
        raise ValueError("delta must be nonzero")
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    hold = hold_period if hold_period is not None else log.period
    t = log.t
    base_i = int(np.searchsorted(t, command_time, side="right")) - 1
    if base_i < 0:
        raise ValueError("command_time precedes the log")
    psi = np.unwrap(log.psi_hat)
    frac = (psi - psi[base_i]) / delta
    in_band = np.abs(frac - 1.0) <= (1.0 - fraction) + 1e-12

    j = base_i + 1
    n = len(t)
    while j < n:
        ahead = np.nonzero(frac[j:] >= fraction)[0]
        if len(ahead) == 0:
            break
        j += int(ahead[0])
        if t[j] + hold > t[-1] + 1e-9:
            break  # cannot verify the hold inside the log
        k = int(np.searchsorted(t, t[j] + hold, side="right"))
        bad = np.nonzero(~in_band[j:k])[0]
        if len(bad) == 0:
            return float(t[j] - command_time)
        j += int(bad[0]) + 1
    raise NotSettled(
        f"travel direction never held {fraction:.0%} of {delta:.4g} rad")


def travel_during_turn(log: TelemetryLog, command_time: float,
                       settle_time: float) -> float:
    """Path length of the position trace between the two times."""
    if settle_time < command_time:
        raise ValueError("settle_time must not precede command_time")
    mask = (log.t >= command_time - 1e-12) & (log.t <= settle_time + 1e-12)
    xs = log.x[mask]
    ys = log.y[mask]
    if len(xs) < 2:
        return 0.0
    return float(np.sum(np.hypot(np.diff(xs), np.diff(ys))))


def measure_turn(log: TelemetryLog, command_time: float, delta: float,
                 fraction: float = 0.9) -> TurnEvent:
    """Rise time plus travel for one commanded change, as a TurnEvent."""
    rise = rise_time(log, command_time, delta, fraction)
    travel = travel_during_turn(log, command_time, command_time + rise)
    return TurnEvent(command_time=command_time, delta=delta, rise_time=rise,
                     travel_distance=travel, travel_BL=travel / log.body_length)


def rms_perpendicular_error(log: TelemetryLog,
                            segment: tuple[tuple[float, float], tuple[float, float]],
                            time_window: tuple[float, float] | None = None) -> SegmentError:
    """RMS and max perpendicular distance to the infinite line through the
    segment endpoints, over the samples inside the time window."""
    (x0, y0), (x1, y1) = segment
    dx, dy = x1 - x0, y1 - y0
    length = math.hypot(dx, dy)
    if length < 1e-9:
        raise DegenerateSegment("segment endpoints coincide")
    if time_window is None:
        mask = np.ones(len(log.t), dtype=bool)
    else:
        mask = (log.t >= time_window[0] - 1e-12) & (log.t <= time_window[1] + 1e-12)
    if not np.any(mask):
        raise ValueError("time window contains no samples")
    perp = np.abs(dx * (log.y[mask] - y0) - dy * (log.x[mask] - x0)) / length
    return SegmentError(p0=(x0, y0), p1=(x1, y1),
                        rms_perp=float(np.sqrt(np.mean(perp * perp))),
                        max_perp=float(np.max(perp)))


def orbit_radius(log: TelemetryLog, center: tuple[float, float],
                 window: float) -> float:
    """Mean distance to the center over the trailing window of the log."""
    t_end = log.t[-1]
    if window <= 0.0 or window > t_end - log.t[0] + 1e-9:
        raise ValueError("window must be positive and lie within the log")
    mask = log.t >= t_end - window - 1e-12
    return float(np.mean(np.hypot(log.x[mask] - center[0], log.y[mask] - center[1])))


def quartiles(values) -> tuple[float, float, float]:
    """(q1, median, q3) with linear interpolation between order statistics."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("no values")
    q1, med, q3 = np.percentile(arr, [25.0, 50.0, 75.0], method="linear")
    return float(q1), float(med), float(q3)
