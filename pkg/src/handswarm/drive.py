"""Go-to-goal wheel controller for a differential-drive robot.

Waypoint following on a straight path: forward speed proportional to the
remaining distance, steering differential proportional to the heading error
and its filtered rate.  Each wheel command is clamped to the motor envelope
(floor per wheel, shared ceiling set by the slower motor) and converted to a
PWM duty fraction through a calibration curve.  The robot stops dead once it
is within the convergence radius of the goal; a new goal may arrive at any
time and following simply continues.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, replace

from .geom import wrap_angle

# 1-pole low-pass coefficient for the heading-error rate estimate.
THETA_DOT_ALPHA = 0.5


class CalibrationError(ValueError):
    """Raised for malformed calibration tables or out-of-range speeds."""


@dataclass(frozen=True)
class ControlGains:
    """Controller constants and motor envelope.

    k_l is 1/s, k_theta is mm/s per rad, k_theta_dot is mm/s per rad/s,
    sigma is the convergence radius in mm.  Wheel speeds are floored per
    wheel and capped by the slower motor's maximum.
    """

    k_l: float = 2.0
    k_theta: float = 120.0
    k_theta_dot: float = 10.0
    sigma: float = 5.0
    v_l_min: float = 0.0
    v_r_min: float = 0.0
    v_l_max: float = 400.0
    v_r_max: float = 400.0

    def __post_init__(self) -> None:
        if min(self.k_l, self.k_theta, self.k_theta_dot, self.v_l_min,
               self.v_r_min, self.v_l_max, self.v_r_max) < 0.0:
            raise ValueError("gains and wheel limits must be nonnegative")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        if self.v_max < max(self.v_l_min, self.v_r_min):
            raise ValueError("wheel floor exceeds the shared ceiling")

    @property
    def v_max(self) -> float:
        # the slower motor is the binding speed limit for both wheels
        return min(self.v_l_max, self.v_r_max)


@dataclass(frozen=True)
class DriveState:
    """One robot's view of its goal: pose plus derived error terms.

    theta is the angle from the heading to the goal bearing, wrapped to
    (-pi, pi], counterclockwise positive.  converged means the robot is
    within sigma of the goal and holds still until retargeted.
    """

    position: tuple[float, float]
    goal: tuple[float, float]
    heading: float
    sigma: float
    l: float
    theta: float
    theta_dot: float
    converged: bool


@dataclass(frozen=True)
class WheelCommand:
    v_l: float
    v_r: float
    duty_l: float
    duty_r: float


def _goal_errors(position: tuple[float, float], heading: float,
                 goal: tuple[float, float]) -> tuple[float, float]:
    dx = goal[0] - position[0]
    dy = goal[1] - position[1]
    l = math.hypot(dx, dy)
    if l == 0.0:
        return 0.0, 0.0  # on top of the goal: bearing undefined, call it aligned
    return l, wrap_angle(math.atan2(dy, dx) - heading)


def make_drive_state(position: tuple[float, float], heading: float,
                     goal: tuple[float, float], sigma: float) -> DriveState:
    """Fresh controller state with no rate history."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    l, theta = _goal_errors(position, heading, goal)
    return DriveState(position=(float(position[0]), float(position[1])),
                      goal=(float(goal[0]), float(goal[1])),
                      heading=wrap_angle(float(heading)),
                      sigma=float(sigma), l=l, theta=theta,
                      theta_dot=0.0, converged=l < sigma)


def update_goal(state: DriveState, new_goal: tuple[float, float], dt: float,
                position: tuple[float, float] | None = None,
                heading: float | None = None) -> DriveState:
    """Retarget (or refresh) the controller after dt seconds.

    Pass position/heading when the robot has moved since the last update,
    which is the normal case on a live control loop.  The heading-error rate
    is a wrapped finite difference smoothed with a 1-pole low-pass so one
    noisy pose fix cannot slam the steering term.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    pos = state.position if position is None else (float(position[0]), float(position[1]))
    head = state.heading if heading is None else wrap_angle(float(heading))
    goal = (float(new_goal[0]), float(new_goal[1]))
    l, theta = _goal_errors(pos, head, goal)
    raw_rate = wrap_angle(theta - state.theta) / dt
    theta_dot = (1.0 - THETA_DOT_ALPHA) * state.theta_dot + THETA_DOT_ALPHA * raw_rate
    return replace(state, position=pos, goal=goal, heading=head,
                   l=l, theta=theta, theta_dot=theta_dot, converged=l < state.sigma)


def raw_wheel_speeds(l: float, theta: float, theta_dot: float,
                     gains: ControlGains) -> tuple[float, float]:
    """Unclamped control law: common speed from distance, differential from
    heading error and its rate."""
    v = gains.k_l * l
    dv = gains.k_theta * theta + gains.k_theta_dot * theta_dot
    return (v - dv, v + dv)


def _clamp(v: float, floor: float, ceiling: float) -> float:
    if v < floor:
        return floor
    if v > ceiling:
        return ceiling
    return v


def identity_calibration(v_max: float) -> tuple[tuple[float, float], ...]:
    """Straight-line speed-to-duty table: duty = V / v_max."""
    if v_max <= 0.0:
        raise ValueError("v_max must be positive")
    return ((0.0, 0.0), (float(v_max), 1.0))


def apply_calibration(v: float, curve: tuple[tuple[float, float], ...]) -> float:
    """Duty fraction for a wheel speed by linear interpolation on the table."""
    if len(curve) < 2:
        raise CalibrationError("calibration table needs at least 2 points")
    speeds = [p[0] for p in curve]
    if any(b <= a for a, b in zip(speeds, speeds[1:])):
        raise CalibrationError("calibration speeds must be strictly increasing")
    if v < speeds[0] or v > speeds[-1]:
        raise CalibrationError(
            f"speed {v} outside calibration domain [{speeds[0]}, {speeds[-1]}]")
    hi = bisect_right(speeds, v)
    if hi == len(speeds):
        return float(curve[-1][1])
    lo = hi - 1
    x0, y0 = curve[lo]
    x1, y1 = curve[hi]
    return y0 + (y1 - y0) * (v - x0) / (x1 - x0)


def compute_wheel_command(state: DriveState, gains: ControlGains,
                          curve_left: tuple[tuple[float, float], ...] | None = None,
                          curve_right: tuple[tuple[float, float], ...] | None = None
                          ) -> WheelCommand:
    """Wheel speeds and duties for the current state.

    Converged robots get an unconditional full stop; otherwise the law output
    is clamped per wheel to [floor, shared ceiling].
    """
    if curve_left is None:
        curve_left = identity_calibration(gains.v_max)
    if curve_right is None:
        curve_right = identity_calibration(gains.v_max)
    if state.converged:
        return WheelCommand(0.0, 0.0, 0.0, 0.0)
    v_l, v_r = raw_wheel_speeds(state.l, state.theta, state.theta_dot, gains)
    ceiling = gains.v_max
    v_l = _clamp(v_l, gains.v_l_min, ceiling)
    v_r = _clamp(v_r, gains.v_r_min, ceiling)
    return WheelCommand(v_l, v_r,
                        apply_calibration(v_l, curve_left),
                        apply_calibration(v_r, curve_right))
