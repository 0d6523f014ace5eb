"""Reciprocal collision avoidance with differential-drive kinematics.

Each agent solves a small linear program over half-plane constraints built
from neighbours (reciprocal, both agents take half the correction) and from
polygon obstacle edges (full responsibility).  When the constraints admit no
velocity, a least-penetration fallback relaxes the agent constraints while
keeping obstacle constraints hard.

Nonholonomic drive is handled with the effective-center trick: the planner
steers the point c = p + D * e(heading), which a differential drive can move
in any direction, and inflates the agent radius by D so the footprint stays
covered.  Velocities of that point map linearly onto wheel speeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import point_segment_distance, rot, wrap_angle

_EPS = 1e-5


@dataclass(frozen=True)
class PlannerConfig:
    time_horizon: float = 2.0
    time_horizon_obst: float = 1.0
    neighbor_dist: float = 150.0
    max_speed: float = 400.0
    center_offset: float = 7.5
    dt: float = 0.01

    def __post_init__(self) -> None:
        if min(self.time_horizon, self.time_horizon_obst, self.neighbor_dist,
               self.max_speed, self.center_offset, self.dt) <= 0.0:
            raise ValueError("planner parameters must be positive")


@dataclass(frozen=True)
class AgentInput:
    """Planner view of one agent: a disc at `position` moving holonomically."""

    position: tuple[float, float]
    velocity: tuple[float, float]
    radius: float
    pref_velocity: tuple[float, float]


@dataclass(frozen=True)
class Obstacle:
    """Simple polygon; vertices in any consistent order."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ValueError("obstacle polygon needs at least 3 vertices")
        object.__setattr__(self, "vertices",
                           tuple((float(x), float(y)) for x, y in self.vertices))

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]


@dataclass(frozen=True)
class _Line:
    # feasible side is the left half-plane: det(direction, v - point) >= 0
    point: tuple[float, float]
    direction: tuple[float, float]


def _det(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def _linear_program1(lines: list[_Line], line_no: int, radius: float,
                     opt: tuple[float, float], direction_opt: bool,
                     result: tuple[float, float]) -> tuple[bool, tuple[float, float]]:
    """Optimise along lines[line_no] subject to prior lines and the speed disc."""
    px, py = lines[line_no].point
    dx, dy = lines[line_no].direction
    dot = px * dx + py * dy
    discriminant = dot * dot + radius * radius - (px * px + py * py)
    if discriminant < 0.0:
        return False, result
    sqrt_disc = math.sqrt(discriminant)
    t_left = -dot - sqrt_disc
    t_right = -dot + sqrt_disc

    for i in range(line_no):
        qx, qy = lines[i].point
        ex, ey = lines[i].direction
        denominator = _det(dx, dy, ex, ey)
        numerator = _det(ex, ey, px - qx, py - qy)
        if abs(denominator) <= _EPS:
            if numerator < 0.0:
                return False, result
            continue
        t = numerator / denominator
        if denominator >= 0.0:
            t_right = min(t_right, t)
        else:
            t_left = max(t_left, t)
        if t_left > t_right:
            return False, result

    if direction_opt:
        if opt[0] * dx + opt[1] * dy > 0.0:
            t = t_right
        else:
            t = t_left
    else:
        t = (opt[0] - px) * dx + (opt[1] - py) * dy
        t = max(t_left, min(t_right, t))
    return True, (px + t * dx, py + t * dy)


def _linear_program2(lines: list[_Line], radius: float, opt: tuple[float, float],
                     direction_opt: bool) -> tuple[int, tuple[float, float]]:
    """Feasibility-preserving incremental LP; returns (failed line index or
    len(lines), result)."""
    if direction_opt:
        result = (opt[0] * radius, opt[1] * radius)
    elif opt[0] * opt[0] + opt[1] * opt[1] > radius * radius:
        norm = math.hypot(opt[0], opt[1])
        result = (opt[0] / norm * radius, opt[1] / norm * radius)
    else:
        result = opt

    for i, line in enumerate(lines):
        px, py = line.point
        if _det(line.direction[0], line.direction[1],
                px - result[0], py - result[1]) > 0.0:
            ok, new_result = _linear_program1(lines, i, radius, opt, direction_opt, result)
            if not ok:
                return i, result
            result = new_result
    return len(lines), result


def _linear_program3(lines: list[_Line], num_obst_lines: int, begin_line: int,
                     radius: float, result: tuple[float, float]) -> tuple[float, float]:
    """Least-penetration fallback: minimise the worst violation of the agent
    lines while keeping obstacle lines hard."""
    distance = 0.0
    for i in range(begin_line, len(lines)):
        line = lines[i]
        if _det(line.direction[0], line.direction[1],
                line.point[0] - result[0], line.point[1] - result[1]) > distance:
            proj_lines = list(lines[:num_obst_lines])
            for j in range(num_obst_lines, i):
                other = lines[j]
                determinant = _det(line.direction[0], line.direction[1],
                                   other.direction[0], other.direction[1])
                if abs(determinant) <= _EPS:
                    if line.direction[0] * other.direction[0] + \
                       line.direction[1] * other.direction[1] > 0.0:
                        continue  # parallel, same direction: redundant
                    point = (0.5 * (line.point[0] + other.point[0]),
                             0.5 * (line.point[1] + other.point[1]))
                else:
                    t = _det(other.direction[0], other.direction[1],
                             line.point[0] - other.point[0],
                             line.point[1] - other.point[1]) / determinant
                    point = (line.point[0] + t * line.direction[0],
                             line.point[1] + t * line.direction[1])
                ddx = other.direction[0] - line.direction[0]
                ddy = other.direction[1] - line.direction[1]
                norm = math.hypot(ddx, ddy)
                proj_lines.append(_Line(point, (ddx / norm, ddy / norm)))

            previous = result
            fail, result = _linear_program2(
                proj_lines, radius, (-line.direction[1], line.direction[0]), True)
            if fail < len(proj_lines):
                # rounding only; keep the best point found so far
                result = previous
            distance = _det(line.direction[0], line.direction[1],
                            line.point[0] - result[0], line.point[1] - result[1])
    return result


def _agent_line(self_pos, self_vel, self_radius, other: AgentInput,
                cfg: PlannerConfig) -> _Line:
    """Reciprocal half-plane against one neighbour."""
    rel_px = other.position[0] - self_pos[0]
    rel_py = other.position[1] - self_pos[1]
    rel_vx = self_vel[0] - other.velocity[0]
    rel_vy = self_vel[1] - other.velocity[1]
    dist_sq = rel_px * rel_px + rel_py * rel_py
    combined = self_radius + other.radius
    combined_sq = combined * combined

    if dist_sq > combined_sq:
        inv_t = 1.0 / cfg.time_horizon
        wx = rel_vx - inv_t * rel_px
        wy = rel_vy - inv_t * rel_py
        w_len_sq = wx * wx + wy * wy
        dot1 = wx * rel_px + wy * rel_py
        if dot1 < 0.0 and dot1 * dot1 > combined_sq * w_len_sq:
            # project on cut-off circle
            w_len = math.sqrt(w_len_sq)
            ux, uy = wx / w_len, wy / w_len
            direction = (uy, -ux)
            scale = combined * inv_t - w_len
            u = (scale * ux, scale * uy)
        else:
            # project on a leg; ties (det == 0) take the right leg so both
            # agents of a symmetric pair turn the same way
            leg = math.sqrt(max(dist_sq - combined_sq, 0.0))
            if _det(rel_px, rel_py, wx, wy) > 0.0:
                direction = ((rel_px * leg - rel_py * combined) / dist_sq,
                             (rel_px * combined + rel_py * leg) / dist_sq)
            else:
                direction = (-(rel_px * leg + rel_py * combined) / dist_sq,
                             (rel_py * leg - rel_px * combined) / dist_sq)
            dot2 = rel_vx * direction[0] + rel_vy * direction[1]
            u = (dot2 * direction[0] - rel_vx, dot2 * direction[1] - rel_vy)
    else:
        # already colliding: resolve within one step
        inv_dt = 1.0 / cfg.dt
        wx = rel_vx - inv_dt * rel_px
        wy = rel_vy - inv_dt * rel_py
        w_len = math.hypot(wx, wy)
        if w_len == 0.0:
            # coincident centres and velocities: separate along -x
            nx, ny = (-1.0, 0.0)
        else:
            nx, ny = wx / w_len, wy / w_len
        direction = (ny, -nx)
        scale = combined * inv_dt - w_len
        u = (scale * nx, scale * ny)

    return _Line((self_vel[0] + 0.5 * u[0], self_vel[1] + 0.5 * u[1]), direction)


def _obstacle_lines(self_pos, self_radius: float, obstacles: list[Obstacle],
                    cfg: PlannerConfig) -> list[_Line]:
    """Conservative half-plane per nearby obstacle edge: the velocity toward
    the edge is capped so contact cannot happen within the obstacle horizon."""
    lines: list[_Line] = []
    reach = cfg.max_speed * cfg.time_horizon_obst + self_radius
    for obstacle in obstacles:
        for (ax, ay), (bx, by) in obstacle.edges():
            dist, qx, qy = point_segment_distance(self_pos[0], self_pos[1], ax, ay, bx, by)
            if dist - self_radius > reach:
                continue
            if dist > 0.0:
                nx = (self_pos[0] - qx) / dist
                ny = (self_pos[1] - qy) / dist
            else:
                # centre exactly on the edge: push along the edge normal
                ex, ey = bx - ax, by - ay
                norm = math.hypot(ex, ey)
                nx, ny = -ey / norm, ex / norm
            clearance = dist - self_radius
            if clearance > 0.0:
                bound = -clearance / cfg.time_horizon_obst
            else:
                # already touching: force outward as fast as the speed cap
                # allows while keeping the constraint satisfiable
                bound = min(-clearance / cfg.dt, 0.95 * cfg.max_speed)
            lines.append(_Line((bound * nx, bound * ny), (ny, -nx)))
    return lines


def compute_velocity(agent: AgentInput, neighbors: list[AgentInput],
                     obstacles: list[Obstacle], cfg: PlannerConfig) -> tuple[float, float]:
    """New velocity for one agent: closest to its preferred velocity among
    velocities that respect all half-plane constraints and the speed cap."""
    ordered = sorted(
        neighbors,
        key=lambda n: ((n.position[0] - agent.position[0]) ** 2 +
                       (n.position[1] - agent.position[1]) ** 2,
                       n.position[0] - agent.position[0],
                       n.position[1] - agent.position[1],
                       n.radius, n.velocity))
    lines = _obstacle_lines(agent.position, agent.radius, obstacles, cfg)
    num_obst = len(lines)
    for other in ordered:
        dx = other.position[0] - agent.position[0]
        dy = other.position[1] - agent.position[1]
        if dx * dx + dy * dy > cfg.neighbor_dist * cfg.neighbor_dist:
            continue
        lines.append(_agent_line(agent.position, agent.velocity, agent.radius, other, cfg))

    fail, result = _linear_program2(lines, cfg.max_speed, agent.pref_velocity, False)
    if fail < len(lines):
        result = _linear_program3(lines, num_obst, fail, cfg.max_speed, result)
    return result


def step_all(agents: list[AgentInput], obstacles: list[Obstacle],
             cfg: PlannerConfig) -> list[tuple[float, float]]:
    """One reciprocal step: every agent plans against the same snapshot."""
    return [
        compute_velocity(agent, [a for j, a in enumerate(agents) if j != i], obstacles, cfg)
        for i, agent in enumerate(agents)
    ]


# --- differential drive kinematics -------------------------------------------


def effective_center(pose: tuple[float, float, float], offset: float) -> tuple[float, float]:
    """The steered point ahead of the axle: p + offset * e(heading)."""
    x, y, heading = pose
    return (x + offset * math.cos(heading), y + offset * math.sin(heading))


def wheel_speeds_for_velocity(v_cmd: tuple[float, float], pose: tuple[float, float, float],
                              offset: float, wheel_base: float) -> tuple[float, float]:
    """Wheel speeds that move the effective centre with velocity v_cmd.

    Forward speed is the component along the heading; the lateral component
    is produced by turning: omega = v_perp / offset.
    """
    heading = pose[2]
    c, s = math.cos(heading), math.sin(heading)
    forward = v_cmd[0] * c + v_cmd[1] * s
    lateral = -v_cmd[0] * s + v_cmd[1] * c
    omega = lateral / offset
    half = 0.5 * wheel_base
    return (forward - omega * half, forward + omega * half)


def center_velocity(pose: tuple[float, float, float], v_left: float, v_right: float,
                    offset: float, wheel_base: float) -> tuple[float, float]:
    """Current velocity of the effective centre given wheel speeds."""
    heading = pose[2]
    forward = 0.5 * (v_left + v_right)
    omega = (v_right - v_left) / wheel_base
    c, s = math.cos(heading), math.sin(heading)
    return (forward * c - offset * omega * s, forward * s + offset * omega * c)


def integrate_unicycle(pose: tuple[float, float, float], v_left: float, v_right: float,
                       wheel_base: float, dt: float) -> tuple[float, float, float]:
    """Exact constant-twist integration of a differential drive."""
    x, y, heading = pose
    forward = 0.5 * (v_left + v_right)
    omega = (v_right - v_left) / wheel_base
    if abs(omega) < 1e-12:
        return (x + forward * math.cos(heading) * dt,
                y + forward * math.sin(heading) * dt,
                heading)
    new_heading = wrap_angle(heading + omega * dt)
    radius = forward / omega
    return (x + radius * (math.sin(new_heading) - math.sin(heading)),
            y - radius * (math.cos(new_heading) - math.cos(heading)),
            new_heading)


# --- crowd rollout ------------------------------------------------------------

# Preferred velocity gain: how fast an agent tries to close its goal error.
GOAL_GAIN = 5.0

# Tiny per-agent rotation of the preferred velocity, same sign for everyone
# but distinct magnitudes.  Exactly symmetric approaches (head-on pairs,
# antipodal rings) are fixed points of reciprocal avoidance: a common bias
# commutes with the ring symmetry and the crowd packs into a stable standoff,
# so each agent needs its own deterministic chirality to peel the ring apart.
PREF_BIAS_RAD = 1e-3


def _pref_bias(index: int) -> float:
    return PREF_BIAS_RAD * (1.0 + index % 8)


@dataclass
class CrowdAgent:
    pose: tuple[float, float, float]
    radius: float
    goal: tuple[float, float]
    wheel_base: float
    wheels: tuple[float, float] = (0.0, 0.0)


class Crowd:
    """Differential-drive agents advanced with reciprocal avoidance.

    This is the simulation layer: goals come from the assigned subgoals and
    the resulting poses are what the physical robots are commanded toward.
    """

    def __init__(self, agents: list[CrowdAgent], cfg: PlannerConfig,
                 obstacles: list[Obstacle] | None = None):
        self.agents = agents
        self.cfg = cfg
        self.obstacles = list(obstacles or [])

    def _inputs(self) -> list[AgentInput]:
        cfg = self.cfg
        inputs = []
        for index, agent in enumerate(self.agents):
            center = effective_center(agent.pose, cfg.center_offset)
            vel = center_velocity(agent.pose, agent.wheels[0], agent.wheels[1],
                                  cfg.center_offset, agent.wheel_base)
            ex = agent.goal[0] - agent.pose[0]
            ey = agent.goal[1] - agent.pose[1]
            px, py = GOAL_GAIN * ex, GOAL_GAIN * ey
            speed = math.hypot(px, py)
            if speed > cfg.max_speed:
                px, py = px / speed * cfg.max_speed, py / speed * cfg.max_speed
            pref = rot(_pref_bias(index), px, py)
            inputs.append(AgentInput(position=center, velocity=vel,
                                     radius=agent.radius + cfg.center_offset,
                                     pref_velocity=pref))
        return inputs

    def step(self, dt: float | None = None) -> None:
        cfg = self.cfg
        dt = cfg.dt if dt is None else dt
        velocities = step_all(self._inputs(), self.obstacles, cfg)
        for agent, v in zip(self.agents, velocities):
            wheels = wheel_speeds_for_velocity(v, agent.pose, cfg.center_offset,
                                               agent.wheel_base)
            agent.wheels = wheels
            agent.pose = integrate_unicycle(agent.pose, wheels[0], wheels[1],
                                            agent.wheel_base, dt)

    def positions(self) -> list[tuple[float, float]]:
        return [(a.pose[0], a.pose[1]) for a in self.agents]
