"""Deterministic tick engine: hand frames to coordinated robot motion.

Two layers advance in lockstep.  The planning layer is a crowd of ideal
differential-drive agents steered by reciprocal collision avoidance toward
the assigned subgoals; it is what the host computer simulates.  The physical
layer is the robots themselves: every 100 ms each robot is commanded to its
planning twin's current position, and between commands the wheel controller
chases that waypoint at the physics rate.  Contacts (robot-robot, obstacles,
arena walls) act on the physical layer only.

Every tick appends one JSON record to the trace; trace bytes are a pure
function of the scenario and seed plus any live input applied at tick
boundaries, which is what makes live sessions replayable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import (Assignment, StaticBinding, assign_dynamic,
                         assign_static, make_static_binding)
from .drive import DriveState, compute_wheel_command, make_drive_state, \
    raw_wheel_speeds, update_goal
from .formation import ROBOT_COUNTS, SubgoalFormation, bone_subgoals, \
    get_layout, silhouette_subgoals
from .geom import point_in_polygon, point_segment_distance
from .hand import SIGNS, HandFrame, interpolate_frame, load_trajectory, \
    project_to_plane, synth_hand_sign
from .rvo import Crowd, CrowdAgent, Obstacle, integrate_unicycle
from .scenario import (LiveSource, Rect, ScenarioSpec, ScriptSource,
                       TrajectorySource, _effective_sign, density_for_count,
                       normalize_algorithm)

TICK_DT = 0.01
COMMAND_PERIOD_S = 0.1

# Identifier spacing for subgoal ids when several hands are active at once.
_HAND_ID_STRIDE = 10000


class EngineError(RuntimeError):
    """Raised when a run cannot proceed (bad counts, unreadable inputs)."""


class EngineInputError(ValueError):
    """Raised for malformed live input messages; the session survives."""


@dataclass
class RobotState:
    id: int
    pose: tuple[float, float, float]
    radius: float
    wheel_base: float
    drive: DriveState
    waypoint: tuple[float, float]
    wheels: tuple[float, float] = (0.0, 0.0)
    velocity: tuple[float, float] = (0.0, 0.0)
    clamped: bool = False


@dataclass
class Metrics:
    """Running aggregates over a run; counters never decrease."""

    mean_tracking_error: float = 0.0
    max_tracking_error: float = 0.0
    collision_count: int = 0
    total_travel: float = 0.0
    time_to_fit: float | None = None
    reassignment_count: int = 0
    _error_sum: float = field(default=0.0, repr=False)
    _error_ticks: int = field(default=0, repr=False)

    def record_errors(self, errors: list[float]) -> None:
        if not errors:
            return
        self._error_sum += sum(errors) / len(errors)
        self._error_ticks += 1
        self.mean_tracking_error = self._error_sum / self._error_ticks
        self.max_tracking_error = max(self.max_tracking_error, max(errors))

    def as_dict(self) -> dict:
        return {
            "mean_tracking_error": float(self.mean_tracking_error),
            "max_tracking_error": float(self.max_tracking_error),
            "collision_count": int(self.collision_count),
            "total_travel": float(self.total_travel),
            "time_to_fit": None if self.time_to_fit is None else float(self.time_to_fit),
            "reassignment_count": int(self.reassignment_count),
        }


# --- contacts -------------------------------------------------------------------


def resolve_contacts(positions: list[tuple[float, float]], radii: list[float],
                     velocities: list[tuple[float, float]],
                     obstacles: list[Obstacle] | None = None,
                     arena: Rect | None = None, passes: int = 4
                     ) -> tuple[list[tuple[float, float]],
                                list[tuple[float, float]],
                                set[tuple[int, int]]]:
    """Positional projection of overlapping discs plus obstacle and wall
    push-out.

    Overlapping pairs separate along the centre line, half the penetration
    each; velocity components into the contact are zeroed.  Returns corrected
    positions, corrected velocities, and the set of robot pairs in contact.
    """
    pos = [list(p) for p in positions]
    vel = [list(v) for v in velocities]
    n = len(pos)
    pairs: set[tuple[int, int]] = set()

    for _ in range(passes):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                dx = pos[j][0] - pos[i][0]
                dy = pos[j][1] - pos[i][1]
                dist = math.hypot(dx, dy)
                min_dist = radii[i] + radii[j]
                if dist >= min_dist:
                    continue
                pairs.add((i, j))
                if dist == 0.0:
                    nx, ny = 1.0, 0.0  # coincident centres: split along +x
                else:
                    nx, ny = dx / dist, dy / dist
                push = 0.5 * (min_dist - dist)
                pos[i][0] -= push * nx
                pos[i][1] -= push * ny
                pos[j][0] += push * nx
                pos[j][1] += push * ny
                # kill approach velocity so the pair does not re-penetrate
                vi_n = vel[i][0] * nx + vel[i][1] * ny
                if vi_n > 0.0:
                    vel[i][0] -= vi_n * nx
                    vel[i][1] -= vi_n * ny
                vj_n = vel[j][0] * nx + vel[j][1] * ny
                if vj_n < 0.0:
                    vel[j][0] -= vj_n * nx
                    vel[j][1] -= vj_n * ny
                moved = True

        for i in range(n):
            for obstacle in (obstacles or ()):
                px, py = pos[i]
                best = None
                for (ax, ay), (bx, by) in obstacle.edges():
                    dist, qx, qy = point_segment_distance(px, py, ax, ay, bx, by)
                    if best is None or dist < best[0]:
                        best = (dist, qx, qy)
                dist, qx, qy = best
                inside = point_in_polygon(px, py, obstacle.vertices)
                if not inside and dist >= radii[i]:
                    continue
                if dist == 0.0:
                    continue  # centre exactly on the boundary: leave to next pass
                nx, ny = (px - qx) / dist, (py - qy) / dist
                if inside:
                    nx, ny = -nx, -ny  # push out through the nearest boundary point
                    depth = dist + radii[i]
                else:
                    depth = radii[i] - dist
                pos[i][0] += depth * nx
                pos[i][1] += depth * ny
                v_n = vel[i][0] * nx + vel[i][1] * ny
                if v_n < 0.0:
                    vel[i][0] -= v_n * nx
                    vel[i][1] -= v_n * ny
                moved = True

        if arena is not None:
            for i in range(n):
                r = radii[i]
                cx = min(max(pos[i][0], arena.x_min + r), arena.x_max - r)
                cy = min(max(pos[i][1], arena.y_min + r), arena.y_max - r)
                if cx != pos[i][0]:
                    vel[i][0] = 0.0
                    pos[i][0] = cx
                    moved = True
                if cy != pos[i][1]:
                    vel[i][1] = 0.0
                    pos[i][1] = cy
                    moved = True

        if not moved:
            break

    return ([tuple(p) for p in pos], [tuple(v) for v in vel], pairs)


# --- hand sources at runtime ----------------------------------------------------


class _ResolvedSource:
    """Uniform runtime interface over the declarative hand source kinds."""

    def __init__(self, spec: ScenarioSpec):
        src = spec.hand_source
        self.kind = type(src).__name__
        self._script = src if isinstance(src, ScriptSource) else None
        self._traj = None
        self._live: dict[int, dict] | None = None
        if isinstance(src, TrajectorySource):
            try:
                self._traj = load_trajectory(src.path)
            except OSError as exc:
                raise EngineError(f"cannot read hand trajectory: {exc}") from None
            self.rate_hz = self._traj.rate_hz
        elif isinstance(src, LiveSource):
            self._live = {0: {"x": src.x, "y": src.y, "yaw": src.yaw,
                              "sign": src.sign, "scale": src.scale,
                              "palm_up": src.palm_up}}
            self.rate_hz = src.rate_hz
        else:
            self.rate_hz = src.rate_hz

    def set_live_hand(self, hand_id: int, params: dict) -> None:
        if self._live is None:
            raise EngineInputError("hand messages require a live hand source")
        self._live[hand_id] = params

    @property
    def is_empty(self) -> bool:
        """True when the source can never produce a hand frame."""
        if self._script is not None:
            return all(s.vanish for s in self._script.steps)
        if self._traj is not None:
            return not self._traj.frames
        return False

    def sample(self, t: float, with_mesh: bool) -> list[HandFrame]:
        if self._script is not None:
            return self._script.sample(t, with_mesh=with_mesh)
        if self._traj is not None:
            frames = []
            for hand_id in self._traj.hand_ids:
                hand_frames = self._traj.frames_for(hand_id)
                if hand_frames[0].t <= t <= hand_frames[-1].t:
                    frames.append(interpolate_frame(self._traj, t, hand_id))
            return frames
        return [synth_hand_sign(_effective_sign(p["sign"], p["palm_up"]),
                                (p["x"], p["y"], p["yaw"]), scale=p["scale"],
                                t=t, hand_id=hand_id, with_mesh=with_mesh)
                for hand_id, p in sorted(self._live.items())]


def spawn_poses(area: Rect, n: int, radius: float) -> list[tuple[float, float, float]]:
    """Deterministic spawn grid inside the start area, row-major, heading 0."""
    if n <= 0:
        return []
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    margin = radius + 5.0
    usable_w = area.width - 2.0 * margin
    usable_h = area.height - 2.0 * margin
    step_x = usable_w / max(cols - 1, 1)
    step_y = usable_h / max(rows - 1, 1)
    if min(step_x if cols > 1 else math.inf,
           step_y if rows > 1 else math.inf) < 2.0 * radius + 2.0:
        raise EngineError(f"start area too small for {n} robots of radius {radius}")
    poses = []
    for k in range(n):
        r, c = divmod(k, cols)
        x = area.x_min + margin + (c * step_x if cols > 1 else 0.5 * usable_w)
        y = area.y_min + margin + (r * step_y if rows > 1 else 0.5 * usable_h)
        poses.append((x, y, 0.0))
    return poses


# --- the engine -----------------------------------------------------------------


class Engine:
    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.dt = TICK_DT
        self.algorithm = spec.algorithm
        self.density = spec.density
        self.source = _ResolvedSource(spec)
        self.hand_every = max(1, round(1.0 / (self.source.rate_hz * self.dt)))
        self.command_every = round(COMMAND_PERIOD_S / self.dt)
        self.tick_index = 0
        self.metrics = Metrics()
        self.trace_lines: list[str] = []
        self.mailbox: list[dict] = []
        self.input_log: list[tuple[int, dict]] = []

        self.formation: SubgoalFormation | None = None
        self.assignment: Assignment | None = None
        self.binding: StaticBinding | None = None
        self.hand_wrists: list[tuple[int, float, float]] = []
        self._prev_goal_ids: list[int] | None = None
        self._contact_pairs: set[tuple[int, int]] = set()
        self._formation_dirty = True
        self._next_spawn_slot = 0
        self._reassigned = 0
        self._was_fit = False

        count = spec.robot_count()
        if spec.spawn is not None:
            if len(spec.spawn) != count:
                raise EngineError(f"spawn list has {len(spec.spawn)} poses, "
                                  f"scenario needs {count} robots")
            poses = [tuple(map(float, p)) for p in spec.spawn]
        else:
            poses = spawn_poses(spec.start_area, count, spec.robot_radius)
        self._next_spawn_slot = count

        self.robots: list[RobotState] = []
        agents: list[CrowdAgent] = []
        for i, pose in enumerate(poses):
            self.robots.append(self._new_robot(i, pose))
            agents.append(CrowdAgent(pose=pose, radius=spec.robot_radius,
                                     goal=(pose[0], pose[1]),
                                     wheel_base=spec.resolved_wheel_base))
        self.crowd = Crowd(agents, spec.planner,
                           [Obstacle(poly) for poly in spec.obstacles])

    # -- construction helpers

    def _new_robot(self, rid: int, pose: tuple[float, float, float]) -> RobotState:
        drive = make_drive_state((pose[0], pose[1]), pose[2],
                                 (pose[0], pose[1]), self.spec.gains.sigma)
        return RobotState(id=rid, pose=pose, radius=self.spec.robot_radius,
                          wheel_base=self.spec.resolved_wheel_base, drive=drive,
                          waypoint=(pose[0], pose[1]))

    @property
    def t(self) -> float:
        return self.tick_index * self.dt

    @property
    def robot_count(self) -> int:
        return len(self.robots)

    # -- live input

    def enqueue(self, message: dict) -> None:
        self.mailbox.append(message)

    def _apply_message(self, msg: dict) -> None:
        if not isinstance(msg, dict) or "type" not in msg:
            raise EngineInputError("message must be an object with a 'type' field")
        kind = msg["type"]
        if kind == "hand":
            try:
                params = {"x": float(msg["x"]), "y": float(msg["y"]),
                          "yaw": float(msg.get("yaw", 0.0)),
                          "sign": str(msg.get("sign", "paper")),
                          "scale": float(msg.get("scale", 1.0)),
                          "palm_up": None if "palm_up" not in msg else bool(msg["palm_up"])}
            except (KeyError, TypeError, ValueError) as exc:
                raise EngineInputError(f"bad hand message: {exc}") from None
            if params["sign"] not in SIGNS:
                raise EngineInputError(f"unknown hand sign {params['sign']!r}")
            if params["scale"] <= 0.0:
                raise EngineInputError("scale must be positive")
            self.source.set_live_hand(int(msg.get("hand_id", 0)), params)
            self._formation_dirty = True
        elif kind == "config":
            if "algorithm" in msg:
                try:
                    self.algorithm = normalize_algorithm(msg["algorithm"])
                except ValueError as exc:
                    raise EngineInputError(str(exc)) from None
                self.binding = None  # static binding re-anchors on switch
            if "density" in msg:
                self._set_density(str(msg["density"]))
            self._formation_dirty = True
        elif kind == "obstacle_add":
            try:
                polygon = tuple((float(x), float(y)) for x, y in msg["polygon"])
                obstacle = Obstacle(polygon)
            except (KeyError, TypeError, ValueError) as exc:
                raise EngineInputError(f"bad obstacle polygon: {exc}") from None
            self.crowd.obstacles.append(obstacle)
        else:
            raise EngineInputError(f"unknown message type {kind!r}")

    def _set_density(self, density: str) -> None:
        if (self.spec.size_mm, density) not in ROBOT_COUNTS:
            raise EngineInputError(f"unknown density {density!r}")
        self.density = density
        target = ROBOT_COUNTS[(self.spec.size_mm, density)]
        while len(self.robots) > target:
            self.robots.pop()
            self.crowd.agents.pop()
        if len(self.robots) < target:
            poses = spawn_poses(self.spec.start_area,
                                self._next_spawn_slot + (target - len(self.robots)),
                                self.spec.robot_radius)
            while len(self.robots) < target:
                pose = poses[self._next_spawn_slot]
                rid = len(self.robots)
                self.robots.append(self._new_robot(rid, pose))
                self.crowd.agents.append(CrowdAgent(
                    pose=pose, radius=self.spec.robot_radius,
                    goal=(pose[0], pose[1]),
                    wheel_base=self.spec.resolved_wheel_base))
                self._next_spawn_slot += 1
        self._prev_goal_ids = None
        self.binding = None

    def drain_mailbox(self) -> list[tuple[dict, str | None]]:
        """Apply queued messages in arrival order; returns (message, error)."""
        results = []
        for msg in self.mailbox:
            try:
                self._apply_message(msg)
                self.input_log.append((self.tick_index, msg))
                results.append((msg, None))
            except EngineInputError as exc:
                results.append((msg, str(exc)))
        self.mailbox.clear()
        return results

    # -- pipeline stages

    def _sense_and_assign(self) -> None:
        with_mesh = self.algorithm == "silhouette_dynamic"
        frames = self.source.sample(self.t, with_mesh=with_mesh)
        if not frames:
            raise EngineError(f"no hand present at t={self.t:.3f}")
        hands = len(frames)
        if self.robot_count % hands != 0:
            raise EngineError(f"{self.robot_count} robots cannot split over "
                              f"{hands} hands")
        per_hand = self.robot_count // hands

        parts: list[SubgoalFormation] = []
        self.hand_wrists = []
        for frame in frames:
            bones2d, mesh2d = project_to_plane(frame)
            self.hand_wrists.append((frame.hand_id, float(bones2d[0, 0]),
                                     float(bones2d[0, 1])))
            if self.algorithm == "silhouette_dynamic":
                parts.append(silhouette_subgoals(mesh2d, per_hand, self.spec.seed,
                                                 t=self.t, hand_id=frame.hand_id))
            else:
                density = density_for_count(self.spec.size_mm, per_hand)
                layout = get_layout(self.spec.size_mm, density)
                parts.append(bone_subgoals(bones2d, layout, t=self.t,
                                           hand_id=frame.hand_id))

        if len(parts) == 1:
            self.formation = parts[0]
        else:
            points = np.vstack([p.points for p in parts])
            ids = tuple(slot * _HAND_ID_STRIDE + sid
                        for slot, p in enumerate(parts) for sid in p.ids)
            self.formation = SubgoalFormation(
                t=self.t, points=points, ids=ids,
                generator=parts[0].generator, hand_id=-1)

        sim_positions = np.array(self.crowd.positions())
        if self.algorithm == "bone_static":
            if self.binding is None or len(self.binding.subgoal_id_by_robot) != \
                    self.formation.count:
                self.binding = make_static_binding(sim_positions, self.formation)
            self.assignment = assign_static(self.binding, sim_positions, self.formation)
        else:
            self.assignment = assign_dynamic(sim_positions, self.formation)

        goal_ids = [self.formation.ids[j] for j in self.assignment.perm]
        if self._prev_goal_ids is not None and \
                len(self._prev_goal_ids) == len(goal_ids):
            self._reassigned = sum(a != b for a, b in
                                   zip(self._prev_goal_ids, goal_ids))
            self.metrics.reassignment_count += self._reassigned
        else:
            self._reassigned = 0
        self._prev_goal_ids = goal_ids

    def _goal_points(self) -> list[tuple[float, float]]:
        pts = self.formation.points
        return [(float(pts[j, 0]), float(pts[j, 1])) for j in self.assignment.perm]

    def tick(self) -> None:
        """One physics step of the full pipeline, in fixed stage order."""
        self.drain_mailbox()

        self._reassigned = 0
        if self._formation_dirty or self.tick_index % self.hand_every == 0:
            self._sense_and_assign()
            self._formation_dirty = False

        goals = self._goal_points()
        for agent, goal in zip(self.crowd.agents, goals):
            agent.goal = goal
        self.crowd.step(self.dt)
        arena = self.spec.arena
        for agent in self.crowd.agents:
            x = min(max(agent.pose[0], arena.x_min + agent.radius),
                    arena.x_max - agent.radius)
            y = min(max(agent.pose[1], arena.y_min + agent.radius),
                    arena.y_max - agent.radius)
            if (x, y) != (agent.pose[0], agent.pose[1]):
                agent.pose = (x, y, agent.pose[2])

        if self.tick_index % self.command_every == 0:
            for robot, agent in zip(self.robots, self.crowd.agents):
                robot.waypoint = (agent.pose[0], agent.pose[1])

        collisions = self._advance_robots()
        self._record(collisions)
        self.tick_index += 1

    def _advance_robots(self) -> list[tuple[int, int]]:
        gains = self.spec.gains
        dt = self.dt
        old_positions = [(r.pose[0], r.pose[1]) for r in self.robots]

        for robot, old in zip(self.robots, old_positions):
            robot.drive = update_goal(robot.drive, robot.waypoint, dt,
                                      position=old, heading=robot.pose[2])
            cmd = compute_wheel_command(robot.drive, gains)
            raw = raw_wheel_speeds(robot.drive.l, robot.drive.theta,
                                   robot.drive.theta_dot, gains)
            robot.clamped = (not robot.drive.converged and
                             (cmd.v_l != raw[0] or cmd.v_r != raw[1]))
            robot.wheels = (cmd.v_l, cmd.v_r)
            robot.pose = integrate_unicycle(robot.pose, cmd.v_l, cmd.v_r,
                                            robot.wheel_base, dt)
            robot.velocity = ((robot.pose[0] - old[0]) / dt,
                              (robot.pose[1] - old[1]) / dt)

        positions = [(r.pose[0], r.pose[1]) for r in self.robots]
        radii = [r.radius for r in self.robots]
        velocities = [r.velocity for r in self.robots]
        positions, velocities, pairs = resolve_contacts(
            positions, radii, velocities, self.crowd.obstacles, self.spec.arena)

        new_pairs = []
        for i, j in sorted(pairs):
            key = (self.robots[i].id, self.robots[j].id)
            if key not in self._contact_pairs:
                new_pairs.append(key)
        self._contact_pairs = {(self.robots[i].id, self.robots[j].id)
                               for i, j in pairs}
        self.metrics.collision_count += len(new_pairs)

        for robot, pos, vel, old in zip(self.robots, positions, velocities,
                                        old_positions):
            robot.pose = (pos[0], pos[1], robot.pose[2])
            robot.velocity = vel
            self.metrics.total_travel += math.hypot(pos[0] - old[0], pos[1] - old[1])
        return new_pairs

    def _record(self, collisions: list[tuple[int, int]]) -> None:
        goals = self._goal_points()
        errors = [math.hypot(r.pose[0] - g[0], r.pose[1] - g[1])
                  for r, g in zip(self.robots, goals)]
        self.metrics.record_errors(errors)

        # time_to_fit is the most recent unfit-to-fit transition after the
        # task starts, so a pre-task settle does not score and a task that
        # perturbs an already-fit swarm measures the refit time
        t_now = (self.tick_index + 1) * self.dt
        if errors and t_now >= self.spec.task_start_s:
            fit = max(errors) <= self.spec.fit_tolerance_mm
            if fit and not self._was_fit:
                self.metrics.time_to_fit = t_now - self.spec.task_start_s
            self._was_fit = fit

        pts = self.formation.points
        record = {
            "tick": self.tick_index,
            "t": float(self.t),
            "algorithm": self.algorithm,
            "density": self.density,
            "hands": [{"id": hid, "wrist": [wx, wy]}
                      for hid, wx, wy in self.hand_wrists],
            "subgoals": [[float(pts[k, 0]), float(pts[k, 1])]
                         for k in range(len(pts))],
            "subgoal_ids": [int(s) for s in self.formation.ids],
            "assignment": [int(j) for j in self.assignment.perm],
            "assignment_cost": float(self.assignment.total_cost),
            "robots": [{
                "id": r.id,
                "x": float(r.pose[0]), "y": float(r.pose[1]),
                "heading": float(r.pose[2]),
                "vl": float(r.wheels[0]), "vr": float(r.wheels[1]),
                "wx": float(r.waypoint[0]), "wy": float(r.waypoint[1]),
                "sx": float(a.pose[0]), "sy": float(a.pose[1]),
                "converged": bool(r.drive.converged),
                "clamped": bool(r.clamped),
            } for r, a in zip(self.robots, self.crowd.agents)],
            "events": {"collisions": [[int(i), int(j)] for i, j in collisions],
                       "reassigned": int(self._reassigned)},
            "metrics": self.metrics.as_dict(),
        }
        self.trace_lines.append(json.dumps(record, separators=(",", ":")))

    def snapshot(self) -> dict:
        """Compact state frame for live subscribers."""
        if self.formation is None:
            subgoals, assignment = [], []
        else:
            pts = self.formation.points
            subgoals = [[float(pts[k, 0]), float(pts[k, 1])] for k in range(len(pts))]
            assignment = [int(j) for j in self.assignment.perm]
        return {
            "type": "state",
            "t": float(self.t),
            "algorithm": self.algorithm,
            "density": self.density,
            "robots": [{"id": r.id, "x": float(r.pose[0]), "y": float(r.pose[1]),
                        "heading": float(r.pose[2]),
                        "converged": bool(r.drive.converged)}
                       for r in self.robots],
            "subgoals": subgoals,
            "assignment": assignment,
            "obstacles": [[list(v) for v in o.vertices] for o in self.crowd.obstacles],
            "metrics": self.metrics.as_dict(),
        }

    def run(self) -> Metrics:
        """Advance through the configured duration, then write any outputs."""
        n_ticks = round(self.spec.duration_s / self.dt)
        # a source with nothing to follow (empty trajectory, fully vanished
        # script) yields an empty trace and zero metrics rather than an error
        if self.source.is_empty:
            n_ticks = 0
        for _ in range(n_ticks):
            self.tick()
        self.write_outputs()
        return self.metrics

    def write_outputs(self) -> None:
        if self.spec.trace_path:
            with open(self.spec.trace_path, "w", encoding="utf-8") as fh:
                for line in self.trace_lines:
                    fh.write(line + "\n")
        if self.spec.metrics_path:
            with open(self.spec.metrics_path, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(self.metrics.as_dict(), separators=(",", ":")) + "\n")


def run_scenario(spec: ScenarioSpec) -> tuple[list[str], Metrics]:
    """Execute a scenario start to finish; returns (trace lines, metrics)."""
    engine = Engine(spec)
    metrics = engine.run()
    return engine.trace_lines, metrics
