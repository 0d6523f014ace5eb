"""Scenario configuration: schema, validation, hand sources, and presets.

A scenario JSON file fully determines a run together with its seed.  Top
level sections: robots, algorithm, hand_source, arena, start_area,
obstacles, gains, planner, graycode, outputs, plus the optional reaching
task block (target, task_start_s, fit_tolerance_mm).
"""

from __future__ import annotations

import dataclasses
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field

from .drive import ControlGains
from .geom import wrap_angle
from .graycode import GrayCodeConfig
from .formation import ROBOT_COUNTS
from .hand import SIGNS, HandFrame, synth_hand_sign
from .rvo import PlannerConfig

ALGORITHMS = ("bone_static", "bone_dynamic", "silhouette_dynamic")
DENSITIES = ("sparse", "medium", "dense")
SIZES = (20, 30)


class ScenarioError(ValueError):
    """Raised for malformed or inconsistent scenario configuration."""


def normalize_algorithm(name: str) -> str:
    norm = str(name).replace("-", "_")
    if norm not in ALGORITHMS:
        raise ScenarioError(f"unknown algorithm {name!r}; expected one of "
                            f"{', '.join(a.replace('_', '-') for a in ALGORITHMS)}")
    return norm


def density_for_count(size_mm: int, count: int) -> str:
    """The density label whose layout has exactly `count` robots."""
    for (size, density), n in ROBOT_COUNTS.items():
        if size == size_mm and n == count:
            return density
    raise ScenarioError(f"no density for size {size_mm} mm with {count} robots")


@dataclass(frozen=True)
class Rect:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ScenarioError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def as_dict(self) -> dict:
        return {"x_min": self.x_min, "y_min": self.y_min,
                "x_max": self.x_max, "y_max": self.y_max}


@dataclass(frozen=True)
class ScriptStep:
    """One keyframe of a synthetic hand script.

    Pose and scale interpolate linearly to the next step; sign and palm flip
    switch exactly at the step time.  A vanish step removes the hand from
    that time on (split/merge choreography).
    """

    t: float
    sign: str
    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0
    scale: float = 1.0
    hand_id: int = 0
    palm_up: bool | None = None
    vanish: bool = False

    def __post_init__(self) -> None:
        if self.sign not in SIGNS:
            raise ScenarioError(f"unknown hand sign {self.sign!r}")
        if not (self.scale > 0.0):
            raise ScenarioError("scale must be positive")
        if self.t < 0.0:
            raise ScenarioError("step times must be nonnegative")


def _effective_sign(name: str, palm_up: bool | None):
    sign = SIGNS[name]
    if palm_up is None or palm_up == sign.palm_up:
        return sign
    return dataclasses.replace(sign, palm_up=palm_up)


@dataclass(frozen=True)
class ScriptSource:
    """Synthetic hand frames keyframed by ScriptSteps."""

    steps: tuple[ScriptStep, ...]
    rate_hz: float = 50.0

    def __post_init__(self) -> None:
        if not self.steps:
            raise ScenarioError("hand script needs at least one step")
        if self.rate_hz <= 0.0:
            raise ScenarioError("rate_hz must be positive")
        by_hand: dict[int, list[ScriptStep]] = {}
        for step in self.steps:
            by_hand.setdefault(step.hand_id, []).append(step)
        for hand_id, steps in by_hand.items():
            times = [s.t for s in steps]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ScenarioError(
                    f"script steps for hand {hand_id} must be strictly increasing in t")
        object.__setattr__(self, "_by_hand", by_hand)

    @property
    def hand_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_hand))

    @property
    def duration(self) -> float:
        return max(s.t for s in self.steps)

    def sample(self, t: float, with_mesh: bool = True) -> list[HandFrame]:
        frames = []
        for hand_id in self.hand_ids:
            steps = self._by_hand[hand_id]
            if t < steps[0].t:
                continue  # not yet present
            times = [s.t for s in steps]
            i = bisect_right(times, t) - 1
            cur = steps[i]
            if cur.vanish:
                continue
            if i + 1 < len(steps):
                nxt = steps[i + 1]
                frac = (t - cur.t) / (nxt.t - cur.t)
                x = cur.x + frac * (nxt.x - cur.x)
                y = cur.y + frac * (nxt.y - cur.y)
                yaw = wrap_angle(cur.yaw + frac * wrap_angle(nxt.yaw - cur.yaw))
                scale = cur.scale + frac * (nxt.scale - cur.scale)
            else:
                x, y, yaw, scale = cur.x, cur.y, cur.yaw, cur.scale
            frames.append(synth_hand_sign(
                _effective_sign(cur.sign, cur.palm_up), (x, y, yaw),
                scale=scale, t=t, hand_id=hand_id, with_mesh=with_mesh))
        return frames


@dataclass(frozen=True)
class TrajectorySource:
    """Hand frames loaded from a recorded trajectory file."""

    path: str


@dataclass(frozen=True)
class LiveSource:
    """Hand driven by bridge messages; starts at the configured rest pose."""

    rate_hz: float = 50.0
    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0
    sign: str = "paper"
    scale: float = 1.0
    palm_up: bool | None = None

    def __post_init__(self) -> None:
        if self.sign not in SIGNS:
            raise ScenarioError(f"unknown hand sign {self.sign!r}")
        if self.rate_hz <= 0.0 or self.scale <= 0.0:
            raise ScenarioError("rate_hz and scale must be positive")


@dataclass(frozen=True)
class TargetSpec:
    x: float
    y: float
    yaw: float
    sign: str

    def __post_init__(self) -> None:
        if self.sign not in SIGNS:
            raise ScenarioError(f"unknown hand sign {self.sign!r}")


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    size_mm: int
    density: str
    algorithm: str
    arena: Rect
    start_area: Rect
    hand_source: ScriptSource | TrajectorySource | LiveSource
    duration_s: float
    obstacles: tuple[tuple[tuple[float, float], ...], ...] = ()
    gains: ControlGains = field(default_factory=ControlGains)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    graycode: GrayCodeConfig | None = None
    trace_path: str | None = None
    metrics_path: str | None = None
    target: TargetSpec | None = None
    task_start_s: float = 0.0
    fit_tolerance_mm: float = 10.0
    wheel_base: float | None = None
    spawn: tuple[tuple[float, float, float], ...] | None = None

    def __post_init__(self) -> None:
        if self.size_mm not in SIZES:
            raise ScenarioError(f"robot size must be one of {SIZES}, got {self.size_mm}")
        if self.density not in DENSITIES:
            raise ScenarioError(f"density must be one of {DENSITIES}, got {self.density!r}")
        object.__setattr__(self, "algorithm", normalize_algorithm(self.algorithm))
        if self.duration_s < 0.0:
            raise ScenarioError("duration_s must be nonnegative")
        if self.task_start_s < 0.0 or self.fit_tolerance_mm <= 0.0:
            raise ScenarioError("task_start_s must be >= 0 and fit_tolerance_mm > 0")
        for poly in self.obstacles:
            if len(poly) < 3:
                raise ScenarioError("obstacle polygons need at least 3 vertices")
        if self.wheel_base is not None and self.wheel_base <= 0.0:
            raise ScenarioError("wheel_base must be positive")

    @property
    def robot_radius(self) -> float:
        return self.size_mm / 2.0

    @property
    def resolved_wheel_base(self) -> float:
        # default track width: two thirds of the body diameter
        return self.wheel_base if self.wheel_base is not None else self.size_mm * 2.0 / 3.0

    def robot_count(self) -> int:
        return ROBOT_COUNTS[(self.size_mm, self.density)]


# --- JSON (de)serialization ----------------------------------------------------


_GAIN_FIELDS = ("k_l", "k_theta", "k_theta_dot", "sigma",
                "v_l_min", "v_r_min", "v_l_max", "v_r_max")
_PLANNER_FIELDS = ("time_horizon", "time_horizon_obst", "neighbor_dist",
                   "max_speed", "center_offset", "dt")


def _rect_from(d: dict, what: str) -> Rect:
    try:
        return Rect(float(d["x_min"]), float(d["y_min"]),
                    float(d["x_max"]), float(d["y_max"]))
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"bad {what} rectangle: {exc}") from None


def _overridden(cls, section: dict | None, fields: tuple[str, ...], what: str):
    section = section or {}
    unknown = set(section) - set(fields)
    if unknown:
        raise ScenarioError(f"unknown {what} keys: {sorted(unknown)}")
    return cls(**{k: float(v) for k, v in section.items()})


def _hand_source_from(d: dict) -> ScriptSource | TrajectorySource | LiveSource:
    kind = d.get("kind")
    if kind == "script":
        steps = tuple(ScriptStep(
            t=float(s["t"]), sign=str(s["sign"]),
            x=float(s.get("x", 0.0)), y=float(s.get("y", 0.0)),
            yaw=float(s.get("yaw", 0.0)), scale=float(s.get("scale", 1.0)),
            hand_id=int(s.get("hand_id", 0)),
            palm_up=None if "palm_up" not in s else bool(s["palm_up"]),
            vanish=bool(s.get("vanish", False))) for s in d.get("steps", ()))
        return ScriptSource(steps=steps, rate_hz=float(d.get("rate_hz", 50.0)))
    if kind == "trajectory":
        if "path" not in d:
            raise ScenarioError("trajectory hand_source needs a path")
        return TrajectorySource(path=str(d["path"]))
    if kind == "live":
        return LiveSource(rate_hz=float(d.get("rate_hz", 50.0)),
                          x=float(d.get("x", 0.0)), y=float(d.get("y", 0.0)),
                          yaw=float(d.get("yaw", 0.0)),
                          sign=str(d.get("sign", "paper")),
                          scale=float(d.get("scale", 1.0)),
                          palm_up=None if "palm_up" not in d else bool(d["palm_up"]))
    raise ScenarioError(f"unknown hand_source kind {kind!r}")


def scenario_from_dict(d: dict) -> ScenarioSpec:
    try:
        robots = d["robots"]
        size = int(robots["size"])
        density = str(robots["density"])
        algorithm = str(d["algorithm"])
        arena = _rect_from(d["arena"], "arena")
        start_area = _rect_from(d["start_area"], "start_area")
        source = _hand_source_from(d["hand_source"])
    except KeyError as exc:
        raise ScenarioError(f"scenario missing required section {exc}") from None

    target = None
    if d.get("target") is not None:
        td = d["target"]
        target = TargetSpec(x=float(td["x"]), y=float(td["y"]),
                            yaw=float(td.get("yaw", 0.0)), sign=str(td["sign"]))

    graycode = None
    if d.get("graycode") is not None:
        gd = d["graycode"]
        graycode = GrayCodeConfig(
            bits_per_axis=int(gd.get("bits_per_axis", 10)),
            cell_size=float(gd.get("cell_size", 4.0)),
            origin=tuple(float(v) for v in gd.get("origin", (0.0, 0.0))),
            sensor_offsets=tuple(
                (float(p[0]), float(p[1]))
                for p in gd.get("sensor_offsets", ((-10.0, 0.0), (10.0, 0.0)))))

    outputs = d.get("outputs") or {}
    spawn = None
    if d.get("spawn") is not None:
        spawn = tuple((float(p[0]), float(p[1]), float(p[2]) if len(p) > 2 else 0.0)
                      for p in d["spawn"])

    duration = d.get("duration_s")
    if duration is None:
        if isinstance(source, ScriptSource):
            duration = source.duration
        else:
            raise ScenarioError("duration_s is required for this hand_source")

    try:
        gains = _overridden(ControlGains, d.get("gains"), _GAIN_FIELDS, "gains")
        planner = _overridden(PlannerConfig, d.get("planner"), _PLANNER_FIELDS, "planner")
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None

    return ScenarioSpec(
        seed=int(d.get("seed", 0)),
        size_mm=size, density=density, algorithm=algorithm,
        arena=arena, start_area=start_area, hand_source=source,
        duration_s=float(duration),
        obstacles=tuple(tuple((float(x), float(y)) for x, y in poly)
                        for poly in d.get("obstacles", ())),
        gains=gains, planner=planner, graycode=graycode,
        trace_path=outputs.get("trace"), metrics_path=outputs.get("metrics"),
        target=target,
        task_start_s=float(d.get("task_start_s", 0.0)),
        fit_tolerance_mm=float(d.get("fit_tolerance_mm", 10.0)),
        wheel_base=None if d.get("wheel_base") is None else float(d["wheel_base"]),
        spawn=spawn)


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    source = spec.hand_source
    if isinstance(source, ScriptSource):
        steps = []
        for s in source.steps:
            step = {"t": s.t, "sign": s.sign, "x": s.x, "y": s.y, "yaw": s.yaw,
                    "scale": s.scale, "hand_id": s.hand_id}
            if s.palm_up is not None:
                step["palm_up"] = s.palm_up
            if s.vanish:
                step["vanish"] = True
            steps.append(step)
        hand_source = {"kind": "script", "rate_hz": source.rate_hz, "steps": steps}
    elif isinstance(source, TrajectorySource):
        hand_source = {"kind": "trajectory", "path": source.path}
    else:
        hand_source = {"kind": "live", "rate_hz": source.rate_hz, "x": source.x,
                       "y": source.y, "yaw": source.yaw, "sign": source.sign,
                       "scale": source.scale}
        if source.palm_up is not None:
            hand_source["palm_up"] = source.palm_up

    d = {
        "seed": spec.seed,
        "robots": {"size": spec.size_mm, "density": spec.density},
        "algorithm": spec.algorithm,
        "arena": spec.arena.as_dict(),
        "start_area": spec.start_area.as_dict(),
        "hand_source": hand_source,
        "duration_s": spec.duration_s,
        "obstacles": [[list(p) for p in poly] for poly in spec.obstacles],
        "gains": {k: getattr(spec.gains, k) for k in _GAIN_FIELDS},
        "planner": {k: getattr(spec.planner, k) for k in _PLANNER_FIELDS},
        "task_start_s": spec.task_start_s,
        "fit_tolerance_mm": spec.fit_tolerance_mm,
    }
    if spec.graycode is not None:
        d["graycode"] = {"bits_per_axis": spec.graycode.bits_per_axis,
                         "cell_size": spec.graycode.cell_size,
                         "origin": list(spec.graycode.origin),
                         "sensor_offsets": [list(p) for p in spec.graycode.sensor_offsets]}
    if spec.target is not None:
        d["target"] = {"x": spec.target.x, "y": spec.target.y,
                       "yaw": spec.target.yaw, "sign": spec.target.sign}
    if spec.trace_path or spec.metrics_path:
        d["outputs"] = {}
        if spec.trace_path:
            d["outputs"]["trace"] = spec.trace_path
        if spec.metrics_path:
            d["outputs"]["metrics"] = spec.metrics_path
    if spec.wheel_base is not None:
        d["wheel_base"] = spec.wheel_base
    if spec.spawn is not None:
        d["spawn"] = [list(p) for p in spec.spawn]
    return d


def load_scenario(path: str) -> ScenarioSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must contain a JSON object")
    return scenario_from_dict(data)


def save_scenario(spec: ScenarioSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(spec), fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- presets --------------------------------------------------------------------

# Hand scale used by the bundled presets.  At 1.0 the tightest sign (a closed
# fist) packs subgoals closer than two robot bodies; 1.6 keeps every preset
# formation physically reachable for 30 mm robots.
PRESET_HAND_SCALE = 1.6

# Steering-point offset for preset planners.  The default 7.5 mm inflates the
# avoidance radius enough to block the tightest formations; 4 mm keeps the
# packing floor (2 * (radius + offset)) just under the tightest preset
# subgoal spacing.
PRESET_CENTER_OFFSET = 4.0

_PRESET_ARENA = Rect(-350.0, -400.0, 800.0, 650.0)
_PRESET_START = Rect(-140.0, -140.0, 140.0, 140.0)


def _preset_base(algorithm: str, density: str, size: int, seed: int) -> dict:
    return dict(seed=seed, size_mm=size, density=density,
                algorithm=normalize_algorithm(algorithm),
                arena=_PRESET_ARENA, start_area=_PRESET_START,
                planner=PlannerConfig(center_offset=PRESET_CENTER_OFFSET))


def preset_reaching(sign: str = "paper", algorithm: str = "bone_dynamic",
                    density: str = "sparse", size: int = 30, seed: int = 7) -> ScenarioSpec:
    """Reaching task: dwell 2 s at the start area, then carry the sign to a
    target 300 mm back and 173 mm to the side, and hold."""
    if sign not in SIGNS:
        raise ScenarioError(f"unknown hand sign {sign!r}")
    scale = PRESET_HAND_SCALE
    target = TargetSpec(x=300.0, y=-173.0, yaw=0.0, sign=sign)
    steps = (
        ScriptStep(t=0.0, sign=sign, x=0.0, y=0.0, yaw=0.0, scale=scale),
        ScriptStep(t=2.0, sign=sign, x=0.0, y=0.0, yaw=0.0, scale=scale),
        ScriptStep(t=3.5, sign=sign, x=target.x, y=target.y, yaw=target.yaw, scale=scale),
        ScriptStep(t=8.0, sign=sign, x=target.x, y=target.y, yaw=target.yaw, scale=scale),
    )
    return ScenarioSpec(hand_source=ScriptSource(steps=steps), duration_s=8.0,
                        target=target, task_start_s=2.0, fit_tolerance_mm=10.0,
                        **_preset_base(algorithm, density, size, seed))


def preset_flip(algorithm: str = "bone_dynamic", density: str = "sparse",
                size: int = 30, seed: int = 7) -> ScenarioSpec:
    """Palm flip: a paper hand turns into reversed paper at t = 2 s, mirroring
    every subgoal about the wrist axis in one frame."""
    scale = PRESET_HAND_SCALE
    steps = (
        ScriptStep(t=0.0, sign="paper", x=0.0, y=0.0, yaw=0.0, scale=scale),
        ScriptStep(t=2.0, sign="reversed_paper", x=0.0, y=0.0, yaw=0.0, scale=scale),
        ScriptStep(t=7.0, sign="reversed_paper", x=0.0, y=0.0, yaw=0.0, scale=scale),
    )
    return ScenarioSpec(hand_source=ScriptSource(steps=steps), duration_s=7.0,
                        task_start_s=2.0,
                        **_preset_base(algorithm, density, size, seed))


def preset_density(density: str = "sparse", algorithm: str = "bone_dynamic",
                   size: int = 30, seed: int = 7) -> ScenarioSpec:
    """Rock sign dragged along a curve; run at different densities to compare
    collision counts on the identical hand trajectory."""
    scale = PRESET_HAND_SCALE
    steps = (
        ScriptStep(t=0.0, sign="rock", x=0.0, y=0.0, yaw=0.0, scale=scale),
        ScriptStep(t=1.0, sign="rock", x=0.0, y=0.0, yaw=0.0, scale=scale),
        ScriptStep(t=4.0, sign="rock", x=250.0, y=120.0, yaw=0.8, scale=scale),
        ScriptStep(t=6.0, sign="rock", x=250.0, y=120.0, yaw=0.8, scale=scale),
    )
    return ScenarioSpec(hand_source=ScriptSource(steps=steps), duration_s=6.0,
                        **_preset_base(algorithm, density, size, seed))


def preset_stationary(sign: str = "paper", algorithm: str = "bone_dynamic",
                      density: str = "sparse", size: int = 30, seed: int = 7,
                      duration_s: float = 4.0) -> ScenarioSpec:
    """A hand holding still: the swarm forms the sign and settles."""
    if sign not in SIGNS:
        raise ScenarioError(f"unknown hand sign {sign!r}")
    steps = (ScriptStep(t=0.0, sign=sign, x=0.0, y=0.0, yaw=0.0,
                        scale=PRESET_HAND_SCALE),)
    return ScenarioSpec(hand_source=ScriptSource(steps=steps), duration_s=duration_s,
                        **_preset_base(algorithm, density, size, seed))


def preset_live(algorithm: str = "bone_dynamic", density: str = "sparse",
                size: int = 30, seed: int = 7) -> ScenarioSpec:
    """Interactive session scaffold: the hand is driven by bridge messages."""
    return ScenarioSpec(hand_source=LiveSource(scale=PRESET_HAND_SCALE),
                        duration_s=60.0,
                        **_preset_base(algorithm, density, size, seed))


PRESETS = {
    "reaching": preset_reaching,
    "flip": preset_flip,
    "density": preset_density,
    "stationary": preset_stationary,
    "live": preset_live,
}
