"""Hand skeleton model, sign synthesis, planar projection, and trajectory I/O.

The canonical skeleton is a right hand, palm facing down, wrist at the local
origin, fingers pointing along +x and the thumb on the +y side.  All lengths
are millimetres.  Signs are joint-angle presets; palm-up signs are built by
mirroring the palm-down geometry about the wrist axis so mirrored pairs match
exactly point for point.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Mapping, Sequence

import numpy as np
from shapely import contains_xy
from shapely.geometry import LineString, Polygon
from shapely.ops import unary_union


class Bone(IntEnum):
    WRIST = 0
    PALM = 1
    PALM_RADIAL = 2
    PALM_ULNAR = 3
    THUMB_CMC = 4
    THUMB_MCP = 5
    THUMB_IP = 6
    THUMB_TIP = 7
    INDEX_MCP = 8
    INDEX_PIP = 9
    INDEX_DIP = 10
    INDEX_TIP = 11
    MIDDLE_MCP = 12
    MIDDLE_PIP = 13
    MIDDLE_DIP = 14
    MIDDLE_TIP = 15
    RING_MCP = 16
    RING_PIP = 17
    RING_DIP = 18
    RING_TIP = 19
    PINKY_MCP = 20
    PINKY_PIP = 21
    PINKY_DIP = 22
    PINKY_TIP = 23


BONE_COUNT = 24

FINGERTIPS = (Bone.THUMB_TIP, Bone.INDEX_TIP, Bone.MIDDLE_TIP,
              Bone.RING_TIP, Bone.PINKY_TIP)

# Rest height of the palm plane above the table.
PALM_Z_MM = 30.0

# Mesh sampling: outline vertex count and interior grid pitch.
OUTLINE_POINTS = 96
MESH_GRID_MM = 5.0


@dataclass(frozen=True)
class _FingerSpec:
    base: tuple[float, float]
    splay_deg: float
    lengths: tuple[float, float, float]
    mesh_radius: float


# Adult-average proportions.
_FINGERS: dict[str, _FingerSpec] = {
    "index": _FingerSpec((92.0, 33.0), 10.0, (45.0, 26.0, 23.0), 8.5),
    "middle": _FingerSpec((96.0, 11.0), 2.0, (50.0, 30.0, 25.0), 9.0),
    "ring": _FingerSpec((92.0, -11.0), -6.0, (46.0, 28.0, 24.0), 8.5),
    "pinky": _FingerSpec((84.0, -31.0), -14.0, (36.0, 22.0, 20.0), 7.5),
}

_FINGER_BONES: dict[str, tuple[Bone, Bone, Bone, Bone]] = {
    "index": (Bone.INDEX_MCP, Bone.INDEX_PIP, Bone.INDEX_DIP, Bone.INDEX_TIP),
    "middle": (Bone.MIDDLE_MCP, Bone.MIDDLE_PIP, Bone.MIDDLE_DIP, Bone.MIDDLE_TIP),
    "ring": (Bone.RING_MCP, Bone.RING_PIP, Bone.RING_DIP, Bone.RING_TIP),
    "pinky": (Bone.PINKY_MCP, Bone.PINKY_PIP, Bone.PINKY_DIP, Bone.PINKY_TIP),
}

_THUMB_BASE = (22.0, 30.0)
_THUMB_DIR_DEG = 60.0
_THUMB_LENGTHS = (46.0, 32.0, 27.0)
_THUMB_RADIUS = 10.5

_PALM_POINTS = {
    Bone.WRIST: (0.0, 0.0),
    Bone.PALM: (55.0, 2.0),
    Bone.PALM_RADIAL: (52.0, 30.0),
    Bone.PALM_ULNAR: (50.0, -28.0),
}

# Palm slab for the silhouette, buffered below.
_PALM_OUTLINE = [(-4.0, -32.0), (86.0, -36.0), (97.0, -14.0), (98.0, 14.0),
                 (94.0, 36.0), (28.0, 38.0), (-4.0, 32.0)]
_PALM_BUFFER = 6.0


@dataclass(frozen=True)
class HandSign:
    """Joint-angle preset for one hand sign.

    finger_flex maps finger name to (MCP, PIP, DIP) flexion in degrees; zero
    is fully extended.  splay_delta adjusts the in-plane finger direction.
    thumb_flex rotates the three thumb segments in the palm plane toward the
    fingers.  palm_up mirrors the whole hand about the wrist axis.
    """

    name: str
    finger_flex: Mapping[str, tuple[float, float, float]]
    splay_delta: Mapping[str, float]
    thumb_flex: tuple[float, float, float]
    palm_up: bool = False


_EXTENDED = (0.0, 0.0, 0.0)
_CURLED = (40.0, 65.0, 30.0)

SIGNS: dict[str, HandSign] = {
    "paper": HandSign(
        name="paper",
        finger_flex={f: _EXTENDED for f in _FINGERS},
        splay_delta={f: 0.0 for f in _FINGERS},
        thumb_flex=(0.0, 0.0, 0.0),
    ),
    "reversed_paper": HandSign(
        name="reversed_paper",
        finger_flex={f: _EXTENDED for f in _FINGERS},
        splay_delta={f: 0.0 for f in _FINGERS},
        thumb_flex=(0.0, 0.0, 0.0),
        palm_up=True,
    ),
    "rock": HandSign(
        name="rock",
        finger_flex={f: _CURLED for f in _FINGERS},
        splay_delta={f: 0.0 for f in _FINGERS},
        # Thumb rests against the radial side instead of wrapping across the
        # curled fingers, which would stack its tip onto the finger row.
        thumb_flex=(15.0, 20.0, 15.0),
    ),
    "scissors": HandSign(
        name="scissors",
        finger_flex={
            "index": _EXTENDED,
            "middle": _EXTENDED,
            "ring": (50.0, 80.0, 40.0),
            "pinky": (45.0, 75.0, 35.0),
        },
        splay_delta={"index": 8.0, "middle": -4.0, "ring": 0.0, "pinky": 0.0},
        thumb_flex=(35.0, 45.0, 35.0),
    ),
}

SIGN_NAMES = tuple(SIGNS)


class HandError(ValueError):
    pass


class TrajectoryFormatError(HandError):
    pass


@dataclass(frozen=True)
class HandFrame:
    """One timestamped hand sample: 3-D bone points plus a surface point set.

    Arrays are read-only after construction.  `scale` multiplies the geometry
    about the wrist at projection time; frames synthesised from sign presets
    bake their scale into the geometry and carry scale == 1.
    """

    t: float
    bones: np.ndarray
    mesh: np.ndarray
    hand_id: int = 0
    scale: float = 1.0

    def __post_init__(self) -> None:
        bones = np.asarray(self.bones, dtype=float)
        mesh = np.asarray(self.mesh, dtype=float)
        if bones.shape != (BONE_COUNT, 3):
            raise HandError(f"bones must have shape ({BONE_COUNT}, 3), got {bones.shape}")
        if mesh.ndim != 2 or mesh.shape[1] != 3:
            raise HandError(f"mesh must have shape (M, 3), got {mesh.shape}")
        if not (self.scale > 0.0):
            raise HandError(f"scale must be positive, got {self.scale}")
        bones.flags.writeable = False
        mesh.flags.writeable = False
        object.__setattr__(self, "bones", bones)
        object.__setattr__(self, "mesh", mesh)


def _finger_joints(base: tuple[float, float], direction_deg: float,
                   lengths: Sequence[float], flex_deg: Sequence[float]) -> list[tuple[float, float, float]]:
    """Forward kinematics for one finger: flexion curls out of the palm plane."""
    ux = math.cos(math.radians(direction_deg))
    uy = math.sin(math.radians(direction_deg))
    joints = [(base[0], base[1], PALM_Z_MM)]
    total = 0.0
    for length, flex in zip(lengths, flex_deg):
        total += math.radians(flex)
        px, py, pz = joints[-1]
        joints.append((px + length * math.cos(total) * ux,
                       py + length * math.cos(total) * uy,
                       pz - length * math.sin(total)))
    return joints


def _thumb_joints(flex_deg: Sequence[float]) -> list[tuple[float, float, float]]:
    """Thumb chain stays in the palm plane; flexion rotates toward the fingers."""
    joints = [(_THUMB_BASE[0], _THUMB_BASE[1], PALM_Z_MM)]
    direction = _THUMB_DIR_DEG
    for length, flex in zip(_THUMB_LENGTHS, flex_deg):
        direction -= flex
        px, py, pz = joints[-1]
        joints.append((px + length * math.cos(math.radians(direction)),
                       py + length * math.sin(math.radians(direction)),
                       pz))
    return joints


def _local_bones(sign: HandSign) -> np.ndarray:
    bones = np.zeros((BONE_COUNT, 3))
    for bone, (x, y) in _PALM_POINTS.items():
        bones[bone] = (x, y, PALM_Z_MM)
    thumb = _thumb_joints(sign.thumb_flex)
    for bone, point in zip((Bone.THUMB_CMC, Bone.THUMB_MCP, Bone.THUMB_IP, Bone.THUMB_TIP), thumb):
        bones[bone] = point
    for finger, spec in _FINGERS.items():
        direction = spec.splay_deg + sign.splay_delta[finger]
        joints = _finger_joints(spec.base, direction, spec.lengths, sign.finger_flex[finger])
        for bone, point in zip(_FINGER_BONES[finger], joints):
            bones[bone] = point
    return bones


def _local_mesh(bones: np.ndarray) -> np.ndarray:
    """Silhouette point set: resampled outline plus an interior grid."""
    parts = [Polygon(_PALM_OUTLINE).buffer(_PALM_BUFFER, quad_segs=8)]
    thumb_chain = [tuple(bones[b][:2]) for b in
                   (Bone.THUMB_CMC, Bone.THUMB_MCP, Bone.THUMB_IP, Bone.THUMB_TIP)]
    parts.append(LineString(thumb_chain).buffer(_THUMB_RADIUS, quad_segs=8))
    for finger, spec in _FINGERS.items():
        chain = [tuple(bones[b][:2]) for b in _FINGER_BONES[finger]]
        parts.append(LineString(chain).buffer(spec.mesh_radius, quad_segs=8))
    hull = unary_union(parts)
    if hull.geom_type == "MultiPolygon":
        hull = max(hull.geoms, key=lambda g: g.area)
    ring = hull.exterior
    step = ring.length / OUTLINE_POINTS
    outline = [ring.interpolate(i * step) for i in range(OUTLINE_POINTS)]
    points = [(p.x, p.y) for p in outline]

    # The resampled outline is the silhouette the frame declares, so the
    # interior grid is filtered against it, not against the raw hull.
    silhouette = Polygon(points)
    minx, miny, maxx, maxy = silhouette.bounds
    xs = np.arange(math.ceil(minx / MESH_GRID_MM) * MESH_GRID_MM, maxx, MESH_GRID_MM)
    ys = np.arange(math.ceil(miny / MESH_GRID_MM) * MESH_GRID_MM, maxy, MESH_GRID_MM)
    gx, gy = np.meshgrid(xs, ys)
    gx = gx.ravel()
    gy = gy.ravel()
    keep = contains_xy(silhouette, gx, gy)
    points.extend(zip(gx[keep], gy[keep]))
    return np.asarray(points)


def synth_hand_sign(sign: str | HandSign, wrist_pose: tuple[float, float, float] = (0.0, 0.0, 0.0),
                    scale: float = 1.0, t: float = 0.0, hand_id: int = 0,
                    with_mesh: bool = True) -> HandFrame:
    """Synthesise a hand frame for a named sign at a wrist pose (x, y, yaw).

    Scale is applied uniformly about the wrist and baked into the returned
    geometry (the frame reports scale == 1).
    """
    if isinstance(sign, str):
        try:
            sign = SIGNS[sign]
        except KeyError:
            raise HandError(f"unknown hand sign {sign!r}") from None
    if not (scale > 0.0):
        raise HandError(f"scale must be positive, got {scale}")

    bones = _local_bones(sign)
    mesh2d = _local_mesh(bones) if with_mesh else np.zeros((0, 2))
    if sign.palm_up:
        bones = bones * np.array([1.0, -1.0, 1.0])
        mesh2d = mesh2d * np.array([1.0, -1.0])

    bones = bones * scale
    mesh2d = mesh2d * scale

    x, y, yaw = wrist_pose
    c, s = math.cos(yaw), math.sin(yaw)
    rotation = np.array([[c, -s], [s, c]])
    bones2d = bones[:, :2] @ rotation.T + (x, y)
    bones = np.column_stack([bones2d, bones[:, 2]])
    mesh2d = mesh2d @ rotation.T + (x, y)
    mesh = np.column_stack([mesh2d, np.full(len(mesh2d), PALM_Z_MM * scale)])
    return HandFrame(t=t, bones=bones, mesh=mesh, hand_id=hand_id, scale=1.0)


def project_to_plane(frame: HandFrame) -> tuple[np.ndarray, np.ndarray]:
    """Project a frame to the table plane: scale about the wrist, drop z."""
    wrist = frame.bones[Bone.WRIST, :2]
    bones2d = wrist + frame.scale * (frame.bones[:, :2] - wrist)
    mesh2d = wrist + frame.scale * (frame.mesh[:, :2] - wrist)
    return bones2d, mesh2d


@dataclass(frozen=True)
class HandTrajectory:
    """Timestamped hand frames, strictly increasing in t per hand."""

    frames: tuple[HandFrame, ...]
    rate_hz: float = 50.0

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        last_t: dict[int, float] = {}
        for frame in frames:
            prev = last_t.get(frame.hand_id)
            if prev is not None and frame.t <= prev:
                raise HandError(
                    f"timestamps must strictly increase per hand, got {frame.t} after {prev} "
                    f"for hand {frame.hand_id}")
            last_t[frame.hand_id] = frame.t
        object.__setattr__(self, "frames", frames)

    @property
    def hand_ids(self) -> tuple[int, ...]:
        return tuple(sorted({f.hand_id for f in self.frames}))

    def frames_for(self, hand_id: int) -> tuple[HandFrame, ...]:
        return tuple(f for f in self.frames if f.hand_id == hand_id)

    @property
    def duration(self) -> float:
        return max((f.t for f in self.frames), default=0.0)


def interpolate_frame(traj: HandTrajectory, t: float, hand_id: int = 0) -> HandFrame:
    """Linearly interpolate bones, mesh, and scale at time t for one hand."""
    frames = traj.frames_for(hand_id)
    if not frames:
        raise HandError(f"trajectory has no frames for hand {hand_id}")
    times = [f.t for f in frames]
    if t < times[0] or t > times[-1]:
        raise HandError(f"t={t} outside trajectory span [{times[0]}, {times[-1]}]")
    i = bisect.bisect_left(times, t)
    if i < len(times) and times[i] == t:
        return frames[i]
    lo, hi = frames[i - 1], frames[i]
    if lo.mesh.shape != hi.mesh.shape:
        raise HandError("cannot interpolate between frames with different mesh sizes")
    alpha = (t - lo.t) / (hi.t - lo.t)
    return HandFrame(
        t=t,
        bones=(1.0 - alpha) * lo.bones + alpha * hi.bones,
        mesh=(1.0 - alpha) * lo.mesh + alpha * hi.mesh,
        hand_id=hand_id,
        scale=(1.0 - alpha) * lo.scale + alpha * hi.scale,
    )


_HEADER_PREFIX = "# handswarm-trajectory v1"


def save_trajectory(traj: HandTrajectory, path: str) -> None:
    """Write a trajectory as line-delimited text with a declared layout.

    Header declares bone and mesh point counts; every line is
    t,hand_id,scale followed by 3 floats per bone then 3 per mesh point.
    Floats are written with repr so the file round-trips bit exactly.
    """
    mesh_counts = {f.mesh.shape[0] for f in traj.frames}
    if len(mesh_counts) > 1:
        raise TrajectoryFormatError(f"frames disagree on mesh size: {sorted(mesh_counts)}")
    mesh_n = mesh_counts.pop() if mesh_counts else 0
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{_HEADER_PREFIX} bones={BONE_COUNT} mesh={mesh_n} rate_hz={float(traj.rate_hz)!r}\n")
        for frame in traj.frames:
            fields = [repr(float(frame.t)), str(frame.hand_id), repr(float(frame.scale))]
            fields.extend(repr(float(v)) for v in frame.bones.ravel())
            fields.extend(repr(float(v)) for v in frame.mesh.ravel())
            fh.write(",".join(fields) + "\n")


def load_trajectory(path: str) -> HandTrajectory:
    """Parse a trajectory file; errors carry row and field locations."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(_HEADER_PREFIX):
            raise TrajectoryFormatError(f"{path}: line 1: bad header {header!r}")
        meta: dict[str, str] = {}
        for token in header[len(_HEADER_PREFIX):].split():
            key, _, value = token.partition("=")
            meta[key] = value
        try:
            bones_n = int(meta["bones"])
            mesh_n = int(meta["mesh"])
            rate_hz = float(meta.get("rate_hz", "50.0"))
        except (KeyError, ValueError) as exc:
            raise TrajectoryFormatError(f"{path}: line 1: bad header fields: {exc}") from None
        if bones_n != BONE_COUNT:
            raise TrajectoryFormatError(f"{path}: line 1: expected bones={BONE_COUNT}, got {bones_n}")
        expected = 3 + 3 * bones_n + 3 * mesh_n

        frames = []
        for row, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if len(fields) != expected:
                raise TrajectoryFormatError(
                    f"{path}: line {row}: expected {expected} fields, got {len(fields)}")
            try:
                t = float(fields[0])
            except ValueError:
                raise TrajectoryFormatError(f"{path}: line {row}: field 1: bad float {fields[0]!r}") from None
            try:
                hand_id = int(fields[1])
            except ValueError:
                raise TrajectoryFormatError(f"{path}: line {row}: field 2: bad int {fields[1]!r}") from None
            try:
                scale = float(fields[2])
                values = np.array([float(v) for v in fields[3:]])
            except ValueError as exc:
                raise TrajectoryFormatError(f"{path}: line {row}: bad float: {exc}") from None
            bones = values[:3 * bones_n].reshape(bones_n, 3)
            mesh = values[3 * bones_n:].reshape(mesh_n, 3)
            try:
                frames.append(HandFrame(t=t, bones=bones, mesh=mesh, hand_id=hand_id, scale=scale))
            except HandError as exc:
                raise TrajectoryFormatError(f"{path}: line {row}: {exc}") from None
    try:
        return HandTrajectory(frames=tuple(frames), rate_hz=rate_hz)
    except HandError as exc:
        raise TrajectoryFormatError(f"{path}: {exc}") from None
