"""Subgoal formation generation.

Two generators produce the per-frame subgoal set the robots fill in:

- bone anchors: predetermined positions relative to projected hand bones,
  loaded from a layout table keyed by robot size and density;
- silhouette clustering: k-means over the projected surface point set, each
  subgoal snapped to the mesh vertex nearest its cluster centroid, which
  keeps every subgoal inside the hand outline by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

import numpy as np

from .hand import Bone

DENSITIES = ("sparse", "medium", "dense")

# Robots per hand by (robot size mm, density).
ROBOT_COUNTS: dict[tuple[int, str], int] = {
    (20, "sparse"): 6,
    (20, "medium"): 18,
    (20, "dense"): 27,
    (30, "sparse"): 6,
    (30, "medium"): 8,
    (30, "dense"): 12,
}


class FormationError(ValueError):
    pass


@dataclass(frozen=True)
class Anchor:
    index: int
    bone_a: int
    bone_b: int | None
    weight_a: float
    offset: tuple[float, float]


@dataclass(frozen=True)
class AnchorLayout:
    size_mm: int
    density: str
    anchors: tuple[Anchor, ...]

    @property
    def robot_count(self) -> int:
        return len(self.anchors)


@dataclass(frozen=True)
class SubgoalFormation:
    """One frame's subgoal set with stable ids for assignment binding."""

    t: float
    points: np.ndarray
    ids: tuple[int, ...]
    generator: str
    hand_id: int = 0

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2 or len(points) == 0:
            raise FormationError(f"points must have shape (k, 2), k >= 1, got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise FormationError("subgoal points must be finite")
        if len(self.ids) != len(points) or len(set(self.ids)) != len(self.ids):
            raise FormationError("ids must be unique and match the point count")
        if self.generator not in ("bone", "silhouette"):
            raise FormationError(f"unknown generator {self.generator!r}")
        diff = points[:, None, :] - points[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, np.inf)
        if np.any(dist == 0.0):
            raise FormationError("two subgoals coincide")
        points.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "ids", tuple(self.ids))

    @property
    def count(self) -> int:
        return len(self.ids)


def _parse_bone(token: str) -> int | None:
    if token == "-":
        return None
    try:
        return int(Bone[token])
    except KeyError:
        raise FormationError(f"unknown bone name {token!r}") from None


def load_anchor_layouts(path: str | None = None) -> dict[tuple[int, str], AnchorLayout]:
    """Read the anchor layout table; validates counts against ROBOT_COUNTS."""
    if path is None:
        text = resources.files("handswarm.data").joinpath("anchor_layouts.txt").read_text()
    else:
        with open(path, "r", encoding="ascii") as fh:
            text = fh.read()

    rows: dict[tuple[int, str], list[Anchor]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 8:
            raise FormationError(f"anchor layout line {lineno}: expected 8 columns, got {len(parts)}")
        try:
            size = int(parts[0])
            density = parts[1]
            index = int(parts[2])
            bone_a = _parse_bone(parts[3])
            bone_b = _parse_bone(parts[4])
            weight_a = float(parts[5])
            offset = (float(parts[6]), float(parts[7]))
        except ValueError as exc:
            raise FormationError(f"anchor layout line {lineno}: {exc}") from None
        if bone_a is None:
            raise FormationError(f"anchor layout line {lineno}: bone_a is required")
        if density not in DENSITIES:
            raise FormationError(f"anchor layout line {lineno}: unknown density {density!r}")
        rows.setdefault((size, density), []).append(
            Anchor(index=index, bone_a=bone_a, bone_b=bone_b, weight_a=weight_a, offset=offset))

    layouts: dict[tuple[int, str], AnchorLayout] = {}
    for key, anchors in rows.items():
        anchors.sort(key=lambda a: a.index)
        indices = [a.index for a in anchors]
        if indices != list(range(len(anchors))):
            raise FormationError(f"layout {key}: anchor indices must be 0..k-1, got {indices}")
        expected = ROBOT_COUNTS.get(key)
        if expected is not None and len(anchors) != expected:
            raise FormationError(f"layout {key}: expected {expected} anchors, got {len(anchors)}")
        layouts[key] = AnchorLayout(size_mm=key[0], density=key[1], anchors=tuple(anchors))
    return layouts


_DEFAULT_LAYOUTS: dict[tuple[int, str], AnchorLayout] | None = None


def get_layout(size_mm: int, density: str) -> AnchorLayout:
    global _DEFAULT_LAYOUTS
    if _DEFAULT_LAYOUTS is None:
        _DEFAULT_LAYOUTS = load_anchor_layouts()
    try:
        return _DEFAULT_LAYOUTS[(size_mm, density)]
    except KeyError:
        raise FormationError(f"no anchor layout for size={size_mm} density={density!r}") from None


def bone_subgoals(bones2d: np.ndarray, layout: AnchorLayout, t: float = 0.0,
                  hand_id: int = 0) -> SubgoalFormation:
    """Place layout anchors on projected bones.

    Offsets are expressed in the wrist frame (x axis toward the palm centre)
    so the formation transforms rigidly with the hand.
    """
    bones2d = np.asarray(bones2d, dtype=float)
    wrist = bones2d[Bone.WRIST]
    palm_dir = bones2d[Bone.PALM] - wrist
    yaw = math.atan2(palm_dir[1], palm_dir[0])
    c, s = math.cos(yaw), math.sin(yaw)

    points = np.empty((layout.robot_count, 2))
    for anchor in layout.anchors:
        base = bones2d[anchor.bone_a] * anchor.weight_a
        if anchor.bone_b is not None:
            base = base + bones2d[anchor.bone_b] * (1.0 - anchor.weight_a)
        ox, oy = anchor.offset
        points[anchor.index] = base + (c * ox - s * oy, s * ox + c * oy)
    return SubgoalFormation(t=t, points=points, ids=tuple(range(layout.robot_count)),
                            generator="bone", hand_id=hand_id)


def kmeans_cluster(points: np.ndarray, k: int, seed: int,
                   max_iters: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Plain Lloyd's k-means with seeded farthest-point initialisation.

    Deterministic: the seed picks the first centre, the rest are farthest
    points with ties broken by lowest index, and assignment ties go to the
    lowest centre index.  Empty clusters are repaired with the point farthest
    from its assigned centre.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if not (1 <= k <= n):
        raise FormationError(f"need 1 <= k <= n, got k={k}, n={n}")

    rng = np.random.default_rng(seed)
    first = int(rng.integers(n))
    centers = [points[first]]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        idx = int(np.argmax(d2))
        centers.append(points[idx])
        d2 = np.minimum(d2, np.sum((points - centers[-1]) ** 2, axis=1))
    centers = np.array(centers)

    labels: np.ndarray | None = None
    for _iteration in range(max_iters):
        dists = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(dists, axis=1)
        repaired: list[int] = []
        for cluster in range(k):
            if not np.any(new_labels == cluster):
                assigned = dists[np.arange(n), new_labels].copy()
                assigned[repaired] = -np.inf
                far = int(np.argmax(assigned))
                new_labels[far] = cluster
                repaired.append(far)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for cluster in range(k):
            centers[cluster] = points[labels == cluster].mean(axis=0)
    return labels, centers


def silhouette_subgoals(mesh2d: np.ndarray, k: int, seed: int, t: float = 0.0,
                        hand_id: int = 0, max_iters: int = 100) -> SubgoalFormation:
    """Cluster the surface point set and snap each centroid to a mesh vertex.

    Snapping guarantees every subgoal lies inside the hand outline because it
    IS one of the sampled surface points.  If two centroids share a nearest
    vertex the later cluster takes the next nearest free vertex.
    """
    mesh2d = np.asarray(mesh2d, dtype=float)
    if len(mesh2d) < k:
        raise FormationError(f"mesh has {len(mesh2d)} points, need at least k={k}")
    _, centers = kmeans_cluster(mesh2d, k, seed, max_iters=max_iters)

    taken: set[int] = set()
    points = np.empty((k, 2))
    for cluster in range(k):
        order = np.argsort(np.sum((mesh2d - centers[cluster]) ** 2, axis=1), kind="stable")
        for idx in order:
            if int(idx) not in taken:
                taken.add(int(idx))
                points[cluster] = mesh2d[idx]
                break
    return SubgoalFormation(t=t, points=points, ids=tuple(range(k)),
                            generator="silhouette", hand_id=hand_id)
