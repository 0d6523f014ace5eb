"""Formation generation: anchor layouts, bone subgoals, k-means, silhouette."""

import math

import numpy as np
import pytest

from handswarm.formation import (
    DENSITIES,
    FormationError,
    ROBOT_COUNTS,
    SubgoalFormation,
    Anchor,
    AnchorLayout,
    bone_subgoals,
    get_layout,
    kmeans_cluster,
    load_anchor_layouts,
    silhouette_subgoals,
)
from handswarm.hand import SIGNS, project_to_plane, synth_hand_sign


def test_layout_counts_match_size_density_table():
    layouts = load_anchor_layouts()
    for key, count in ROBOT_COUNTS.items():
        assert key in layouts
        assert layouts[key].robot_count == count


def test_layout_table_values():
    # table from the design brief: (size, sparse/medium/dense) robot counts
    assert ROBOT_COUNTS[(20, "sparse")] == 6
    assert ROBOT_COUNTS[(20, "medium")] == 18
    assert ROBOT_COUNTS[(20, "dense")] == 27
    assert ROBOT_COUNTS[(30, "sparse")] == 6
    assert ROBOT_COUNTS[(30, "medium")] == 8
    assert ROBOT_COUNTS[(30, "dense")] == 12


def test_bone_subgoals_count_and_distinct_for_all_signs():
    for size in (20, 30):
        for density in DENSITIES:
            layout = get_layout(size, density)
            for name in SIGNS:
                bones2d, _ = project_to_plane(synth_hand_sign(name))
                formation = bone_subgoals(bones2d, layout)
                assert formation.count == ROBOT_COUNTS[(size, density)]
                pts = formation.points
                dists = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
                np.fill_diagonal(dists, np.inf)
                assert dists.min() > 1.0, f"{size}/{density}/{name}: anchors nearly coincide"


def test_bone_subgoals_rigid_equivariance():
    layout = AnchorLayout(size_mm=30, density="sparse", anchors=(
        Anchor(0, 11, None, 1.0, (0.0, 0.0)),
        Anchor(1, 1, 0, 0.25, (12.0, -7.0)),
        Anchor(2, 7, 23, 0.5, (0.0, 9.0)),
        Anchor(3, 0, None, 1.0, (5.0, 5.0)),
        Anchor(4, 15, None, 1.0, (-4.0, 0.0)),
        Anchor(5, 1, None, 1.0, (0.0, 0.0)),
    ))
    bones2d, _ = project_to_plane(synth_hand_sign("scissors"))
    base = bone_subgoals(bones2d, layout).points

    angle = 1.234
    shift = np.array([310.0, -75.0])
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    moved = bone_subgoals(bones2d @ rot.T + shift, layout).points
    assert np.allclose(moved, base @ rot.T + shift, atol=1e-6)


def test_bone_subgoals_scale_follows_projection():
    layout = get_layout(30, "sparse")
    frame = synth_hand_sign("paper", wrist_pose=(40.0, 10.0, 0.3))
    bones2d, _ = project_to_plane(frame)
    big = synth_hand_sign("paper", wrist_pose=(40.0, 10.0, 0.3), scale=2.0)
    bones_big, _ = project_to_plane(big)
    wrist = bones2d[0]
    small_pts = bone_subgoals(bones2d, layout).points
    big_pts = bone_subgoals(bones_big, layout).points
    assert np.allclose(big_pts - wrist, 2.0 * (small_pts - wrist), atol=1e-9)


# --- k-means oracles ---------------------------------------------------------


def test_kmeans_fixed_point_properties():
    rng = np.random.default_rng(42)
    points = rng.uniform(-100, 100, size=(200, 2))
    labels, centers = kmeans_cluster(points, 7, seed=3)
    # each point belongs to its nearest centre
    dists = np.linalg.norm(points[:, None] - centers[None, :], axis=2)
    assert np.array_equal(labels, np.argmin(dists, axis=1))
    # each centre is the mean of its members
    for cluster in range(7):
        members = points[labels == cluster]
        assert len(members) > 0
        assert np.allclose(centers[cluster], members.mean(axis=0), atol=1e-9)


def test_kmeans_recovers_separated_blobs():
    rng = np.random.default_rng(0)
    means = np.array([[0.0, 0.0], [500.0, 0.0], [250.0, 400.0]])
    points = np.vstack([rng.normal(m, 8.0, size=(60, 2)) for m in means])
    _, centers = kmeans_cluster(points, 3, seed=11)
    for m in means:
        assert np.min(np.linalg.norm(centers - m, axis=1)) < 10.0


def test_kmeans_k_equals_n_and_k_equals_1():
    points = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    labels, centers = kmeans_cluster(points, 3, seed=0)
    assert sorted(map(tuple, centers)) == sorted(map(tuple, points))
    assert len(set(labels)) == 3

    labels1, centers1 = kmeans_cluster(points, 1, seed=0)
    assert np.allclose(centers1[0], points.mean(axis=0))
    assert set(labels1) == {0}


def test_kmeans_is_deterministic():
    rng = np.random.default_rng(9)
    points = rng.uniform(0, 50, size=(120, 2))
    a = kmeans_cluster(points, 6, seed=21)
    b = kmeans_cluster(points, 6, seed=21)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


def test_kmeans_rejects_bad_k():
    points = np.zeros((5, 2))
    with pytest.raises(FormationError):
        kmeans_cluster(points, 0, seed=0)
    with pytest.raises(FormationError):
        kmeans_cluster(points, 6, seed=0)


# --- silhouette subgoals -----------------------------------------------------


def test_silhouette_subgoals_are_mesh_vertices():
    for name in SIGNS:
        _, mesh2d = project_to_plane(synth_hand_sign(name))
        vertex_set = {(x, y) for x, y in mesh2d}
        for k in (6, 12):
            formation = silhouette_subgoals(mesh2d, k, seed=5)
            assert formation.count == k
            for x, y in formation.points:
                assert (x, y) in vertex_set


def test_silhouette_subgoals_distinct_and_deterministic():
    _, mesh2d = project_to_plane(synth_hand_sign("rock"))
    a = silhouette_subgoals(mesh2d, 12, seed=7)
    b = silhouette_subgoals(mesh2d, 12, seed=7)
    assert np.array_equal(a.points, b.points)
    pts = a.points
    dists = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
    np.fill_diagonal(dists, np.inf)
    assert dists.min() > 0.0


def test_silhouette_requires_enough_points():
    with pytest.raises(FormationError):
        silhouette_subgoals(np.zeros((3, 2)) + np.arange(3)[:, None], 4, seed=0)


def test_formation_validation():
    with pytest.raises(FormationError):
        SubgoalFormation(t=0.0, points=np.array([[0.0, 0.0], [0.0, 0.0]]),
                         ids=(0, 1), generator="bone")
    with pytest.raises(FormationError):
        SubgoalFormation(t=0.0, points=np.array([[0.0, 0.0], [1.0, 0.0]]),
                         ids=(0, 0), generator="bone")
    with pytest.raises(FormationError):
        SubgoalFormation(t=0.0, points=np.array([[0.0, 0.0]]), ids=(0,), generator="magic")
