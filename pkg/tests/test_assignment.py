"""Assignment: Hungarian optimality against brute force, ties, static binding."""

import itertools

import numpy as np
import pytest

from handswarm.assignment import (
    Assignment,
    AssignmentError,
    ModeCompatibilityError,
    StaticBinding,
    assign_dynamic,
    assign_static,
    cost_matrix,
    make_static_binding,
    solve_lsap,
)
from handswarm.formation import SubgoalFormation, get_layout, bone_subgoals
from handswarm.hand import project_to_plane, synth_hand_sign


def brute_force_min(cost):
    """Independent oracle: exhaustive minimum over all permutations, summed
    with the same expression the solver uses."""
    n = cost.shape[0]
    best_cost = np.inf
    best_perm = None
    for perm in itertools.permutations(range(n)):
        total = float(cost[np.arange(n), list(perm)].sum())
        if total < best_cost:
            best_cost = total
            best_perm = perm
    return best_perm, best_cost


def test_matches_brute_force_on_random_matrices():
    rng = np.random.default_rng(1234)
    for n in range(2, 7):
        for _ in range(40):
            cost = rng.uniform(0.0, 100.0, size=(n, n))
            got = solve_lsap(cost)
            _, want_cost = brute_force_min(cost)
            assert got.total_cost == want_cost


def test_matches_scipy_on_larger_matrices():
    # second independent route on sizes brute force cannot reach
    scipy_opt = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(77)
    for _ in range(20):
        cost = rng.uniform(-50.0, 50.0, size=(40, 40))
        got = solve_lsap(cost)
        rows, cols = scipy_opt.linear_sum_assignment(cost)
        want = float(cost[rows, cols].sum())
        assert got.total_cost == pytest.approx(want, abs=1e-9)


def test_identity_on_diagonal_friendly_matrix():
    cost = np.array([[0.0, 9.0], [9.0, 0.0]])
    assert solve_lsap(cost).perm == (0, 1)


def test_tie_break_is_lexicographically_smallest():
    # all-zero matrix: every permutation optimal, identity is lex smallest
    assert solve_lsap(np.zeros((4, 4))).perm == (0, 1, 2, 3)

    # two optima {(0,2,1), (1,0,2)}; lex smallest is (0,2,1)
    cost = np.array([[0.0, 0.0, 1.0],
                     [0.0, 9.0, 0.0],
                     [9.0, 0.0, 0.0]])
    got = solve_lsap(cost)
    assert got.perm == (0, 2, 1)
    assert got.total_cost == 0.0


def test_deterministic_for_equal_inputs():
    rng = np.random.default_rng(5)
    cost = rng.uniform(0, 10, size=(9, 9))
    a = solve_lsap(cost.copy())
    b = solve_lsap(cost.copy())
    assert a == b


def test_rejects_bad_matrices():
    with pytest.raises(AssignmentError):
        solve_lsap(np.zeros((2, 3)))
    with pytest.raises(AssignmentError):
        solve_lsap(np.array([[np.nan, 1.0], [1.0, 0.0]]))
    with pytest.raises(AssignmentError):
        solve_lsap(np.zeros((0, 0)))
    with pytest.raises(AssignmentError):
        Assignment(perm=(0, 0), total_cost=0.0, mode="dynamic")
    with pytest.raises(AssignmentError):
        Assignment(perm=(0, 1), total_cost=0.0, mode="sideways")


def _formation(points, generator="bone"):
    return SubgoalFormation(t=0.0, points=np.asarray(points, dtype=float),
                            ids=tuple(range(len(points))), generator=generator)


def test_squared_metric_uncrosses_swapped_robots():
    robots = np.array([[0.0, 0.0], [10.0, 0.0]])
    formation = _formation([[10.0, 0.0], [0.0, 0.0]])
    got = assign_dynamic(robots, formation)
    assert got.perm == (1, 0)
    identity_cost = float(cost_matrix(robots, formation)[np.arange(2), [0, 1]].sum())
    assert got.total_cost < identity_cost


def test_cost_matrix_values_and_validation():
    robots = np.array([[0.0, 0.0], [3.0, 4.0]])
    formation = _formation([[0.0, 0.0], [3.0, 4.0]])
    sq = cost_matrix(robots, formation, metric="squared")
    assert sq[0, 1] == pytest.approx(25.0)
    eu = cost_matrix(robots, formation, metric="euclidean")
    assert eu[0, 1] == pytest.approx(5.0)
    with pytest.raises(AssignmentError):
        cost_matrix(robots[:1], formation)
    with pytest.raises(AssignmentError):
        cost_matrix(robots, formation, metric="manhattan")


def test_static_binding_follows_subgoal_ids():
    pts0 = np.array([[0.0, 0.0], [40.0, 0.0], [80.0, 0.0]])
    f0 = SubgoalFormation(t=0.0, points=pts0, ids=(7, 8, 9), generator="bone")
    robots = pts0 + [1.0, 0.0]
    binding = make_static_binding(robots, f0)
    assert binding.subgoal_id_by_robot == (7, 8, 9)

    # same ids presented in a different column order and moved
    pts1 = np.array([[85.0, 5.0], [3.0, 5.0], [42.0, 5.0]])
    f1 = SubgoalFormation(t=1.0, points=pts1, ids=(9, 7, 8), generator="bone")
    rebound = assign_static(binding, robots, f1)
    assert rebound.mode == "static"
    assert rebound.perm == (1, 2, 0)  # robot i still chases subgoal id 7+i


def test_static_rejects_silhouette():
    pts = np.array([[0.0, 0.0], [10.0, 0.0]])
    f_sil = _formation(pts, generator="silhouette")
    robots = pts.copy()
    with pytest.raises(ModeCompatibilityError):
        make_static_binding(robots, f_sil)
    binding = StaticBinding(subgoal_id_by_robot=(0, 1))
    with pytest.raises(ModeCompatibilityError):
        assign_static(binding, robots, f_sil)


def test_static_missing_id_raises():
    binding = StaticBinding(subgoal_id_by_robot=(0, 5))
    robots = np.zeros((2, 2)) + np.arange(2)[:, None]
    formation = _formation([[0.0, 0.0], [5.0, 5.0]])
    with pytest.raises(AssignmentError):
        assign_static(binding, robots, formation)


def test_dynamic_cost_never_exceeds_static_on_same_frame():
    # property: the fresh optimum is a lower bound for any fixed binding
    rng = np.random.default_rng(31)
    layout = get_layout(30, "sparse")
    bones0, _ = project_to_plane(synth_hand_sign("paper"))
    f0 = bone_subgoals(bones0, layout)
    robots = rng.uniform(-50, 250, size=(f0.count, 2))
    binding = make_static_binding(robots, f0)
    for sign in ("paper", "reversed_paper", "rock", "scissors"):
        bones, _ = project_to_plane(synth_hand_sign(sign))
        f = bone_subgoals(bones, layout)
        static = assign_static(binding, robots, f)
        dynamic = assign_dynamic(robots, f)
        assert dynamic.total_cost <= static.total_cost + 1e-9
