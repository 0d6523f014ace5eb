"""Robot-to-subgoal assignment.

Dynamic mode re-solves the linear sum assignment problem every frame so the
formation re-forms with minimal total squared travel; static mode fixes the
binding computed on the first frame and only re-keys it by subgoal id.  The
solver is an O(n^3) shortest-augmenting-path Hungarian with dual potentials.
Ties between equal-cost optima are broken toward the lexicographically
smallest row-to-column permutation so equal inputs always give equal outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formation import SubgoalFormation


class AssignmentError(ValueError):
    pass


class ModeCompatibilityError(AssignmentError):
    """Static binding requires stable subgoal identity, which silhouette
    clustering does not provide."""


@dataclass(frozen=True)
class Assignment:
    """perm[i] is the subgoal column assigned to robot row i."""

    perm: tuple[int, ...]
    total_cost: float
    mode: str

    def __post_init__(self) -> None:
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise AssignmentError(f"perm must be a permutation of 0..{n - 1}, got {self.perm}")
        if self.mode not in ("static", "dynamic"):
            raise AssignmentError(f"unknown mode {self.mode!r}")


def _validate_cost(cost: np.ndarray) -> np.ndarray:
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1] or cost.shape[0] == 0:
        raise AssignmentError(f"cost matrix must be square and non-empty, got {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise AssignmentError("cost matrix must be finite")
    return cost


def _hungarian(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shortest augmenting path Hungarian; returns (perm, u, v) with dual
    potentials satisfying cost[i, j] - u[i] - v[j] >= 0 (up to roundoff) and
    equality on matched edges."""
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=int)  # p[j] = row matched to column j, 1-based
    way = np.zeros(n + 1, dtype=int)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            cur = cost[i0 - 1, :] - u[i0] - v[1:]
            better = ~used[1:] & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0

            masked = np.where(used[1:], np.inf, minv[1:])
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[1:][~used[1:]] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    perm = np.empty(n, dtype=int)
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    return perm, u[1:], v[1:]


def _matching_exists(adj: np.ndarray, fixed: dict[int, int], n: int) -> bool:
    """Can the rows not in `fixed` be perfectly matched to the columns that
    `fixed` leaves free?  Kuhn's augmenting-path matching."""
    taken_cols = set(fixed.values())
    match_col: dict[int, int] = {}

    def try_row(row: int, seen: set[int]) -> bool:
        for col in range(n):
            if adj[row, col] and col not in taken_cols and col not in seen:
                seen.add(col)
                owner = match_col.get(col)
                if owner is None or try_row(owner, seen):
                    match_col[col] = row
                    return True
        return False

    for row in range(n):
        if row not in fixed and not try_row(row, set()):
            return False
    return True


def _lexicographic_tight_matching(cost: np.ndarray, u: np.ndarray, v: np.ndarray,
                                  perm: np.ndarray) -> np.ndarray:
    """Pick the lexicographically smallest perm among optimal assignments.

    By complementary slackness every optimal assignment uses only edges that
    are tight against the optimal duals, so a greedy smallest-column choice
    with a feasibility check over the tight-edge graph is exact.
    """
    n = cost.shape[0]
    scale = max(1.0, float(np.max(np.abs(cost))))
    reduced = cost - u[:, None] - v[None, :]
    tight = reduced <= 1e-9 * scale
    tight[np.arange(n), perm] = True  # matched edges are tight by construction

    if np.all(tight.sum(axis=1) == 1):
        return perm  # unique optimum, nothing to break

    fixed: dict[int, int] = {}
    taken: set[int] = set()
    for row in range(n):
        for col in np.flatnonzero(tight[row]):
            if int(col) in taken:
                continue
            candidate = {**fixed, row: int(col)}
            if _matching_exists(tight, candidate, n):
                fixed[row] = int(col)
                taken.add(int(col))
                break
        else:
            # numerically degenerate tight graph: fall back to the solver perm
            return perm
    out = np.empty(n, dtype=int)
    for row, col in fixed.items():
        out[row] = col
    return out


def solve_lsap(cost: np.ndarray) -> Assignment:
    """Optimal linear sum assignment of rows (robots) to columns (subgoals)."""
    cost = _validate_cost(cost)
    perm, u, v = _hungarian(cost)
    perm = _lexicographic_tight_matching(cost, u, v, perm)
    total = float(cost[np.arange(len(perm)), perm].sum())
    return Assignment(perm=tuple(int(j) for j in perm), total_cost=total, mode="dynamic")


def cost_matrix(robot_positions: np.ndarray, formation: SubgoalFormation,
                metric: str = "squared") -> np.ndarray:
    """Travel cost from each robot to each subgoal; squared Euclidean favours
    minimal total displacement and avoids crossing paths."""
    robots = np.asarray(robot_positions, dtype=float)
    if robots.ndim != 2 or robots.shape[1] != 2:
        raise AssignmentError(f"robot positions must have shape (n, 2), got {robots.shape}")
    if len(robots) != formation.count:
        raise AssignmentError(
            f"robot count {len(robots)} != subgoal count {formation.count}")
    diff = robots[:, None, :] - formation.points[None, :, :]
    d2 = np.sum(diff * diff, axis=2)
    if metric == "squared":
        return d2
    if metric == "euclidean":
        return np.sqrt(d2)
    raise AssignmentError(f"unknown metric {metric!r}")


def assign_dynamic(robot_positions: np.ndarray, formation: SubgoalFormation,
                   metric: str = "squared") -> Assignment:
    """Fresh optimal assignment for the current frame."""
    return solve_lsap(cost_matrix(robot_positions, formation, metric))


@dataclass(frozen=True)
class StaticBinding:
    """Robot-to-subgoal-id binding fixed at the first frame."""

    subgoal_id_by_robot: tuple[int, ...]


def make_static_binding(robot_positions: np.ndarray,
                        formation: SubgoalFormation) -> StaticBinding:
    """Bind robots to subgoal ids using the optimal assignment at t = 0."""
    if formation.generator != "bone":
        raise ModeCompatibilityError(
            "static binding requires bone subgoals; silhouette clusters have no stable identity")
    initial = assign_dynamic(robot_positions, formation)
    ids = tuple(formation.ids[j] for j in initial.perm)
    return StaticBinding(subgoal_id_by_robot=ids)


def assign_static(binding: StaticBinding, robot_positions: np.ndarray,
                  formation: SubgoalFormation, metric: str = "squared") -> Assignment:
    """Re-key the fixed binding to the current frame's subgoal ids."""
    if formation.generator != "bone":
        raise ModeCompatibilityError(
            "static binding requires bone subgoals; silhouette clusters have no stable identity")
    col_by_id = {sid: col for col, sid in enumerate(formation.ids)}
    try:
        perm = tuple(col_by_id[sid] for sid in binding.subgoal_id_by_robot)
    except KeyError as exc:
        raise AssignmentError(f"subgoal id {exc} missing from formation") from None
    cost = cost_matrix(robot_positions, formation, metric)
    total = float(cost[np.arange(len(perm)), list(perm)].sum())
    return Assignment(perm=perm, total_cost=total, mode="static")
