"""Reciprocal avoidance: half-plane guarantees, rollouts, drive kinematics."""

import math

import pytest

from handswarm.rvo import (
    AgentInput,
    Crowd,
    CrowdAgent,
    Obstacle,
    PlannerConfig,
    center_velocity,
    compute_velocity,
    effective_center,
    integrate_unicycle,
    step_all,
    wheel_speeds_for_velocity,
)

CFG = PlannerConfig()


def dist(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def test_unconstrained_returns_pref_exactly():
    agent = AgentInput(position=(0.0, 0.0), velocity=(0.0, 0.0), radius=15.0,
                       pref_velocity=(120.0, -35.0))
    assert compute_velocity(agent, [], [], CFG) == (120.0, -35.0)


def test_speed_cap():
    agent = AgentInput(position=(0.0, 0.0), velocity=(0.0, 0.0), radius=15.0,
                       pref_velocity=(2 * CFG.max_speed, 0.0))
    v = compute_velocity(agent, [], [], CFG)
    assert math.hypot(*v) == pytest.approx(CFG.max_speed, rel=1e-12)


def test_returned_speed_never_exceeds_cap():
    import random
    rng = random.Random(4)
    for _ in range(200):
        agents = [
            AgentInput(position=(rng.uniform(-80, 80), rng.uniform(-80, 80)),
                       velocity=(rng.uniform(-400, 400), rng.uniform(-400, 400)),
                       radius=15.0,
                       pref_velocity=(rng.uniform(-900, 900), rng.uniform(-900, 900)))
            for _ in range(4)
        ]
        for v in step_all(agents, [], CFG):
            assert math.hypot(*v) <= CFG.max_speed + 1e-9


def test_pairwise_half_planes_prevent_collision_within_horizon():
    """Oracle: advance both agents linearly with their returned velocities;
    reciprocal half-planes must keep them separated for the whole horizon.

    Current velocities are zero, which keeps the single-pair program feasible
    (the guarantee is void once the least-penetration fallback engages), and
    the pair must sit inside the neighbour cull radius to be seen at all."""
    import random
    rng = random.Random(11)
    for trial in range(200):
        while True:
            pa = (rng.uniform(-100, 100), rng.uniform(-100, 100))
            pb = (rng.uniform(-100, 100), rng.uniform(-100, 100))
            if 31.0 < dist(pa, pb) < CFG.neighbor_dist:
                break
        agents = [
            AgentInput(position=pa, velocity=(0.0, 0.0), radius=15.0,
                       pref_velocity=(rng.uniform(-400, 400), rng.uniform(-400, 400))),
            AgentInput(position=pb, velocity=(0.0, 0.0), radius=15.0,
                       pref_velocity=(rng.uniform(-400, 400), rng.uniform(-400, 400))),
        ]
        va, vb = step_all(agents, [], CFG)
        for step in range(101):
            t = CFG.time_horizon * step / 100.0
            ax = pa[0] + va[0] * t
            ay = pa[1] + va[1] * t
            bx = pb[0] + vb[0] * t
            by = pb[1] + vb[1] * t
            gap = math.hypot(ax - bx, ay - by)
            assert gap >= 30.0 - 1e-6, f"trial {trial}: gap {gap} at t={t}"


def test_step_all_is_permutation_invariant():
    import random
    rng = random.Random(7)
    agents = [
        AgentInput(position=(rng.uniform(-60, 60), rng.uniform(-60, 60)),
                   velocity=(rng.uniform(-100, 100), rng.uniform(-100, 100)),
                   radius=15.0,
                   pref_velocity=(rng.uniform(-300, 300), rng.uniform(-300, 300)))
        for _ in range(6)
    ]
    base = step_all(agents, [], CFG)
    order = [3, 0, 5, 1, 4, 2]
    shuffled = step_all([agents[i] for i in order], [], CFG)
    for new_idx, old_idx in enumerate(order):
        assert shuffled[new_idx] == base[old_idx]


def test_obstacle_edge_limits_approach_speed():
    wall = Obstacle(vertices=((50.0, -100.0), (60.0, -100.0), (60.0, 100.0), (50.0, 100.0)))
    agent = AgentInput(position=(0.0, 0.0), velocity=(0.0, 0.0), radius=15.0,
                       pref_velocity=(400.0, 0.0))
    v = compute_velocity(agent, [], [wall], CFG)
    # clearance is 50 - 15 = 35 mm; approach speed is capped at d / tau_obst
    assert v[0] <= 35.0 / CFG.time_horizon_obst + 1e-9
    assert abs(v[1]) < 60.0


def test_rollout_never_enters_obstacle():
    wall = Obstacle(vertices=((80.0, -40.0), (100.0, -40.0), (100.0, 40.0), (80.0, -40.0 + 80.0)))
    agent = CrowdAgent(pose=(0.0, 0.0, 0.0), radius=15.0, goal=(180.0, 0.0), wheel_base=18.0)
    crowd = Crowd([agent], CFG, obstacles=[wall])
    for _ in range(600):
        crowd.step()
        px, py = crowd.positions()[0]
        for (ax, ay), (bx, by) in wall.edges():
            abx, aby = bx - ax, by - ay
            t = max(0.0, min(1.0, ((px - ax) * abx + (py - ay) * aby) /
                             (abx * abx + aby * aby)))
            gap = math.hypot(px - (ax + t * abx), py - (ay + t * aby))
            assert gap >= 15.0 - 1e-3


def test_head_on_pair_swaps_without_contact():
    a = CrowdAgent(pose=(-200.0, 0.0, 0.0), radius=15.0, goal=(200.0, 0.0), wheel_base=18.0)
    b = CrowdAgent(pose=(200.0, 0.0, math.pi), radius=15.0, goal=(-200.0, 0.0), wheel_base=18.0)
    crowd = Crowd([a, b], CFG)
    min_gap = math.inf
    reached_at = None
    for step in range(1, 1501):
        crowd.step()
        pa, pb = crowd.positions()
        min_gap = min(min_gap, dist(pa, pb))
        if dist(pa, a.goal) < 10.0 and dist(pb, b.goal) < 10.0:
            reached_at = step
            break
    assert reached_at is not None, "agents never swapped sides"
    assert min_gap >= 30.0, f"contact during swap: min gap {min_gap}"


def test_circle_ring_stays_safe():
    """Antipodal ring of fat discs: the centre cannot fit all eight agents at
    once, so the crowd packs into a slow standoff.  The contract here is
    safety, not throughput: separation never drops below the physical
    diameter at any step."""
    n = 8
    agents = []
    for i in range(n):
        angle = 2.0 * math.pi * i / n
        x, y = 200.0 * math.cos(angle), 200.0 * math.sin(angle)
        agents.append(CrowdAgent(pose=(x, y, math.atan2(-y, -x)), radius=15.0,
                                 goal=(-x, -y), wheel_base=18.0))
    crowd = Crowd(agents, CFG)
    min_gap = math.inf
    for _ in range(1500):
        crowd.step()
        ps = crowd.positions()
        for i in range(n):
            for j in range(i + 1, n):
                min_gap = min(min_gap, dist(ps[i], ps[j]))
    assert min_gap >= 30.0, f"contact in ring: min gap {min_gap}"


def test_perpendicular_crossing_resolves():
    a = CrowdAgent(pose=(-150.0, 0.0, 0.0), radius=15.0, goal=(150.0, 0.0), wheel_base=18.0)
    b = CrowdAgent(pose=(0.0, -150.0, math.pi / 2.0), radius=15.0, goal=(0.0, 150.0),
                   wheel_base=18.0)
    crowd = Crowd([a, b], CFG)
    min_gap = math.inf
    reached_at = None
    for step in range(1, 801):
        crowd.step()
        pa, pb = crowd.positions()
        min_gap = min(min_gap, dist(pa, pb))
        if dist(pa, a.goal) < 5.0 and dist(pb, b.goal) < 5.0:
            reached_at = step
            break
    assert reached_at is not None and reached_at < 500
    assert min_gap >= 30.0


def test_crowd_at_goal_stays_put():
    agent = CrowdAgent(pose=(10.0, -20.0, 0.4), radius=15.0, goal=(10.0, -20.0),
                       wheel_base=18.0)
    crowd = Crowd([agent], CFG)
    for _ in range(50):
        crowd.step()
    assert dist(crowd.positions()[0], (10.0, -20.0)) < 0.5


# --- kinematics ---------------------------------------------------------------


def test_wheel_mapping_round_trip():
    pose = (12.0, -7.0, 0.9)
    for v in ((100.0, 0.0), (0.0, 100.0), (-80.0, 55.0)):
        wl, wr = wheel_speeds_for_velocity(v, pose, offset=7.5, wheel_base=18.0)
        back = center_velocity(pose, wl, wr, offset=7.5, wheel_base=18.0)
        assert back[0] == pytest.approx(v[0], abs=1e-9)
        assert back[1] == pytest.approx(v[1], abs=1e-9)


def test_effective_center_offset_geometry():
    pose = (100.0, 50.0, math.pi / 2.0)
    cx, cy = effective_center(pose, 7.5)
    assert (cx, cy) == pytest.approx((100.0, 57.5))
    # inflated separation of effective centres bounds the physical separation
    pose_b = (100.0, 95.0, -math.pi / 2.0)
    ca = effective_center(pose, 7.5)
    cb = effective_center(pose_b, 7.5)
    phys = dist(pose[:2], pose_b[:2])
    assert phys >= dist(ca, cb) - 2 * 7.5 - 1e-12


def test_integrate_unicycle_straight_and_turns():
    pose = (0.0, 0.0, 0.0)
    straight = integrate_unicycle(pose, 100.0, 100.0, 18.0, 0.5)
    assert straight == pytest.approx((50.0, 0.0, 0.0))

    spin = integrate_unicycle(pose, -50.0, 50.0, 18.0, 0.1)
    assert spin[:2] == pytest.approx((0.0, 0.0))
    assert spin[2] == pytest.approx(100.0 / 18.0 * 0.1)

    # quarter circle: omega = v/r with arc radius v/omega
    v, omega = 100.0, 1.0
    wl = v - omega * 9.0
    wr = v + omega * 9.0
    quarter = integrate_unicycle(pose, wl, wr, 18.0, math.pi / 2.0)
    assert quarter[0] == pytest.approx(100.0)   # r*sin(90)
    assert quarter[1] == pytest.approx(100.0)   # r*(1-cos(90))
    assert quarter[2] == pytest.approx(math.pi / 2.0)


def test_effective_center_tracks_command_direction():
    # after mapping v to wheels, the effective centre moves along v
    pose = (0.0, 0.0, 0.3)
    v = (0.0, 150.0)  # perpendicular to heading: only achievable via turning
    wl, wr = wheel_speeds_for_velocity(v, pose, offset=7.5, wheel_base=18.0)
    dt = 1e-4
    new_pose = integrate_unicycle(pose, wl, wr, 18.0, dt)
    c0 = effective_center(pose, 7.5)
    c1 = effective_center(new_pose, 7.5)
    got = ((c1[0] - c0[0]) / dt, (c1[1] - c0[1]) / dt)
    assert got[0] == pytest.approx(v[0], abs=2.0)
    assert got[1] == pytest.approx(v[1], abs=2.0)


def test_bad_inputs_rejected():
    with pytest.raises(ValueError):
        PlannerConfig(max_speed=0.0)
    with pytest.raises(ValueError):
        Obstacle(vertices=((0.0, 0.0), (1.0, 1.0)))
