"""Hand-steered tabletop robot swarm.

A stream of hand poses becomes coordinated disc-robot motion through a
fixed pipeline: project the hand to the table plane, generate a subgoal
formation (bone anchors or silhouette clustering), assign robots to
subgoals optimally, steer ideal planning agents with reciprocal
collision avoidance, and command the physical robots toward their
planning twins with a differential-drive control law.  Everything is
deterministic given a scenario and seed; traces replay byte-exactly.

Entry points: `run_scenario` for batch runs, `handswarm` on the command
line, and `bridge.serve` for live WebSocket steering.
"""

from .assignment import (
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
from .bridge import BridgeError, BridgeSession, build_app, serve
from .drive import (
    CalibrationError,
    ControlGains,
    DriveState,
    WheelCommand,
    apply_calibration,
    compute_wheel_command,
    identity_calibration,
    make_drive_state,
    update_goal,
)
from .engine import (
    Engine,
    EngineError,
    EngineInputError,
    Metrics,
    RobotState,
    resolve_contacts,
    run_scenario,
)
from .formation import (
    ROBOT_COUNTS,
    FormationError,
    SubgoalFormation,
    bone_subgoals,
    get_layout,
    silhouette_subgoals,
)
from .graycode import (
    DegenerateBaselineError,
    GrayCodeConfig,
    GrayCodeError,
    PatternFrame,
    decode_bits,
    encode_patterns,
    frame_to_pgm,
    gray_decode,
    gray_encode,
    pose_from_photodiodes,
    simulate_reading,
)
from .hand import (
    SIGNS,
    HandError,
    HandFrame,
    HandSign,
    HandTrajectory,
    interpolate_frame,
    load_trajectory,
    project_to_plane,
    save_trajectory,
    synth_hand_sign,
)
from .rvo import Crowd, CrowdAgent, Obstacle, PlannerConfig
from .scenario import (
    ALGORITHMS,
    DENSITIES,
    PRESETS,
    SIZES,
    LiveSource,
    Rect,
    ScenarioError,
    ScenarioSpec,
    ScriptSource,
    ScriptStep,
    TargetSpec,
    TrajectorySource,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "Assignment",
    "AssignmentError",
    "BridgeError",
    "BridgeSession",
    "CalibrationError",
    "ControlGains",
    "Crowd",
    "CrowdAgent",
    "DENSITIES",
    "DegenerateBaselineError",
    "DriveState",
    "Engine",
    "EngineError",
    "EngineInputError",
    "FormationError",
    "GrayCodeConfig",
    "GrayCodeError",
    "HandError",
    "HandFrame",
    "HandSign",
    "HandTrajectory",
    "LiveSource",
    "Metrics",
    "ModeCompatibilityError",
    "Obstacle",
    "PRESETS",
    "PatternFrame",
    "PlannerConfig",
    "ROBOT_COUNTS",
    "Rect",
    "RobotState",
    "SIGNS",
    "SIZES",
    "ScenarioError",
    "ScenarioSpec",
    "ScriptSource",
    "ScriptStep",
    "StaticBinding",
    "SubgoalFormation",
    "TargetSpec",
    "TrajectorySource",
    "WheelCommand",
    "apply_calibration",
    "assign_dynamic",
    "assign_static",
    "bone_subgoals",
    "build_app",
    "compute_wheel_command",
    "cost_matrix",
    "decode_bits",
    "encode_patterns",
    "frame_to_pgm",
    "get_layout",
    "gray_decode",
    "gray_encode",
    "identity_calibration",
    "interpolate_frame",
    "load_scenario",
    "load_trajectory",
    "make_drive_state",
    "make_static_binding",
    "pose_from_photodiodes",
    "project_to_plane",
    "resolve_contacts",
    "run_scenario",
    "save_scenario",
    "save_trajectory",
    "scenario_from_dict",
    "scenario_to_dict",
    "serve",
    "silhouette_subgoals",
    "simulate_reading",
    "solve_lsap",
    "synth_hand_sign",
    "update_goal",
]
