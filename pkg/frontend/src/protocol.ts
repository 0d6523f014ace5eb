/**
 * JSON frames spoken over the steering WebSocket, mirrored from the
 * bridge: client messages steer the session (hand pose, config, obstacles),
 * server frames are state snapshots or per-sender error bounces.
 */

export type Sign = "rock" | "scissors" | "paper" | "reversed_paper";
export type Algorithm = "bone_static" | "bone_dynamic" | "silhouette_dynamic";
export type Density = "sparse" | "medium" | "dense";

export const SIGNS: Sign[] = ["rock", "scissors", "paper", "reversed_paper"];
export const ALGORITHMS: Algorithm[] = ["bone_dynamic", "bone_static", "silhouette_dynamic"];
export const DENSITIES: Density[] = ["sparse", "medium", "dense"];

export type HandMessage = {
  type: "hand";
  x: number;
  y: number;
  yaw: number;
  sign: Sign;
  palm_up: boolean;
  scale: number;
  hand_id: number;
};

export type ConfigMessage = {
  type: "config";
  algorithm?: Algorithm;
  density?: Density;
};

export type ObstacleMessage = {
  type: "obstacle_add";
  polygon: Array<[number, number]>;
};

export type ClientMessage = HandMessage | ConfigMessage | ObstacleMessage;

export type RobotState = {
  id: number;
  x: number;
  y: number;
  heading: number;
  converged: boolean;
};

export type StateFrame = {
  type: "state";
  t: number;
  algorithm: string;
  density: string;
  robots: RobotState[];
  subgoals: Array<[number, number]>;
  assignment: number[];
  obstacles: Array<Array<[number, number]>>;
  metrics: Record<string, number | null>;
};

export type ErrorFrame = { type: "error"; detail: unknown };

export type ServerFrame = StateFrame | ErrorFrame;

export function serializeMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

function isPoint(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 &&
    typeof v[0] === "number" && typeof v[1] === "number";
}

function parseRobot(v: unknown): RobotState | null {
  if (typeof v !== "object" || v === null) return null;
  const r = v as Record<string, unknown>;
  if (typeof r.id !== "number" || typeof r.x !== "number" ||
      typeof r.y !== "number" || typeof r.heading !== "number") return null;
  return {
    id: r.id, x: r.x, y: r.y, heading: r.heading,
    converged: Boolean(r.converged),
  };
}

/**
 * Parse one incoming text frame. Returns null for anything that is not a
 * well-formed state or error frame; the caller drops such frames so a
 * glitchy payload can never take the render loop down.
 */
export function parseServerFrame(text: string): ServerFrame | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) return null;
  const obj = raw as Record<string, unknown>;

  if (obj.type === "error") return { type: "error", detail: obj.detail ?? null };
  if (obj.type !== "state") return null;
  if (typeof obj.t !== "number" || !Array.isArray(obj.robots)) return null;

  const robots: RobotState[] = [];
  for (const entry of obj.robots) {
    const robot = parseRobot(entry);
    if (robot === null) return null;
    robots.push(robot);
  }

  const subgoals = Array.isArray(obj.subgoals) ? obj.subgoals.filter(isPoint) : [];
  const assignment = Array.isArray(obj.assignment)
    ? obj.assignment.filter((j): j is number => typeof j === "number")
    : [];
  const obstacles: Array<Array<[number, number]>> = [];
  if (Array.isArray(obj.obstacles)) {
    for (const poly of obj.obstacles) {
      if (Array.isArray(poly)) obstacles.push(poly.filter(isPoint));
    }
  }
  const metrics = (typeof obj.metrics === "object" && obj.metrics !== null)
    ? obj.metrics as Record<string, number | null>
    : {};

  return {
    type: "state",
    t: obj.t,
    algorithm: typeof obj.algorithm === "string" ? obj.algorithm : "",
    density: typeof obj.density === "string" ? obj.density : "",
    robots, subgoals, assignment, obstacles, metrics,
  };
}
