import type { RobotState, StateFrame } from "../src/protocol.js";
import { Viewport, type Rect } from "../src/transform.js";

export const ARENA: Rect = { xMin: -350, yMin: -400, xMax: 800, yMax: 650 };

/** Viewport with an exact 2 px/mm scale: (848-48)/400 = (648-48)/300 = 2. */
export function twoPxPerMmViewport(): Viewport {
  const arena: Rect = { xMin: -200, yMin: -150, xMax: 200, yMax: 150 };
  return new Viewport(arena, 848, 648, 24);
}

export function robot(id: number, x: number, y: number, heading = 0): RobotState {
  return { id, x, y, heading, converged: false };
}

export function frame(overrides: Partial<StateFrame> = {}): StateFrame {
  return {
    type: "state",
    t: 0,
    algorithm: "bone_dynamic",
    density: "sparse",
    robots: [],
    subgoals: [],
    assignment: [],
    obstacles: [],
    metrics: {},
    ...overrides,
  };
}

/** Deterministic uniform [0, 1) stream for property-style tests. */
export function rng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 4294967296;
  };
}
