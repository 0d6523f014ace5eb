/**
 * Keyboard and mouse to bridge messages. The mapper owns the operator's
 * hand state (sign, palm side, pose, scale) and the session toggles it has
 * requested; every effect leaves as a message, nothing touches simulation
 * state directly.
 *
 * Bindings: mouse moves the wrist; 1-4 pick rock / scissors / paper /
 * reversed paper; F flips the palm; A cycles the formation algorithm;
 * D cycles density; Q/E rotate the hand; [ and ] resize it; right-drag
 * outlines an obstacle polygon.
 */

import {
  ALGORITHMS, DENSITIES,
  type Algorithm, type ClientMessage, type Density, type HandMessage,
  type ObstacleMessage, type Sign,
} from "./protocol.js";
import { Viewport, wrapAngle } from "./transform.js";

export const SIGN_KEYS: Record<string, Sign> = {
  "1": "rock",
  "2": "scissors",
  "3": "paper",
  "4": "reversed_paper",
};

const YAW_STEP = 0.15;
const SCALE_STEP = 1.1;
const SCALE_MIN = 0.8;
const SCALE_MAX = 2.5;
// right-drag vertices closer than this are dropped to keep polygons sane
const OBSTACLE_MIN_EDGE_MM = 8;

function cycle<T>(values: T[], current: T): T {
  const i = values.indexOf(current);
  return values[(i + 1) % values.length];
}

export class InputMapper {
  sign: Sign = "paper";
  palmUp = false;
  algorithm: Algorithm = "bone_dynamic";
  density: Density = "sparse";
  yaw = 0;
  scale: number;
  wrist: [number, number] = [0, 0];
  /** In-progress obstacle outline (world mm), null when not drawing. */
  draft: Array<[number, number]> | null = null;

  constructor(public viewport: Viewport, scale = 1.6) {
    this.scale = scale;
  }

  private handMessage(): HandMessage {
    return {
      type: "hand",
      x: this.wrist[0],
      y: this.wrist[1],
      yaw: this.yaw,
      sign: this.sign,
      palm_up: this.palmUp,
      scale: this.scale,
      hand_id: 0,
    };
  }

  /** Returns the message the key press produces, or null for unbound keys. */
  keyDown(key: string): ClientMessage | null {
    const k = key.toLowerCase();
    const sign = SIGN_KEYS[k];
    if (sign !== undefined) {
      this.sign = sign;
      return this.handMessage();
    }
    switch (k) {
      case "f":
        this.palmUp = !this.palmUp;
        return this.handMessage();
      case "a":
        this.algorithm = cycle(ALGORITHMS, this.algorithm);
        return { type: "config", algorithm: this.algorithm };
      case "d":
        this.density = cycle(DENSITIES, this.density);
        return { type: "config", density: this.density };
      case "q":
        this.yaw = wrapAngle(this.yaw + YAW_STEP);
        return this.handMessage();
      case "e":
        this.yaw = wrapAngle(this.yaw - YAW_STEP);
        return this.handMessage();
      case "[":
        this.scale = Math.max(SCALE_MIN, this.scale / SCALE_STEP);
        return this.handMessage();
      case "]":
        this.scale = Math.min(SCALE_MAX, this.scale * SCALE_STEP);
        return this.handMessage();
      default:
        return null;
    }
  }

  /**
   * Mouse move in canvas pixels. While drawing an obstacle the point
   * extends the outline; otherwise it moves the wrist and yields a hand
   * message.
   */
  pointerMove(sx: number, sy: number): ClientMessage | null {
    const [x, y] = this.viewport.toWorld(sx, sy);
    if (this.draft !== null) {
      const last = this.draft[this.draft.length - 1];
      if (Math.hypot(x - last[0], y - last[1]) >= OBSTACLE_MIN_EDGE_MM) {
        this.draft.push([x, y]);
      }
      return null;
    }
    this.wrist = [x, y];
    return this.handMessage();
  }

  obstacleStart(sx: number, sy: number): void {
    this.draft = [this.viewport.toWorld(sx, sy)];
  }

  /** Finish the drag; a degenerate outline (under 3 vertices) is discarded. */
  obstacleEnd(): ObstacleMessage | null {
    const poly = this.draft;
    this.draft = null;
    if (poly === null || poly.length < 3) return null;
    return { type: "obstacle_add", polygon: poly };
  }
}
