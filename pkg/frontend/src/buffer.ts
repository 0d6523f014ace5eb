/**
 * Bounded store of recent state frames with interpolation for the render
 * loop. Snapshots arrive at the bridge cadence (25 Hz); rendering runs at
 * display rate and samples a little behind the newest frame so there is
 * always a bracketing pair to blend, which keeps robot motion smooth
 * instead of stepping at snapshot rate.
 */

import type { RobotState, StateFrame } from "./protocol.js";
import { wrapAngle } from "./transform.js";

export class SnapshotBuffer {
  private frames: StateFrame[] = [];

  constructor(readonly capacity = 120) {
    if (capacity < 2) throw new Error("capacity must hold a bracketing pair");
  }

  get length(): number {
    return this.frames.length;
  }

  get latest(): StateFrame | null {
    return this.frames.length ? this.frames[this.frames.length - 1] : null;
  }

  /** Frames must arrive in time order; stale or repeated times are dropped. */
  push(frame: StateFrame): void {
    const last = this.latest;
    if (last !== null && frame.t <= last.t) return;
    this.frames.push(frame);
    while (this.frames.length > this.capacity) this.frames.shift();
  }

  /**
   * State at simulation time t, clamped to the buffered span. Robot poses
   * interpolate linearly (headings along the shortest arc); formation,
   * assignment and metrics snap to the later frame since they change
   * discretely.
   */
  sampleAt(t: number): StateFrame | null {
    const n = this.frames.length;
    if (n === 0) return null;
    if (t <= this.frames[0].t) return this.frames[0];
    if (t >= this.frames[n - 1].t) return this.frames[n - 1];
    let hi = 1;
    while (this.frames[hi].t < t) hi++;
    const a = this.frames[hi - 1];
    const b = this.frames[hi];
    const u = (t - a.t) / (b.t - a.t);
    return blend(a, b, u);
  }

  /** State `delay` seconds behind the newest frame. */
  sampleDelayed(delay: number): StateFrame | null {
    const last = this.latest;
    return last === null ? null : this.sampleAt(last.t - delay);
  }
}

function blend(a: StateFrame, b: StateFrame, u: number): StateFrame {
  const prev = new Map<number, RobotState>(a.robots.map((r) => [r.id, r]));
  const robots = b.robots.map((rb) => {
    const ra = prev.get(rb.id);
    if (ra === undefined) return rb;
    return {
      id: rb.id,
      x: ra.x + u * (rb.x - ra.x),
      y: ra.y + u * (rb.y - ra.y),
      heading: wrapAngle(ra.heading + u * wrapAngle(rb.heading - ra.heading)),
      converged: rb.converged,
    };
  });
  return { ...b, t: a.t + u * (b.t - a.t), robots };
}
