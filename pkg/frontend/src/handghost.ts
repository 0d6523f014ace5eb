/**
 * Client-side hand outline drawn under the cursor so the operator sees the
 * hand-vs-swarm correspondence. This is a stylised silhouette, not the
 * engine's hand model: the engine builds its own geometry from the same
 * sign name, so the ghost only needs to read as the right sign at the
 * right place and scale.
 *
 * Hand-local frame: x along the pointing direction (yaw 0), y to the
 * thumb side, wrist at the origin, millimetres.
 */

import type { Sign } from "./protocol.js";
import { wrapAngle } from "./transform.js";

export type GhostGeometry = {
  /** Closed palm outline, world mm. */
  palm: Array<[number, number]>;
  /** One open polyline per finger, thumb first, world mm. */
  fingers: Array<Array<[number, number]>>;
};

type FingerSpec = { baseAngle: number; baseRadius: number; length: number };

// thumb, index, middle, ring, pinky: fan of base joints around the palm arc
const FINGERS: FingerSpec[] = [
  { baseAngle: 0.95, baseRadius: 42, length: 52 },
  { baseAngle: 0.38, baseRadius: 46, length: 72 },
  { baseAngle: 0.10, baseRadius: 47, length: 82 },
  { baseAngle: -0.18, baseRadius: 46, length: 74 },
  { baseAngle: -0.45, baseRadius: 43, length: 56 },
];

const PALM_CENTER = 52;
const PALM_RADIUS = 44;

// per-sign fraction of each finger's length that stays extended
const EXTENSION: Record<Sign, number[]> = {
  rock: [0.45, 0.3, 0.3, 0.3, 0.3],
  scissors: [0.45, 1.0, 1.0, 0.3, 0.3],
  paper: [1.0, 1.0, 1.0, 1.0, 1.0],
  reversed_paper: [1.0, 1.0, 1.0, 1.0, 1.0],
};

function localGhost(sign: Sign): GhostGeometry {
  const palm: Array<[number, number]> = [];
  const sides = 14;
  for (let k = 0; k < sides; k++) {
    const a = (2 * Math.PI * k) / sides;
    palm.push([PALM_CENTER + PALM_RADIUS * Math.cos(a), PALM_RADIUS * 0.85 * Math.sin(a)]);
  }

  const extension = EXTENSION[sign];
  const fingers = FINGERS.map((f, i) => {
    const dir: [number, number] = [Math.cos(f.baseAngle), Math.sin(f.baseAngle)];
    const base: [number, number] = [
      PALM_CENTER + f.baseRadius * dir[0],
      f.baseRadius * dir[1],
    ];
    const reach = f.length * extension[i];
    // two segments so curled fingers read as knuckles, not stubs
    const mid: [number, number] = [base[0] + 0.6 * reach * dir[0], base[1] + 0.6 * reach * dir[1]];
    const tip: [number, number] = [base[0] + reach * dir[0], base[1] + reach * dir[1]];
    return [base, mid, tip];
  });

  return { palm, fingers };
}

/**
 * Ghost silhouette for a hand at (x, y) mm with the given yaw, sign, scale
 * and palm side. `reversed_paper` and `palm_up` both mirror laterally, the
 * same convention the engine uses for flipped hands; applying both undoes
 * the mirror.
 */
export function handGhost(
  x: number, y: number, yaw: number, sign: Sign, scale: number, palmUp: boolean,
): GhostGeometry {
  const mirror = (sign === "reversed_paper") !== palmUp ? -1 : 1;
  const c = Math.cos(wrapAngle(yaw));
  const s = Math.sin(wrapAngle(yaw));
  const place = (p: [number, number]): [number, number] => {
    const lx = p[0] * scale;
    const ly = p[1] * scale * mirror;
    return [x + lx * c - ly * s, y + lx * s + ly * c];
  };
  const local = localGhost(sign);
  return {
    palm: local.palm.map(place),
    fingers: local.fingers.map((f) => f.map(place)),
  };
}
