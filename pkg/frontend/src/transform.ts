/**
 * Screen <-> world transform. World coordinates are table millimetres with
 * y pointing away from the operator; screen coordinates are canvas pixels
 * with y pointing down. The arena is fitted to the canvas at a uniform
 * scale, centred, with a pixel margin, so robot discs render at true size
 * relative to everything else.
 */

export type Rect = { xMin: number; yMin: number; xMax: number; yMax: number };

export class Viewport {
  readonly pxPerMm: number;
  private readonly originX: number;
  private readonly originY: number;

  constructor(arena: Rect, canvasW: number, canvasH: number, marginPx = 24) {
    const w = arena.xMax - arena.xMin;
    const h = arena.yMax - arena.yMin;
    if (w <= 0 || h <= 0) throw new Error("arena must have positive extent");
    const scale = Math.min((canvasW - 2 * marginPx) / w, (canvasH - 2 * marginPx) / h);
    if (!(scale > 0)) throw new Error("canvas too small for the arena");
    this.pxPerMm = scale;
    // screen position of world (0, 0): arena centre maps to canvas centre
    const cx = (arena.xMin + arena.xMax) / 2;
    const cy = (arena.yMin + arena.yMax) / 2;
    this.originX = canvasW / 2 - cx * scale;
    this.originY = canvasH / 2 + cy * scale;
  }

  toScreen(x: number, y: number): [number, number] {
    return [this.originX + x * this.pxPerMm, this.originY - y * this.pxPerMm];
  }

  toWorld(sx: number, sy: number): [number, number] {
    return [(sx - this.originX) / this.pxPerMm, (this.originY - sy) / this.pxPerMm];
  }

  /** Length in pixels of a world-space length in millimetres. */
  px(mm: number): number {
    return mm * this.pxPerMm;
  }
}

export function wrapAngle(a: number): number {
  let r = a % (2 * Math.PI);
  if (r > Math.PI) r -= 2 * Math.PI;
  if (r <= -Math.PI) r += 2 * Math.PI;
  return r;
}
