/**
 * Canvas scene construction and drawing, split so the geometry is testable:
 * buildScene turns a state frame into screen-space primitives, drawScene
 * replays them onto a 2D context. Robots render as discs at true physical
 * scale so a 30 mm robot reads correctly against the hand ghost.
 */

import type { StateFrame } from "./protocol.js";
import type { GhostGeometry } from "./handghost.js";
import { Viewport, type Rect } from "./transform.js";

export type Disc = {
  id: number;
  sx: number;
  sy: number;
  rPx: number;
  heading: number;
  converged: boolean;
};

export type Segment = { x1: number; y1: number; x2: number; y2: number };

export type Scene = {
  arena: { x: number; y: number; w: number; h: number };
  discs: Disc[];
  subgoals: Array<[number, number]>;
  assignmentLines: Segment[];
  obstacles: Array<Array<[number, number]>>;
  draft: Array<[number, number]> | null;
  hud: string[];
  scaleLegend: { x1: number; y1: number; x2: number; y2: number; label: string };
};

export type SceneOptions = {
  draft?: Array<[number, number]> | null;
  hud?: string[];
};

function fmt(value: number | null | undefined, digits = 1): string {
  return typeof value === "number" ? value.toFixed(digits) : "-";
}

export function metricsHud(frame: StateFrame): string[] {
  const m = frame.metrics;
  return [
    `t ${frame.t.toFixed(2)} s   ${frame.algorithm} / ${frame.density}   robots ${frame.robots.length}`,
    `track mean ${fmt(m.mean_tracking_error)} mm  max ${fmt(m.max_tracking_error)} mm`
    + `  collisions ${fmt(m.collision_count, 0)}  travel ${fmt(m.total_travel, 0)} mm`
    + `  fit ${fmt(m.time_to_fit, 2)} s  reassigned ${fmt(m.reassignment_count, 0)}`,
  ];
}

export function buildScene(
  frame: StateFrame,
  viewport: Viewport,
  arena: Rect,
  robotRadiusMm: number,
  opts: SceneOptions = {},
): Scene {
  const [ax, ay] = viewport.toScreen(arena.xMin, arena.yMax);
  const [bx, by] = viewport.toScreen(arena.xMax, arena.yMin);

  const discs = frame.robots.map((r) => {
    const [sx, sy] = viewport.toScreen(r.x, r.y);
    return { id: r.id, sx, sy, rPx: viewport.px(robotRadiusMm), heading: r.heading, converged: r.converged };
  });

  const subgoals = frame.subgoals.map(([x, y]) => viewport.toScreen(x, y));

  // assignment[i] is robot i's subgoal index
  const assignmentLines: Segment[] = [];
  for (let i = 0; i < frame.assignment.length && i < discs.length; i++) {
    const j = frame.assignment[i];
    if (j < 0 || j >= subgoals.length) continue;
    assignmentLines.push({
      x1: discs[i].sx, y1: discs[i].sy,
      x2: subgoals[j][0], y2: subgoals[j][1],
    });
  }

  const toScreenPoly = (poly: Array<[number, number]>) =>
    poly.map(([x, y]) => viewport.toScreen(x, y));

  const legendMm = 100;
  return {
    arena: { x: ax, y: ay, w: bx - ax, h: by - ay },
    discs,
    subgoals,
    assignmentLines,
    obstacles: frame.obstacles.map(toScreenPoly),
    draft: opts.draft ? toScreenPoly(opts.draft) : null,
    hud: opts.hud ?? metricsHud(frame),
    scaleLegend: {
      x1: ax, y1: by + 14, x2: ax + viewport.px(legendMm), y2: by + 14,
      label: `${legendMm} mm`,
    },
  };
}

/** The slice of CanvasRenderingContext2D the renderer touches. */
export interface Canvas2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
}

const COLORS = {
  background: "#10141c",
  arena: "#1a2130",
  arenaBorder: "#3a4a66",
  robot: "#d8b24a",
  robotConverged: "#5fba6e",
  robotEdge: "#0c0f15",
  headingTick: "#0c0f15",
  subgoal: "#6fa8dc",
  assignment: "#46546e",
  obstacle: "#8a4a4a",
  draft: "#c06060",
  ghost: "#7e89a8",
  text: "#c8d2e4",
};

function strokePolyline(ctx: Canvas2D, pts: Array<[number, number]>, close: boolean): void {
  if (pts.length < 2) return;
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (let i = 1; i < pts.length; i++) ctx.lineTo(pts[i][0], pts[i][1]);
  if (close) ctx.closePath();
  ctx.stroke();
}

export function drawScene(
  ctx: Canvas2D,
  width: number,
  height: number,
  scene: Scene,
  ghost: GhostGeometry | null,
  viewport: Viewport,
  banner: string | null,
): void {
  ctx.globalAlpha = 1;
  ctx.setLineDash([]);
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, width, height);

  ctx.fillStyle = COLORS.arena;
  ctx.fillRect(scene.arena.x, scene.arena.y, scene.arena.w, scene.arena.h);
  ctx.strokeStyle = COLORS.arenaBorder;
  ctx.lineWidth = 1;
  ctx.strokeRect(scene.arena.x, scene.arena.y, scene.arena.w, scene.arena.h);

  for (const poly of scene.obstacles) {
    if (poly.length < 3) continue;
    ctx.beginPath();
    ctx.moveTo(poly[0][0], poly[0][1]);
    for (let i = 1; i < poly.length; i++) ctx.lineTo(poly[i][0], poly[i][1]);
    ctx.closePath();
    ctx.fillStyle = COLORS.obstacle;
    ctx.globalAlpha = 0.55;
    ctx.fill();
    ctx.globalAlpha = 1;
    ctx.strokeStyle = COLORS.obstacle;
    ctx.stroke();
  }

  ctx.strokeStyle = COLORS.assignment;
  ctx.lineWidth = 1;
  ctx.setLineDash([4, 4]);
  for (const seg of scene.assignmentLines) {
    ctx.beginPath();
    ctx.moveTo(seg.x1, seg.y1);
    ctx.lineTo(seg.x2, seg.y2);
    ctx.stroke();
  }
  ctx.setLineDash([]);

  ctx.strokeStyle = COLORS.subgoal;
  ctx.lineWidth = 1.5;
  for (const [sx, sy] of scene.subgoals) {
    ctx.beginPath();
    ctx.arc(sx, sy, 3, 0, 2 * Math.PI);
    ctx.stroke();
  }

  for (const disc of scene.discs) {
    ctx.beginPath();
    ctx.arc(disc.sx, disc.sy, disc.rPx, 0, 2 * Math.PI);
    ctx.fillStyle = disc.converged ? COLORS.robotConverged : COLORS.robot;
    ctx.fill();
    ctx.strokeStyle = COLORS.robotEdge;
    ctx.lineWidth = 1;
    ctx.stroke();
    // heading tick from centre to rim
    ctx.beginPath();
    ctx.moveTo(disc.sx, disc.sy);
    ctx.lineTo(disc.sx + disc.rPx * Math.cos(disc.heading),
               disc.sy - disc.rPx * Math.sin(disc.heading));
    ctx.strokeStyle = COLORS.headingTick;
    ctx.stroke();
    ctx.fillStyle = COLORS.text;
    ctx.font = "10px monospace";
    ctx.fillText(String(disc.id), disc.sx + disc.rPx + 2, disc.sy - 2);
  }

  if (ghost !== null) {
    ctx.strokeStyle = COLORS.ghost;
    ctx.lineWidth = 1.5;
    ctx.globalAlpha = 0.8;
    strokePolyline(ctx, ghost.palm.map(([x, y]) => viewport.toScreen(x, y)), true);
    for (const finger of ghost.fingers) {
      strokePolyline(ctx, finger.map(([x, y]) => viewport.toScreen(x, y)), false);
    }
    ctx.globalAlpha = 1;
  }

  if (scene.draft !== null && scene.draft.length >= 2) {
    ctx.strokeStyle = COLORS.draft;
    ctx.lineWidth = 1.5;
    ctx.setLineDash([6, 3]);
    strokePolyline(ctx, scene.draft, false);
    ctx.setLineDash([]);
  }

  ctx.strokeStyle = COLORS.text;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(scene.scaleLegend.x1, scene.scaleLegend.y1);
  ctx.lineTo(scene.scaleLegend.x2, scene.scaleLegend.y2);
  ctx.stroke();
  ctx.fillStyle = COLORS.text;
  ctx.font = "11px monospace";
  ctx.fillText(scene.scaleLegend.label, scene.scaleLegend.x2 + 6, scene.scaleLegend.y2 + 4);

  let line = 16;
  for (const text of scene.hud) {
    ctx.fillText(text, 8, line);
    line += 14;
  }

  if (banner !== null) {
    ctx.fillStyle = "#5a2330";
    ctx.globalAlpha = 0.92;
    ctx.fillRect(0, height / 2 - 18, width, 36);
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#f2d4da";
    ctx.font = "14px monospace";
    ctx.fillText(banner, width / 2 - 4 * banner.length, height / 2 + 5);
  }
}
