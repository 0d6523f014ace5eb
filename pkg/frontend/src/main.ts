/**
 * Browser entry point: wires the socket client, input mapper, snapshot
 * buffer and renderer onto a full-window canvas. The bridge URL defaults
 * to the local session server and can be overridden with ?server=ws://...
 */

import { BridgeClient } from "./client.js";
import { SnapshotBuffer } from "./buffer.js";
import { InputMapper } from "./input.js";
import { handGhost } from "./handghost.js";
import { buildScene, drawScene, metricsHud } from "./render.js";
import { Viewport, type Rect } from "./transform.js";
import type { StateFrame } from "./protocol.js";

// sample two snapshot periods behind the live edge so a bracketing pair
// for interpolation is always buffered
const RENDER_DELAY_S = 0.08;
const HAND_SEND_MIN_MS = 40;

const FALLBACK_ARENA: Rect = { xMin: -350, yMin: -400, xMax: 800, yMax: 650 };
const FALLBACK_ROBOT_RADIUS_MM = 15;

function bridgeUrl(): string {
  const override = new URLSearchParams(window.location.search).get("server");
  return override ?? "ws://127.0.0.1:8765/ws";
}

function sessionUrl(ws: string): string {
  return ws.replace(/^ws/, "http").replace(/\/ws$/, "/session");
}

type SessionInfo = { arena: Rect; robotRadiusMm: number };

async function fetchSessionInfo(url: string): Promise<SessionInfo | null> {
  try {
    const resp = await fetch(url);
    if (!resp.ok) return null;
    const record = await resp.json() as {
      scenario?: {
        arena?: { x_min: number; y_min: number; x_max: number; y_max: number };
        robots?: { size: number };
      };
    };
    const arena = record.scenario?.arena;
    const size = record.scenario?.robots?.size;
    if (arena === undefined || size === undefined) return null;
    return {
      arena: { xMin: arena.x_min, yMin: arena.y_min, xMax: arena.x_max, yMax: arena.y_max },
      robotRadiusMm: size / 2,
    };
  } catch {
    return null;
  }
}

function start(): void {
  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (ctx === null) throw new Error("canvas 2d context unavailable");

  let arena = FALLBACK_ARENA;
  let robotRadiusMm = FALLBACK_ROBOT_RADIUS_MM;
  let viewport = new Viewport(arena, window.innerWidth, window.innerHeight);
  const input = new InputMapper(viewport);
  const buffer = new SnapshotBuffer();
  let lastFrame: StateFrame | null = null;
  let banner: string | null = "connecting...";
  let lastHandSend = 0;

  const resize = () => {
    canvas.width = window.innerWidth;
    canvas.height = window.innerHeight;
    viewport = new Viewport(arena, canvas.width, canvas.height);
    input.viewport = viewport;
  };
  resize();
  window.addEventListener("resize", resize);

  const wsUrl = bridgeUrl();
  const client = new BridgeClient(wsUrl);

  client.onFrame = (frame) => {
    if (frame.type === "error") {
      console.warn("bridge rejected a message:", frame.detail);
      return;
    }
    buffer.push(frame);
    if (frame.algorithm !== "") input.algorithm = frame.algorithm as typeof input.algorithm;
    if (frame.density !== "") input.density = frame.density as typeof input.density;
  };
  client.onStatus = (status) => {
    banner = status === "open" ? null
      : status === "connecting" ? "connecting..."
      : "connection lost - reconnecting";
  };
  client.connect();

  const sessionInfo = fetchSessionInfo(sessionUrl(wsUrl));
  void sessionInfo.then((info) => {
    if (info === null) return;
    arena = info.arena;
    robotRadiusMm = info.robotRadiusMm;
    resize();
  });

  window.addEventListener("keydown", (ev) => {
    const msg = input.keyDown(ev.key);
    if (msg !== null) client.send(msg);
  });

  canvas.addEventListener("mousemove", (ev) => {
    const msg = input.pointerMove(ev.offsetX, ev.offsetY);
    if (msg === null) return;
    const now = performance.now();
    if (msg.type === "hand" && now - lastHandSend < HAND_SEND_MIN_MS) return;
    if (client.send(msg)) lastHandSend = now;
  });

  canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());
  canvas.addEventListener("mousedown", (ev) => {
    if (ev.button === 2) input.obstacleStart(ev.offsetX, ev.offsetY);
  });
  canvas.addEventListener("mouseup", (ev) => {
    if (ev.button !== 2) return;
    const msg = input.obstacleEnd();
    if (msg !== null) client.send(msg);
  });

  const helpLine = "mouse hand · 1-4 sign · F palm · A algorithm · D density"
    + " · Q/E yaw · [ ] scale · right-drag obstacle";

  const loop = () => {
    const frame = buffer.sampleDelayed(RENDER_DELAY_S) ?? lastFrame;
    if (frame !== null) {
      lastFrame = frame;
      const hud = metricsHud(frame);
      hud.push(`hand ${input.sign}${input.palmUp ? " (palm up)" : ""}`
        + `  yaw ${input.yaw.toFixed(2)}  scale ${input.scale.toFixed(2)}`);
      hud.push(helpLine);
      const scene = buildScene(frame, viewport, arena, robotRadiusMm,
        { draft: input.draft, hud });
      const ghost = handGhost(input.wrist[0], input.wrist[1], input.yaw,
        input.sign, input.scale, input.palmUp);
      drawScene(ctx, canvas.width, canvas.height, scene, ghost, viewport, banner);
    }
    window.requestAnimationFrame(loop);
  };
  window.requestAnimationFrame(loop);
}

start();
