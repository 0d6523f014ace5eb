"""Live steering service: a WebSocket session owning one engine.

Clients send hand poses, config switches, and obstacles as JSON text
frames; the session applies them at tick boundaries in arrival order,
ticks on the wall clock, and fans state snapshots out to every
subscriber.  Everything needed to reproduce a session offline (scenario,
tick count, input log) is captured in its session record.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import socket

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import TICK_DT, Engine
from .scenario import ScenarioSpec, scenario_to_dict

# one state frame every 4th engine tick: 25 Hz at the 100 Hz tick rate,
# inside the <= 30 Hz broadcast budget
SNAPSHOT_EVERY = 4


class BridgeError(RuntimeError):
    """Session service failed to start or was misused."""


def _frame(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


class BridgeSession:
    """Single ticking owner of an engine plus ordered input routing.

    Inputs are queued with their sender and applied at the next tick
    boundary; schema errors travel back to the sender as error frames
    while the session keeps running.
    """

    def __init__(self, spec: ScenarioSpec, snapshot_every: int = SNAPSHOT_EVERY):
        if snapshot_every < 1:
            raise BridgeError("snapshot_every must be at least 1")
        self.spec = spec
        self.engine = Engine(spec)
        self.snapshot_every = snapshot_every
        self._pending: list[tuple[object, dict]] = []

    def submit_text(self, sender: object, text: str) -> dict | None:
        """Queue a raw frame; malformed JSON bounces immediately."""
        try:
            message = json.loads(text)
        except json.JSONDecodeError as exc:
            return {"type": "error", "detail": f"not valid JSON: {exc}"}
        if not isinstance(message, dict):
            return {"type": "error", "detail": "frame must be a JSON object"}
        self.submit(sender, message)
        return None

    def submit(self, sender: object, message: dict) -> None:
        self._pending.append((sender, message))

    def tick(self) -> tuple[dict | None, list[tuple[object, dict]]]:
        """Advance one engine tick.

        Returns (snapshot or None, error frames addressed to their
        senders).  Snapshots appear every `snapshot_every` ticks.
        """
        pending, self._pending = self._pending, []
        for _, message in pending:
            self.engine.enqueue(message)
        results = self.engine.drain_mailbox()
        errors = [(sender, {"type": "error", "detail": err})
                  for (sender, _), (_, err) in zip(pending, results)
                  if err is not None]
        self.engine.tick()
        snapshot = None
        if (self.engine.tick_index - 1) % self.snapshot_every == 0:
            snapshot = self.engine.snapshot()
        return snapshot, errors

    def session_record(self) -> dict:
        """Everything `replay-log` needs to reproduce this session's trace."""
        return {
            "scenario": scenario_to_dict(self.spec),
            "ticks": self.engine.tick_index,
            "log": [{"tick": tick, "message": message}
                    for tick, message in self.engine.input_log],
        }


async def _safe_send(ws: WebSocket, text: str) -> bool:
    try:
        await ws.send_text(text)
        return True
    except Exception:
        return False


async def _tick_loop(app: FastAPI) -> None:
    session: BridgeSession = app.state.session
    subscribers: set[WebSocket] = app.state.subscribers
    loop = asyncio.get_running_loop()
    next_deadline = loop.time()
    while True:
        snapshot, errors = session.tick()
        for sender, frame in errors:
            if sender in subscribers:
                await _safe_send(sender, _frame(frame))
        if snapshot is not None and subscribers:
            text = _frame(snapshot)
            dead = [ws for ws in list(subscribers)
                    if not await _safe_send(ws, text)]
            for ws in dead:
                subscribers.discard(ws)
        next_deadline += TICK_DT
        delay = next_deadline - loop.time()
        if delay > 0:
            await asyncio.sleep(delay)
        else:
            # fell behind wall clock; resynchronize instead of spiraling
            next_deadline = loop.time()


def build_app(spec: ScenarioSpec, snapshot_every: int = SNAPSHOT_EVERY) -> FastAPI:
    """FastAPI app exposing one live session at /ws."""

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(_tick_loop(app))
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)
    app.state.session = BridgeSession(spec, snapshot_every=snapshot_every)
    app.state.subscribers = set()

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        session: BridgeSession = app.state.session
        # greet with the current state so clients can draw immediately
        await _safe_send(ws, _frame(session.engine.snapshot()))
        app.state.subscribers.add(ws)
        try:
            while True:
                text = await ws.receive_text()
                bounce = session.submit_text(ws, text)
                if bounce is not None:
                    await _safe_send(ws, _frame(bounce))
        except WebSocketDisconnect:
            pass
        finally:
            app.state.subscribers.discard(ws)

    @app.get("/session")
    async def session_record() -> dict:
        return app.state.session.session_record()

    return app


def _ensure_port_free(host: str, port: int) -> None:
    try:
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
            probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            probe.bind((host, port))
    except OSError as exc:
        raise BridgeError(f"cannot listen on {host}:{port}: {exc}") from None


def serve(spec: ScenarioSpec, host: str = "127.0.0.1", port: int = 8765,
          snapshot_every: int = SNAPSHOT_EVERY) -> None:
    """Run a live session until interrupted."""
    import uvicorn

    _ensure_port_free(host, port)
    app = build_app(spec, snapshot_every=snapshot_every)
    uvicorn.run(app, host=host, port=port, log_level="warning")
