/**
 * WebSocket wrapper for the steering session: parses incoming frames,
 * serialises outgoing messages, and reconnects with exponential backoff
 * when the session drops. Consumers watch `onStatus` to freeze the scene
 * and show a banner while disconnected.
 */

import { parseServerFrame, serializeMessage, type ClientMessage, type ServerFrame } from "./protocol.js";

export type Status = "connecting" | "open" | "closed";

export type SocketLike = {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
};

export type SocketFactory = (url: string) => SocketLike;

const RECONNECT_MIN_MS = 500;
const RECONNECT_MAX_MS = 5000;

export class BridgeClient {
  onFrame: (frame: ServerFrame) => void = () => {};
  onStatus: (status: Status) => void = () => {};

  private socket: SocketLike | null = null;
  private status: Status = "closed";
  private backoffMs = RECONNECT_MIN_MS;
  private stopped = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    readonly url: string,
    private factory: SocketFactory = (u) => new WebSocket(u) as unknown as SocketLike,
  ) {}

  get currentStatus(): Status {
    return this.status;
  }

  connect(): void {
    if (this.stopped) return;
    this.setStatus("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoffMs = RECONNECT_MIN_MS;
      this.setStatus("open");
    };
    socket.onmessage = (ev) => {
      if (typeof ev.data !== "string") return;
      const frame = parseServerFrame(ev.data);
      if (frame !== null) this.onFrame(frame);
    };
    socket.onclose = () => {
      if (this.socket !== socket) return;
      this.socket = null;
      this.setStatus("closed");
      this.scheduleReconnect();
    };
    socket.onerror = () => {
      // the close handler owns recovery; errors always precede a close
    };
  }

  /** True if the message went out; messages while disconnected are dropped. */
  send(message: ClientMessage): boolean {
    if (this.status !== "open" || this.socket === null) return false;
    this.socket.send(serializeMessage(message));
    return true;
  }

  close(): void {
    this.stopped = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
    this.socket?.close();
    this.socket = null;
    this.setStatus("closed");
  }

  private scheduleReconnect(): void {
    if (this.stopped) return;
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, RECONNECT_MAX_MS);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.connect();
    }, delay);
  }

  private setStatus(status: Status): void {
    if (status === this.status) return;
    this.status = status;
    this.onStatus(status);
  }
}
