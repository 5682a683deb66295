/**
 * WebSocket wiring: streams POSE frames at display refresh, applies every
 * server frame to the session view, reconnects with exponential backoff.
 */

import { InputMapper } from "./input.js";
import { formatCalib, formatPose, parseFrame } from "./protocol.js";
import { SessionView } from "./viewmodel.js";

export interface ClientOptions {
  url: string;
  input: InputMapper;
  view: SessionView;
  onFrame?: () => void;
  maxBackoffMs?: number;
}

export class SessionClient {
  private ws: WebSocket | null = null;
  private backoffMs = 250;
  private stopped = false;
  private lastTick: number | null = null;
  private epoch = performance.now();

  constructor(readonly opts: ClientOptions) {}

  start(): void {
    this.stopped = false;
    this.connect();
    requestAnimationFrame(this.loop);
  }

  stop(): void {
    this.stopped = true;
    this.ws?.close();
  }

  send(line: string): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(line);
    }
  }

  private connect(): void {
    if (this.stopped) return;
    this.opts.view.connection = "connecting";
    const ws = new WebSocket(this.opts.url);
    this.ws = ws;
    ws.onopen = () => {
      this.backoffMs = 250;
      this.opts.view.markOpen();
      const c = this.opts.input.config;
      ws.send(
        formatCalib(
          { x: 0, y: c.eyeHeightM, z: 0, yaw: 0, pitch: 0, roll: 0 },
          c.forwardLimitM,
          c.backwardLimitM
        )
      );
    };
    ws.onmessage = (ev) => {
      const frame = parseFrame(String(ev.data));
      if (frame) {
        this.opts.view.applyFrame(frame);
        this.opts.onFrame?.();
      }
    };
    ws.onclose = () => {
      this.opts.view.markClosed();
      if (!this.stopped) {
        const wait = this.backoffMs;
        this.backoffMs = Math.min(this.backoffMs * 2, this.opts.maxBackoffMs ?? 8000);
        setTimeout(() => this.connect(), wait);
      }
    };
    ws.onerror = () => ws.close();
  }

  private loop = (nowMs: number): void => {
    if (this.stopped) return;
    const dtS = this.lastTick === null ? 0 : (nowMs - this.lastTick) / 1000;
    this.lastTick = nowMs;
    this.opts.input.tick(dtS);
    if (this.ws && this.ws.readyState === WebSocket.OPEN && this.opts.view.inputEnabled) {
      const pose = this.opts.input.pose(nowMs - this.epoch);
      this.ws.send(formatPose(pose));
      this.opts.view.notePoseSent(pose);
    }
    requestAnimationFrame(this.loop);
  };
}
