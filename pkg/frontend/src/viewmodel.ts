/**
 * Client session state.
 *
 * Holds the last VIEW frame verbatim plus trial bookkeeping and the live
 * metric ticker. Nothing here invents interaction state: zoom, pan,
 * cursor and plane pose change only when a server frame arrives, so a
 * dropped connection freezes the rendered view.
 */

import type { PoseSample, ResultFrame, ServerFrame, TrialFrame, ViewFrame } from "./protocol.js";

export type ConnectionState = "connecting" | "open" | "closed";

export interface TrialStatus {
  imageId: string;
  timeLimitS: number;
  attemptsLeft: number;
  startT: number | null;
  finished: boolean;
  lastResult: ResultFrame | null;
  targets: TrialFrame["targets"];
}

export interface MetricTicker {
  headMovementM: number;
  headRotationRad: number;
  zoomDistance: number;
}

export class SessionView {
  connection: ConnectionState = "connecting";
  lastView: ViewFrame | null = null;
  lastError: string | null = null;
  trial: TrialStatus | null = null;
  ticker: MetricTicker = { headMovementM: 0, headRotationRad: 0, zoomDistance: 0 };

  private lastPose: PoseSample | null = null;

  applyFrame(frame: ServerFrame): void {
    switch (frame.kind) {
      case "view": {
        if (this.lastView !== null) {
          this.ticker.zoomDistance += Math.abs(frame.zoom - this.lastView.zoom);
        }
        this.lastView = frame;
        if (this.trial && !this.trial.finished) {
          if (this.trial.startT === null) this.trial.startT = frame.t;
        }
        break;
      }
      case "trial": {
        this.trial = {
          imageId: frame.imageId,
          timeLimitS: frame.timeLimitS,
          attemptsLeft: frame.maxAttempts,
          startT: this.lastView ? this.lastView.t : null,
          finished: false,
          lastResult: null,
          targets: frame.targets,
        };
        break;
      }
      case "result": {
        if (this.trial) {
          this.trial.lastResult = frame;
          this.trial.attemptsLeft = frame.remaining;
          if (frame.outcome === "correct" || frame.outcome === "timeout" || frame.remaining <= 0) {
            this.trial.finished = true;
          }
        }
        break;
      }
      case "error": {
        this.lastError = frame.message;
        break;
      }
    }
  }

  /** Track what we sent, for the physical-effort ticker. */
  notePoseSent(pose: PoseSample): void {
    const prev = this.lastPose;
    if (prev) {
      const dx = pose.x - prev.x;
      const dy = pose.y - prev.y;
      const dz = pose.z - prev.z;
      this.ticker.headMovementM += Math.sqrt(dx * dx + dy * dy + dz * dz);
      this.ticker.headRotationRad += forwardAngle(prev, pose);
    }
    this.lastPose = pose;
  }

  markOpen(): void {
    this.connection = "open";
  }

  markClosed(): void {
    this.connection = "closed";
  }

  get frozen(): boolean {
    return this.connection === "closed";
  }

  /** Seconds left in the running trial, never negative. */
  remainingTimeS(): number | null {
    const t = this.trial;
    if (!t || t.startT === null || !this.lastView) return t ? t.timeLimitS : null;
    const elapsed = (this.lastView.t - t.startT) / 1000;
    return Math.max(0, t.timeLimitS - elapsed);
  }

  get inputEnabled(): boolean {
    return this.connection === "open" && (!this.trial || !this.trial.finished);
  }
}

function forwardAngle(a: PoseSample, b: PoseSample): number {
  const fa = forward(a);
  const fb = forward(b);
  const dot = Math.min(1, Math.max(-1, fa[0] * fb[0] + fa[1] * fb[1] + fa[2] * fb[2]));
  return Math.acos(dot);
}

function forward(p: PoseSample): [number, number, number] {
  const cp = Math.cos(p.pitch);
  return [cp * Math.sin(p.yaw), Math.sin(p.pitch), cp * Math.cos(p.yaw)];
}
