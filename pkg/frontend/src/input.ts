/**
 * Head-motion simulation from desktop input.
 *
 * Mouse position maps to yaw/pitch, the wheel and W/S keys drive the
 * lean coordinate, Q/E roll the head. Outputs are clamped to the
 * simulated calibration limits before they ever reach the wire, so the
 * server sees a plausible head.
 */

import type { PoseSample } from "./protocol.js";

export interface InputConfig {
  /** radians of yaw from canvas center to horizontal edge */
  yawScale: number;
  /** radians of pitch from canvas center to vertical edge */
  pitchScale: number;
  /** lean units (0..1) per wheel notch */
  wheelLeanStep: number;
  /** lean units per second while a lean key is held */
  keyLeanRate: number;
  /** radians per second while a roll key is held */
  rollRate: number;
  forwardLimitM: number;
  backwardLimitM: number;
  eyeHeightM: number;
}

export const DEFAULT_INPUT: InputConfig = {
  yawScale: 0.5,
  pitchScale: 0.28,
  wheelLeanStep: 0.04,
  keyLeanRate: 0.5,
  rollRate: 1.2,
  forwardLimitM: 0.3,
  backwardLimitM: 0.3,
  eyeHeightM: 1.6,
};

const clamp = (v: number, lo: number, hi: number) => Math.min(Math.max(v, lo), hi);

export class InputMapper {
  private yaw = 0;
  private pitch = 0;
  private roll = 0;
  private lean = 0.5; // normalized: 0 back limit, 0.5 neutral, 1 forward limit
  private leanKey = 0; // -1, 0, +1
  private rollKey = 0;

  constructor(readonly config: InputConfig = DEFAULT_INPUT) {}

  /** nx/ny are the pointer position normalized to [0,1] over the canvas. */
  pointerMoved(nx: number, ny: number): void {
    this.yaw = clamp((nx - 0.5) * 2, -1, 1) * this.config.yawScale;
    this.pitch = clamp((0.5 - ny) * 2, -1, 1) * this.config.pitchScale;
  }

  wheel(deltaY: number): void {
    const notches = -deltaY / 100; // wheel up leans in
    this.lean = clamp(this.lean + notches * this.config.wheelLeanStep, 0, 1);
  }

  keyChanged(key: string, down: boolean): void {
    const k = key.toLowerCase();
    if (k === "w" || k === "arrowup") this.leanKey = down ? 1 : 0;
    else if (k === "s" || k === "arrowdown") this.leanKey = down ? -1 : 0;
    else if (k === "q") this.rollKey = down ? 1 : 0;
    else if (k === "e") this.rollKey = down ? -1 : 0;
  }

  /** Advance held-key integration by dt seconds. */
  tick(dtS: number): void {
    if (this.leanKey !== 0) {
      this.lean = clamp(this.lean + this.leanKey * this.config.keyLeanRate * dtS, 0, 1);
    }
    if (this.rollKey !== 0) {
      this.roll = clamp(
        this.roll + this.rollKey * this.config.rollRate * dtS,
        -Math.PI,
        Math.PI
      );
    }
  }

  get leanX(): number {
    return this.lean;
  }

  setLean(x: number): void {
    this.lean = clamp(x, 0, 1);
  }

  /** Current simulated head pose; lean rides the +Z axis from neutral. */
  pose(tMs: number): PoseSample {
    const c = this.config;
    const z =
      this.lean >= 0.5
        ? ((this.lean - 0.5) / 0.5) * c.forwardLimitM
        : (-(0.5 - this.lean) / 0.5) * c.backwardLimitM;
    return {
      t: tMs,
      x: 0,
      y: c.eyeHeightM,
      z,
      yaw: this.yaw,
      pitch: this.pitch,
      roll: this.roll,
    };
  }
}
