/**
 * Synthetic search image: a busy procedural backdrop with small
 * high-contrast figures planted at the trial target positions. Replaces
 * licensed artwork while keeping the find-the-target task intact.
 */

import { REF_IMAGE_H, REF_IMAGE_W } from "./render.js";
import type { TrialTarget } from "./protocol.js";

export interface TargetSpec extends TrialTarget {
  color: string;
}

const PALETTE = ["#e23b3b", "#3b6fe2", "#2da44e", "#b36ae2"];

/** Deterministic PRNG so a seed always produces the same scene. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randomTargets(seed: number, names = ["wally", "wenda", "wizard", "odlaw"]): TargetSpec[] {
  const rnd = mulberry32(seed);
  return names.map((name, i) => ({
    name,
    u: 0.08 + 0.84 * rnd(),
    v: 0.08 + 0.84 * rnd(),
    color: PALETTE[i % PALETTE.length],
  }));
}

export function renderSceneImage(targets: TargetSpec[], seed = 7): HTMLCanvasElement {
  const canvas = document.createElement("canvas");
  canvas.width = REF_IMAGE_W;
  canvas.height = REF_IMAGE_H;
  const ctx = canvas.getContext("2d")!;
  const rnd = mulberry32(seed);

  ctx.fillStyle = "#e8e2d0";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  // visual clutter: many small neutral shapes
  for (let i = 0; i < 6000; i++) {
    const x = rnd() * canvas.width;
    const y = rnd() * canvas.height;
    const r = 3 + rnd() * 14;
    const g = 120 + Math.floor(rnd() * 110);
    ctx.fillStyle = `rgb(${g},${g - 10},${g - 30})`;
    if (rnd() < 0.5) {
      ctx.fillRect(x, y, r, r);
    } else {
      ctx.beginPath();
      ctx.arc(x, y, r / 2, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  for (const t of targets) {
    drawFigure(ctx, t.u * canvas.width, t.v * canvas.height, t.color);
  }
  return canvas;
}

function drawFigure(ctx: CanvasRenderingContext2D, x: number, y: number, color: string): void {
  ctx.save();
  ctx.translate(x, y);
  // tiny striped figure, readable only when zoomed in
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(-7, -18, 14, 30);
  ctx.fillStyle = color;
  for (let i = 0; i < 3; i++) ctx.fillRect(-7, -18 + 10 * i, 14, 5);
  ctx.beginPath();
  ctx.fillStyle = "#f1c27d";
  ctx.arc(0, -24, 7, 0, 2 * Math.PI);
  ctx.fill();
  ctx.restore();
}
