/**
 * View-to-canvas transform math.
 *
 * The image is drawn as a dolly zoom: scaled about the pan target, which
 * is pinned to the canvas center, and rotated by the plane roll in tilt
 * mode. All interaction state comes from the last VIEW frame.
 */

import type { ViewFrame } from "./protocol.js";

/** Ring radius in reference-image pixels (matches the engine's hit test). */
export const RING_RADIUS_IMAGE_PX = 105;
export const REF_IMAGE_W = 2800;
export const REF_IMAGE_H = 1749;

export interface Transform {
  /** screen pixels per image pixel */
  scale: number;
  /** rotation applied about the canvas center, radians */
  rotation: number;
  /** image-pixel point pinned to the canvas center */
  pivotX: number;
  pivotY: number;
  canvasW: number;
  canvasH: number;
}

export function computeTransform(
  view: ViewFrame,
  canvasW: number,
  canvasH: number,
  imageW: number = REF_IMAGE_W,
  imageH: number = REF_IMAGE_H
): Transform {
  const fit = Math.min(canvasW / imageW, canvasH / imageH);
  return {
    scale: fit * view.zoom,
    rotation: view.mode === "tilt" ? view.planeRoll : 0,
    pivotX: view.panU * imageW,
    pivotY: view.panV * imageH,
    canvasW,
    canvasH,
  };
}

export function imageToScreen(t: Transform, px: number, py: number): [number, number] {
  const dx = (px - t.pivotX) * t.scale;
  const dy = (py - t.pivotY) * t.scale;
  const cos = Math.cos(t.rotation);
  const sin = Math.sin(t.rotation);
  return [
    t.canvasW / 2 + dx * cos - dy * sin,
    t.canvasH / 2 + dx * sin + dy * cos,
  ];
}

export function screenToImage(t: Transform, sx: number, sy: number): [number, number] {
  const dx = sx - t.canvasW / 2;
  const dy = sy - t.canvasH / 2;
  const cos = Math.cos(-t.rotation);
  const sin = Math.sin(-t.rotation);
  const rx = dx * cos - dy * sin;
  const ry = dx * sin + dy * cos;
  return [t.pivotX + rx / t.scale, t.pivotY + ry / t.scale];
}

export function uvToScreen(t: Transform, u: number, v: number, imageW = REF_IMAGE_W, imageH = REF_IMAGE_H): [number, number] {
  return imageToScreen(t, u * imageW, v * imageH);
}

export function screenToUv(t: Transform, sx: number, sy: number, imageW = REF_IMAGE_W, imageH = REF_IMAGE_H): [number, number] {
  const [px, py] = screenToImage(t, sx, sy);
  return [px / imageW, py / imageH];
}

export function ringRadiusScreenPx(t: Transform): number {
  return RING_RADIUS_IMAGE_PX * t.scale;
}

/** Draw one frame: image under the transform, ring at the cursor. */
export function drawFrame(
  ctx: CanvasRenderingContext2D,
  image: CanvasImageSource,
  view: ViewFrame,
  imageW: number = REF_IMAGE_W,
  imageH: number = REF_IMAGE_H
): Transform {
  const t = computeTransform(view, ctx.canvas.width, ctx.canvas.height, imageW, imageH);
  ctx.save();
  ctx.fillStyle = "#14161a";
  ctx.fillRect(0, 0, t.canvasW, t.canvasH);
  ctx.translate(t.canvasW / 2, t.canvasH / 2);
  ctx.rotate(t.rotation);
  ctx.scale(t.scale, t.scale);
  ctx.translate(-t.pivotX, -t.pivotY);
  ctx.drawImage(image, 0, 0, imageW, imageH);
  ctx.restore();

  const [cx, cy] = uvToScreen(t, view.cursorU, view.cursorV, imageW, imageH);
  ctx.save();
  ctx.strokeStyle = "#e23b3b";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.arc(cx, cy, ringRadiusScreenPx(t), 0, 2 * Math.PI);
  ctx.stroke();
  ctx.restore();
  return t;
}
