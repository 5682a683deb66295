import { describe, expect, it } from "vitest";

import {
  computeTransform,
  REF_IMAGE_H,
  REF_IMAGE_W,
  ringRadiusScreenPx,
  screenToUv,
  uvToScreen,
} from "../src/render.js";
import type { ViewFrame } from "../src/protocol.js";

function view(partial: Partial<ViewFrame> = {}): ViewFrame {
  return {
    kind: "view",
    t: 0,
    mode: "parallel",
    zoom: 1,
    panU: 0.5,
    panV: 0.5,
    leanX: 0.5,
    planeYaw: 0,
    planePitch: 0,
    planeRoll: 0,
    cursorU: 0.5,
    cursorV: 0.5,
    ...partial,
  };
}

describe("computeTransform", () => {
  it("fits the whole image at zoom 1, centered pan", () => {
    const t = computeTransform(view(), 1400, 874.5);
    expect(t.scale).toBeCloseTo(0.5, 12);
    const [sx, sy] = uvToScreen(t, 0, 0);
    expect(sx).toBeCloseTo(0, 9);
    expect(sy).toBeCloseTo(0, 9);
    const [ex, ey] = uvToScreen(t, 1, 1);
    expect(ex).toBeCloseTo(1400, 9);
    expect(ey).toBeCloseTo(874.5, 9);
  });

  it("zoom 2 about pan (0.25, 0.25) fills the view with the upper-left quadrant", () => {
    const t = computeTransform(view({ zoom: 2, panU: 0.25, panV: 0.25 }), 1400, 874.5);
    const [x0, y0] = uvToScreen(t, 0, 0);
    const [x1, y1] = uvToScreen(t, 0.5, 0.5);
    expect(x0).toBeCloseTo(0, 9);
    expect(y0).toBeCloseTo(0, 9);
    expect(x1).toBeCloseTo(1400, 9);
    expect(y1).toBeCloseTo(874.5, 9);
  });

  it("applies plane roll only in tilt mode", () => {
    const roll = (15 * Math.PI) / 180;
    const tilt = computeTransform(view({ mode: "tilt", planeRoll: roll }), 800, 600);
    const parallel = computeTransform(view({ mode: "parallel", planeRoll: roll }), 800, 600);
    expect(tilt.rotation).toBeCloseTo(roll, 12);
    expect(parallel.rotation).toBe(0);
  });

  it("ring radius scales with the zoomed image", () => {
    const t1 = computeTransform(view({ zoom: 1 }), 2800, 1749);
    const t4 = computeTransform(view({ zoom: 4 }), 2800, 1749);
    expect(ringRadiusScreenPx(t1)).toBeCloseTo(105, 9);
    expect(ringRadiusScreenPx(t4)).toBeCloseTo(420, 9);
  });
});

describe("screen/uv round trip", () => {
  it("stays within 1 px over random views and points", () => {
    let worst = 0;
    let seed = 12345;
    const rnd = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let i = 0; i < 500; i++) {
      const v = view({
        zoom: 1 + rnd() * 7,
        panU: rnd(),
        panV: rnd(),
        mode: rnd() < 0.5 ? "tilt" : "parallel",
        planeRoll: (rnd() - 0.5) * 1.2,
      });
      const t = computeTransform(v, 640 + rnd() * 1280, 480 + rnd() * 720);
      const sx = rnd() * t.canvasW;
      const sy = rnd() * t.canvasH;
      const [u, vv] = screenToUv(t, sx, sy);
      const [bx, by] = uvToScreen(t, u, vv);
      worst = Math.max(worst, Math.hypot(bx - sx, by - sy));
    }
    expect(worst).toBeLessThan(1.0);
  });

  it("maps cursor uv to the canvas center when cursor equals pan", () => {
    const t = computeTransform(view({ zoom: 3.3, panU: 0.62, panV: 0.4, cursorU: 0.62, cursorV: 0.4 }), 1000, 700);
    const [cx, cy] = uvToScreen(t, 0.62, 0.4);
    expect(cx).toBeCloseTo(500, 9);
    expect(cy).toBeCloseTo(350, 9);
  });

  it("uses the reference image dimensions by default", () => {
    expect(REF_IMAGE_W).toBe(2800);
    expect(REF_IMAGE_H).toBe(1749);
  });
});
