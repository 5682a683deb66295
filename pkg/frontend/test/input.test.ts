import { describe, expect, it } from "vitest";

import { DEFAULT_INPUT, InputMapper } from "../src/input.js";

describe("InputMapper", () => {
  it("maps pointer center to zero yaw/pitch", () => {
    const m = new InputMapper();
    m.pointerMoved(0.5, 0.5);
    const p = m.pose(0);
    expect(p.yaw).toBe(0);
    expect(p.pitch).toBe(0);
  });

  it("maps pointer edges to the configured angle scales", () => {
    const m = new InputMapper();
    m.pointerMoved(1.0, 0.0);
    const p = m.pose(0);
    expect(p.yaw).toBeCloseTo(DEFAULT_INPUT.yawScale, 12);
    expect(p.pitch).toBeCloseTo(DEFAULT_INPUT.pitchScale, 12);
    m.pointerMoved(-0.2, 1.4); // outside the canvas clamps
    const q = m.pose(0);
    expect(q.yaw).toBeCloseTo(-DEFAULT_INPUT.yawScale, 12);
    expect(q.pitch).toBeCloseTo(-DEFAULT_INPUT.pitchScale, 12);
  });

  it("wheel leans in and clamps at the forward limit", () => {
    const m = new InputMapper();
    for (let i = 0; i < 100; i++) m.wheel(-100);
    expect(m.leanX).toBe(1);
    expect(m.pose(0).z).toBeCloseTo(DEFAULT_INPUT.forwardLimitM, 12);
    for (let i = 0; i < 200; i++) m.wheel(100);
    expect(m.leanX).toBe(0);
    expect(m.pose(0).z).toBeCloseTo(-DEFAULT_INPUT.backwardLimitM, 12);
  });

  it("held key reaches full forward lean in bounded time", () => {
    const m = new InputMapper();
    m.keyChanged("w", true);
    let t = 0;
    while (m.leanX < 1 && t < 10) {
      m.tick(1 / 60);
      t += 1 / 60;
    }
    expect(m.leanX).toBe(1);
    expect(t).toBeLessThan(2.0); // 0.5 lean at 0.5/s, plus slack
  });

  it("roll keys integrate and clamp", () => {
    const m = new InputMapper();
    m.keyChanged("q", true);
    m.tick(0.25);
    expect(m.pose(0).roll).toBeCloseTo(0.25 * DEFAULT_INPUT.rollRate, 12);
    m.keyChanged("q", false);
    m.keyChanged("e", true);
    for (let i = 0; i < 1000; i++) m.tick(0.1);
    expect(m.pose(0).roll).toBe(-Math.PI);
  });

  it("pose keeps the simulated eye height", () => {
    const m = new InputMapper();
    expect(m.pose(5).y).toBe(DEFAULT_INPUT.eyeHeightM);
    expect(m.pose(5).t).toBe(5);
  });
});
