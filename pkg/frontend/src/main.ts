/**
 * Demo app bootstrap: canvas, HUD, input bindings and the live session.
 */

import { SessionClient } from "./client.js";
import { DEFAULT_INPUT, InputMapper } from "./input.js";
import { formatAttempt, formatMode, formatTrial } from "./protocol.js";
import { drawFrame } from "./render.js";
import { randomTargets, renderSceneImage } from "./targets.js";
import { SessionView } from "./viewmodel.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const hud = document.getElementById("hud")!;
const banner = document.getElementById("banner")!;

const params = new URLSearchParams(location.search);
const wsUrl = params.get("ws") ?? `ws://${location.hostname || "127.0.0.1"}:8000/ws`;
const seed = Number(params.get("seed") ?? "7");

const input = new InputMapper(DEFAULT_INPUT);
const view = new SessionView();
const targets = randomTargets(seed);
const scene = renderSceneImage(targets, seed);

function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  render();
}
window.addEventListener("resize", resize);

function render(): void {
  if (view.lastView) {
    drawFrame(ctx, scene, view.lastView);
  } else {
    ctx.fillStyle = "#14161a";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
  }
  renderHud();
}

function renderHud(): void {
  const v = view.lastView;
  const t = view.trial;
  const remaining = view.remainingTimeS();
  const lines = [
    `mode ${v ? v.mode : "-"}  zoom ${v ? v.zoom.toFixed(2) : "-"}  lean ${v ? v.leanX.toFixed(2) : "-"}`,
    t
      ? `trial ${t.imageId}: ${t.attemptsLeft} attempts, ${remaining === null ? "-" : Math.ceil(remaining)} s left` +
        (t.lastResult ? `  [${t.lastResult.outcome}]` : "")
      : "no trial (press T)",
    `moved ${view.ticker.headMovementM.toFixed(2)} m  rotated ${view.ticker.headRotationRad.toFixed(2)} rad  zoomed ${view.ticker.zoomDistance.toFixed(2)}`,
  ];
  hud.textContent = lines.join("\n");
  banner.textContent =
    view.connection === "open" ? "" : view.connection === "connecting" ? "connecting..." : "connection lost, view frozen";
  banner.className = view.connection === "open" ? "hidden" : "shown";
}

const client = new SessionClient({ url: wsUrl, input, view, onFrame: render });

canvas.addEventListener("mousemove", (ev) => {
  const r = canvas.getBoundingClientRect();
  input.pointerMoved((ev.clientX - r.left) / r.width, (ev.clientY - r.top) / r.height);
});
canvas.addEventListener(
  "wheel",
  (ev) => {
    ev.preventDefault();
    input.wheel(ev.deltaY);
  },
  { passive: false }
);
window.addEventListener("keydown", (ev) => {
  if (ev.key === "1") client.send(formatMode("static"));
  else if (ev.key === "2") client.send(formatMode("parallel"));
  else if (ev.key === "3") client.send(formatMode("tilt"));
  else if (ev.key.toLowerCase() === "t") client.send(formatTrial(`scene-${seed}`, targets));
  else input.keyChanged(ev.key, true);
});
window.addEventListener("keyup", (ev) => input.keyChanged(ev.key, false));
canvas.addEventListener("click", () => {
  if (view.lastView && view.inputEnabled && view.trial && !view.trial.finished) {
    client.send(formatAttempt(view.lastView.cursorU, view.lastView.cursorV));
  }
});

resize();
client.start();
