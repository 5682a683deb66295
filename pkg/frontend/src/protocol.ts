/**
 * Text frames of the live session protocol. One frame per WebSocket
 * message; fields are space separated. The server is the single source
 * of truth: the client never computes zoom or pan locally, it only
 * renders VIEW frames.
 */

export interface ViewFrame {
  kind: "view";
  t: number;
  mode: string;
  zoom: number;
  panU: number;
  panV: number;
  leanX: number;
  planeYaw: number;
  planePitch: number;
  planeRoll: number;
  cursorU: number;
  cursorV: number;
}

export interface ResultFrame {
  kind: "result";
  outcome: "correct" | "wrong" | "timeout";
  remaining: number;
}

export interface TrialTarget {
  name: string;
  u: number;
  v: number;
}

export interface TrialFrame {
  kind: "trial";
  imageId: string;
  timeLimitS: number;
  maxAttempts: number;
  targets: TrialTarget[];
}

export interface ErrorFrame {
  kind: "error";
  message: string;
}

export type ServerFrame = ViewFrame | ResultFrame | TrialFrame | ErrorFrame;

export interface PoseSample {
  t: number;
  x: number;
  y: number;
  z: number;
  yaw: number;
  pitch: number;
  roll: number;
}

export function parseFrame(line: string): ServerFrame | null {
  const parts = line.trim().split(/\s+/);
  if (parts.length === 0 || parts[0] === "") return null;
  switch (parts[0]) {
    case "VIEW": {
      if (parts.length !== 12) return null;
      const nums = parts.slice(3).map(Number);
      const t = Number(parts[1]);
      if (!isFinite(t) || nums.some((n) => !isFinite(n))) return null;
      return {
        kind: "view",
        t,
        mode: parts[2],
        zoom: nums[0],
        panU: nums[1],
        panV: nums[2],
        leanX: nums[3],
        planeYaw: nums[4],
        planePitch: nums[5],
        planeRoll: nums[6],
        cursorU: nums[7],
        cursorV: nums[8],
      };
    }
    case "RESULT": {
      if (parts.length !== 3) return null;
      const outcome = parts[1];
      if (outcome !== "correct" && outcome !== "wrong" && outcome !== "timeout") return null;
      const remaining = Number(parts[2]);
      if (!isFinite(remaining)) return null;
      return { kind: "result", outcome, remaining };
    }
    case "TRIAL": {
      if (parts.length < 7 || (parts.length - 4) % 3 !== 0) return null;
      const timeLimitS = Number(parts[2]);
      const maxAttempts = Number(parts[3]);
      if (!isFinite(timeLimitS) || !isFinite(maxAttempts)) return null;
      const targets: TrialTarget[] = [];
      for (let i = 4; i < parts.length; i += 3) {
        const u = Number(parts[i + 1]);
        const v = Number(parts[i + 2]);
        if (!isFinite(u) || !isFinite(v)) return null;
        targets.push({ name: parts[i], u, v });
      }
      return { kind: "trial", imageId: parts[1], timeLimitS, maxAttempts, targets };
    }
    case "ERR":
      return { kind: "error", message: parts.slice(1).join(" ") };
    default:
      return null;
  }
}

export function formatPose(p: PoseSample): string {
  return `POSE ${p.t} ${p.x} ${p.y} ${p.z} ${p.yaw} ${p.pitch} ${p.roll}`;
}

export function formatMode(mode: "static" | "parallel" | "tilt"): string {
  return `MODE ${mode}`;
}

export function formatCalib(
  neutral: { x: number; y: number; z: number; yaw: number; pitch: number; roll: number },
  forwardLimitM: number,
  backwardLimitM: number
): string {
  return (
    `CALIB ${neutral.x} ${neutral.y} ${neutral.z} ` +
    `${neutral.yaw} ${neutral.pitch} ${neutral.roll} ${forwardLimitM} ${backwardLimitM}`
  );
}

export function formatAttempt(u: number, v: number): string {
  return `ATTEMPT ${u} ${v}`;
}

export function formatTrial(imageId: string, targets: TrialTarget[]): string {
  const body = targets.map((t) => `${t.name} ${t.u} ${t.v}`).join(" ");
  return `TRIAL ${imageId} ${body}`;
}
