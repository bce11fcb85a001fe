// View state: the latest telemetry merged with world geometry and widget
// scale math. Rendering is a pure function of this object.

import { TelemetryMessage, WorldGeometry } from "./protocol.js";

export type Condition = "N" | "PRF" | "CBF";

export interface ViewModel {
  world: WorldGeometry | null;
  telemetry: TelemetryMessage | null;
  trail: [number, number][];
  condition: Condition;
  connected: boolean;
  sessionId: string | null;
  fps: number;
  /** Trial clock in seconds, derived from telemetry timestamps. */
  trialClock: number;
  lastError: string | null;
}

export function initialViewModel(): ViewModel {
  return {
    world: null,
    telemetry: null,
    trail: [],
    condition: "CBF",
    connected: false,
    sessionId: null,
    fps: 0,
    trialClock: 0,
    lastError: null,
  };
}

const TRAIL_LIMIT = 600;

export function applyTelemetry(vm: ViewModel, msg: TelemetryMessage): ViewModel {
  const trail =
    msg.phase === "Running" || msg.phase === "Succeeded" || msg.phase === "Failed"
      ? [...vm.trail, [msg.pose.x, msg.pose.y] as [number, number]].slice(-TRAIL_LIMIT)
      : vm.trail;
  const start = vm.telemetry?.phase === "Idle" && msg.phase === "Running" ? msg.t : null;
  return {
    ...vm,
    telemetry: msg,
    trail: msg.phase === "Idle" ? [] : trail,
    trialClock: msg.phase === "Running" ? (start !== null ? 0 : vm.trialClock + 0.02) : vm.trialClock,
  };
}

export function resetTrial(vm: ViewModel): ViewModel {
  return { ...vm, telemetry: null, trail: [], trialClock: 0 };
}

// -- widget scale arithmetic --------------------------------------------------

/** Pixels per cm of interface travel for a stick widget of the given radius. */
export function widgetScale(widgetRadiusPx: number, workspaceCm: number): number {
  return widgetRadiusPx / workspaceCm;
}

/** Drawn radius of the deadzone ring, honouring the active scale factor. */
export function deadzoneRingRadiusPx(
  widgetRadiusPx: number,
  workspaceCm: number,
  deadzoneCm: number
): number {
  return deadzoneCm * widgetScale(widgetRadiusPx, workspaceCm);
}

/** World meters to canvas pixels; y flipped so north is up. */
export function worldToCanvas(
  world: WorldGeometry,
  canvasW: number,
  canvasH: number
): { scale: number; toPx: (x: number, y: number) => [number, number] } {
  const [xmin, ymin, xmax, ymax] = world.outer;
  const margin = 12;
  const scale = Math.min(
    (canvasW - 2 * margin) / (xmax - xmin),
    (canvasH - 2 * margin) / (ymax - ymin)
  );
  const ox = (canvasW - scale * (xmax - xmin)) / 2;
  const oy = (canvasH - scale * (ymax - ymin)) / 2;
  return {
    scale,
    toPx: (x: number, y: number) => [ox + (x - xmin) * scale, canvasH - oy - (y - ymin) * scale],
  };
}

/** Force arrow length in pixels, saturating at the interface cap. */
export function forceArrowPx(forceN: [number, number], fMax: number, maxPx: number): [number, number] {
  const mag = Math.hypot(forceN[0], forceN[1]);
  if (mag === 0) return [0, 0];
  const px = (Math.min(mag, fMax) / fMax) * maxPx;
  return [(forceN[0] / mag) * px, (forceN[1] / mag) * px];
}

export type TargetState = "visited" | "next" | "pending";

export function targetState(index: number, nextTarget: number): TargetState {
  if (index < nextTarget) return "visited";
  if (index === nextTarget) return "next";
  return "pending";
}
