// Operator input: virtual stick (pointer drag), keyboard, and gamepad, all
// mapped to the normalized stick of the input message. The pure mapping
// functions are kept separate from the DOM wiring so they can be tested.

import { InputMessage } from "./protocol.js";

export interface KeyState {
  forward: boolean;
  back: boolean;
  left: boolean;
  right: boolean;
  yawLeft: boolean;
  yawRight: boolean;
}

export function emptyKeys(): KeyState {
  return { forward: false, back: false, left: false, right: false, yawLeft: false, yawRight: false };
}

function clamp1(v: number): number {
  return Math.min(1, Math.max(-1, v));
}

/**
 * Pointer displacement (px, screen coordinates) to normalized stick.
 * Widget up is "forward" (stick x), widget left is the stylus' left
 * (stick y). The widget clamps to its radius = the workspace limit.
 */
export function pointerToStick(dxPx: number, dyPx: number, widgetRadiusPx: number): [number, number] {
  let sx = -dyPx / widgetRadiusPx;
  let sy = -dxPx / widgetRadiusPx;
  const mag = Math.hypot(sx, sy);
  if (mag > 1) {
    sx /= mag;
    sy /= mag;
  }
  return [sx + 0, sy + 0]; // normalize -0 for exact comparisons
}

/** Held movement keys to a unit-magnitude stick command. */
export function keysToStick(keys: KeyState): [number, number] {
  let sx = (keys.forward ? 1 : 0) - (keys.back ? 1 : 0);
  let sy = (keys.left ? 1 : 0) - (keys.right ? 1 : 0);
  const mag = Math.hypot(sx, sy);
  if (mag > 1) {
    sx /= mag;
    sy /= mag;
  }
  return [clamp1(sx), clamp1(sy)];
}

/** Counterclockwise button wins ties at 0. */
export function keysToYaw(keys: KeyState): -1 | 0 | 1 {
  if (keys.yawLeft && !keys.yawRight) return 1;
  if (keys.yawRight && !keys.yawLeft) return -1;
  return 0;
}

/** Gamepad axes pass straight through (axis 0 -> stick x, axis 1 -> stick y). */
export function gamepadToStick(axes: readonly number[], deadzone = 0.05): [number, number] {
  const sx = Math.abs(axes[0] ?? 0) < deadzone ? 0 : clamp1(axes[0] ?? 0);
  const sy = Math.abs(axes[1] ?? 0) < deadzone ? 0 : clamp1(axes[1] ?? 0);
  return [sx, sy];
}

/** Highest-magnitude source wins; keyboard yaw is additive. */
export function composeInput(
  pointer: [number, number] | null,
  keys: KeyState,
  gamepadAxes: readonly number[] | null,
  seq: number,
  now: number
): InputMessage {
  const candidates: [number, number][] = [];
  if (pointer) candidates.push(pointer);
  candidates.push(keysToStick(keys));
  if (gamepadAxes) candidates.push(gamepadToStick(gamepadAxes));
  let stick: [number, number] = [0, 0];
  let best = 0;
  for (const c of candidates) {
    const m = Math.hypot(c[0], c[1]);
    if (m > best) {
      best = m;
      stick = c;
    }
  }
  return { type: "input", stick, yaw_button: keysToYaw(keys), seq, t_client: now };
}

const KEYMAP: Record<string, keyof KeyState> = {
  KeyW: "forward",
  ArrowUp: "forward",
  KeyS: "back",
  ArrowDown: "back",
  KeyA: "left",
  ArrowLeft: "left",
  KeyD: "right",
  ArrowRight: "right",
  KeyQ: "yawLeft",
  KeyE: "yawRight",
};

/** DOM wiring: tracks pointer drags on the stick widget plus key state, and
 * emits input messages at a fixed rate while any source is active. */
export class InputCapture {
  keys = emptyKeys();
  pointer: [number, number] | null = null;
  seq = 0;
  private timer: number | null = null;

  constructor(
    private widget: HTMLElement,
    private widgetRadiusPx: number,
    private emit: (msg: InputMessage) => void,
    private periodMs = 25 // >= 30 Hz while active
  ) {}

  start(): void {
    this.widget.addEventListener("pointerdown", this.onPointerDown);
    window.addEventListener("pointermove", this.onPointerMove);
    window.addEventListener("pointerup", this.onPointerUp);
    window.addEventListener("keydown", this.onKey(true));
    window.addEventListener("keyup", this.onKey(false));
    this.timer = window.setInterval(() => this.tick(), this.periodMs);
  }

  private dragging = false;

  private center(): [number, number] {
    const r = this.widget.getBoundingClientRect();
    return [r.left + r.width / 2, r.top + r.height / 2];
  }

  private onPointerDown = (ev: PointerEvent) => {
    this.dragging = true;
    this.onPointerMove(ev);
  };

  private onPointerMove = (ev: PointerEvent) => {
    if (!this.dragging) return;
    const [cx, cy] = this.center();
    this.pointer = pointerToStick(ev.clientX - cx, ev.clientY - cy, this.widgetRadiusPx);
  };

  private onPointerUp = () => {
    this.dragging = false;
    this.pointer = null; // spring return to center
  };

  private onKey = (down: boolean) => (ev: KeyboardEvent) => {
    const key = KEYMAP[ev.code];
    if (key) {
      this.keys[key] = down;
      ev.preventDefault();
    }
  };

  private tick(): void {
    const pads = typeof navigator !== "undefined" && navigator.getGamepads ? navigator.getGamepads() : [];
    const pad = pads && pads[0] ? pads[0] : null;
    const msg = composeInput(this.pointer, this.keys, pad ? pad.axes : null, ++this.seq, performance.now());
    this.emit(msg);
  }

  stop(): void {
    if (this.timer !== null) window.clearInterval(this.timer);
  }
}

/** Rumble magnitude mirrors the rendered force as a fraction of the cap. */
export function rumbleMagnitude(force: [number, number], fMax: number): number {
  return Math.min(1, Math.hypot(force[0], force[1]) / fMax);
}
