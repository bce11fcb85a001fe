// Operator console wiring: session controls, input capture, render loop.

import { TeleopClient } from "./client.js";
import { InputCapture, rumbleMagnitude } from "./input.js";
import { renderFrame } from "./render.js";
import {
  applyTelemetry,
  Condition,
  deadzoneRingRadiusPx,
  initialViewModel,
  resetTrial,
} from "./viewmodel.js";

const WORKSPACE_CM = 8;
const DEADZONE_CM = 1;
const F_MAX = 3.3;
const WIDGET_RADIUS_PX = 70;

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const stickWidget = document.getElementById("stick") as HTMLCanvasElement;
const stickCtx = stickWidget.getContext("2d")!;
const banner = document.getElementById("banner") as HTMLDivElement;
const fpsLabel = document.getElementById("fps") as HTMLSpanElement;
const logLink = document.getElementById("loglink") as HTMLAnchorElement;

let vm = initialViewModel();
const client = new TeleopClient();
let lastStick: [number, number] = [0, 0];

client.onStatus = (connected) => {
  vm = { ...vm, connected };
  banner.style.display = connected ? "none" : "block";
};

client.onMessage = (msg) => {
  if (msg.type === "telemetry") {
    vm = applyTelemetry(vm, msg);
    const pads = navigator.getGamepads ? navigator.getGamepads() : [];
    const pad = pads && pads[0];
    const actuator = pad && (pad as any).vibrationActuator;
    if (actuator && Math.hypot(...msg.force) > 0.01) {
      actuator.playEffect("dual-rumble", {
        duration: 40,
        strongMagnitude: rumbleMagnitude(msg.force, F_MAX),
        weakMagnitude: rumbleMagnitude(msg.force, F_MAX),
      });
    }
  } else if (msg.type === "error") {
    vm = { ...vm, lastError: msg.error };
    console.warn("server error:", msg.error);
  }
};

async function startSession(condition: Condition): Promise<void> {
  const ack = await client.configure({ world: "default", condition });
  vm = resetTrial({ ...vm, condition, sessionId: ack.session_id });
  vm.world = await client.worldGeometry("default");
  logLink.href = client.logUrl(ack.session_id);
  logLink.style.display = "inline";
}

for (const condition of ["N", "PRF", "CBF"] as Condition[]) {
  document.getElementById(`btn-${condition}`)!.addEventListener("click", () => {
    startSession(condition).catch((err) => console.error(err));
  });
}

const capture = new InputCapture(
  stickWidget,
  WIDGET_RADIUS_PX,
  (msg) => {
    lastStick = msg.stick;
    // suppressed while disconnected
    if (vm.connected) client.sendInput(msg);
  },
  25
);
capture.start();

function drawStickWidget(): void {
  const w = stickWidget.width;
  const h = stickWidget.height;
  stickCtx.clearRect(0, 0, w, h);
  stickCtx.strokeStyle = "#3b4a5f";
  stickCtx.lineWidth = 2;
  stickCtx.beginPath();
  stickCtx.arc(w / 2, h / 2, WIDGET_RADIUS_PX, 0, 2 * Math.PI);
  stickCtx.stroke();
  // deadzone ring drawn to scale
  stickCtx.beginPath();
  stickCtx.strokeStyle = "#55606e";
  stickCtx.setLineDash([3, 3]);
  stickCtx.arc(w / 2, h / 2, deadzoneRingRadiusPx(WIDGET_RADIUS_PX, WORKSPACE_CM, DEADZONE_CM), 0, 2 * Math.PI);
  stickCtx.stroke();
  stickCtx.setLineDash([]);
  // knob: stick x is forward (screen up), stick y is left (screen left)
  const kx = w / 2 - lastStick[1] * WIDGET_RADIUS_PX;
  const ky = h / 2 - lastStick[0] * WIDGET_RADIUS_PX;
  stickCtx.beginPath();
  stickCtx.fillStyle = "#53c7f0";
  stickCtx.arc(kx, ky, 9, 0, 2 * Math.PI);
  stickCtx.fill();
}

let frames = 0;
let lastFpsStamp = performance.now();

function loop(): void {
  renderFrame(ctx, vm, canvas.width, canvas.height, F_MAX);
  drawStickWidget();
  frames += 1;
  const now = performance.now();
  if (now - lastFpsStamp >= 1000) {
    vm = { ...vm, fps: frames };
    fpsLabel.textContent = `${frames} fps`;
    frames = 0;
    lastFpsStamp = now;
  }
  requestAnimationFrame(loop);
}

client.connect();
startSession("CBF").catch(() => {
  // server may not have a session yet; the buttons retry
});
requestAnimationFrame(loop);
