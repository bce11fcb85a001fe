// Canvas rendering: top-down world view with the vehicle, targets, trail,
// force arrow and per-constraint margin bars. Pure function of the view model.

import { forceArrowPx, targetState, ViewModel, worldToCanvas } from "./viewmodel.js";

const COLORS = {
  background: "#10141a",
  wall: "#3b4a5f",
  obstacle: "#2b3850",
  obstacleEdge: "#5c7699",
  trail: "#2e7d5b",
  uav: "#53c7f0",
  heading: "#e8f4ff",
  velocity: "#9ad27d",
  force: "#ff8c42",
  targetPending: "#55606e",
  targetNext: "#ffd166",
  targetVisited: "#2e7d5b",
  text: "#dce6f2",
  barOk: "#3f9d6f",
  barActive: "#e0564a",
};

export function renderFrame(
  ctx: CanvasRenderingContext2D,
  vm: ViewModel,
  canvasW: number,
  canvasH: number,
  fMax: number
): void {
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, canvasW, canvasH);
  if (!vm.world) {
    ctx.fillStyle = COLORS.text;
    ctx.font = "16px system-ui";
    ctx.fillText(vm.connected ? "loading world…" : "connecting…", 20, 30);
    return;
  }
  const world = vm.world;
  const { scale, toPx } = worldToCanvas(world, canvasW, canvasH);

  // outer walls
  const [xmin, ymin, xmax, ymax] = world.outer;
  const [ox, oy] = toPx(xmin, ymax);
  ctx.strokeStyle = COLORS.wall;
  ctx.lineWidth = 3;
  ctx.strokeRect(ox, oy, (xmax - xmin) * scale, (ymax - ymin) * scale);

  // inner rectangles
  for (const [rx0, ry0, rx1, ry1] of world.inner) {
    const [px, py] = toPx(rx0, ry1);
    ctx.fillStyle = COLORS.obstacle;
    ctx.fillRect(px, py, (rx1 - rx0) * scale, (ry1 - ry0) * scale);
    ctx.strokeStyle = COLORS.obstacleEdge;
    ctx.lineWidth = 1.5;
    ctx.strokeRect(px, py, (rx1 - rx0) * scale, (ry1 - ry0) * scale);
  }

  // targets, numbered, with visited/next/pending states
  const nextTarget = vm.telemetry?.next_target ?? 0;
  world.targets.forEach((t, i) => {
    const [px, py] = toPx(t.center[0], t.center[1]);
    const state = targetState(i, nextTarget);
    ctx.beginPath();
    ctx.arc(px, py, t.radius * scale, 0, 2 * Math.PI);
    ctx.strokeStyle =
      state === "visited" ? COLORS.targetVisited : state === "next" ? COLORS.targetNext : COLORS.targetPending;
    ctx.lineWidth = state === "next" ? 3 : 1.5;
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.font = "12px system-ui";
    ctx.fillText(String(i + 1), px - 4, py + 4);
  });

  // trail
  if (vm.trail.length > 1) {
    ctx.beginPath();
    ctx.strokeStyle = COLORS.trail;
    ctx.lineWidth = 1;
    vm.trail.forEach(([x, y], i) => {
      const [px, py] = toPx(x, y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  const tm = vm.telemetry;
  if (tm) {
    const [px, py] = toPx(tm.pose.x, tm.pose.y);
    const r = world.uav_radius * scale;

    // velocity vector (thin)
    ctx.beginPath();
    ctx.strokeStyle = COLORS.velocity;
    ctx.lineWidth = 1.5;
    ctx.moveTo(px, py);
    ctx.lineTo(px + tm.velocity[0] * scale * 0.5, py - tm.velocity[1] * scale * 0.5);
    ctx.stroke();

    // force arrow scaled to the cap (drawn only when non-zero)
    const [fx, fy] = forceArrowPx(tm.force, fMax, 70);
    if (fx !== 0 || fy !== 0) {
      ctx.beginPath();
      ctx.strokeStyle = COLORS.force;
      ctx.lineWidth = 3;
      ctx.moveTo(px, py);
      ctx.lineTo(px + fx, py - fy);
      ctx.stroke();
      ctx.beginPath();
      ctx.fillStyle = COLORS.force;
      ctx.arc(px + fx, py - fy, 4, 0, 2 * Math.PI);
      ctx.fill();
    }

    // vehicle disk with heading tick
    ctx.beginPath();
    ctx.fillStyle = tm.contact ? COLORS.barActive : COLORS.uav;
    ctx.arc(px, py, r, 0, 2 * Math.PI);
    ctx.fill();
    ctx.beginPath();
    ctx.strokeStyle = COLORS.heading;
    ctx.lineWidth = 2;
    ctx.moveTo(px, py);
    ctx.lineTo(px + Math.cos(tm.pose.yaw) * r * 1.6, py - Math.sin(tm.pose.yaw) * r * 1.6);
    ctx.stroke();

    drawMarginBars(ctx, tm.margins, canvasW);
    drawHud(ctx, vm, canvasH);
  }
}

function drawMarginBars(ctx: CanvasRenderingContext2D, margins: number[], canvasW: number): void {
  if (!margins.length) return;
  const w = 16;
  const h = 52;
  const x0 = canvasW - margins.length * (w + 6) - 14;
  ctx.font = "10px system-ui";
  margins.forEach((m, i) => {
    // log-compress: these span many orders of magnitude
    const frac = Math.max(-1, Math.min(1, Math.sign(m) * Math.log10(1 + Math.abs(m)) / 3));
    const x = x0 + i * (w + 6);
    ctx.strokeStyle = COLORS.wall;
    ctx.strokeRect(x, 14, w, h);
    ctx.fillStyle = m < 0 ? COLORS.barActive : COLORS.barOk;
    const bh = Math.abs(frac) * (h / 2);
    if (m >= 0) ctx.fillRect(x, 14 + h / 2 - bh, w, bh);
    else ctx.fillRect(x, 14 + h / 2, w, bh);
    ctx.fillStyle = COLORS.text;
    ctx.fillText(String(i + 1), x + 4, 14 + h + 12);
  });
}

function drawHud(ctx: CanvasRenderingContext2D, vm: ViewModel, canvasH: number): void {
  const tm = vm.telemetry;
  if (!tm) return;
  ctx.fillStyle = COLORS.text;
  ctx.font = "13px system-ui";
  const lines = [
    `condition ${vm.condition}   phase ${tm.phase}   target ${Math.min(tm.next_target + 1, 5)}/5`,
    `t ${tm.t.toFixed(1)} s   |v| ${Math.hypot(...tm.velocity).toFixed(2)} m/s   |F| ${Math.hypot(...tm.force).toFixed(2)} N`,
  ];
  if (tm.metrics_so_far) {
    const m = tm.metrics_so_far;
    lines.push(
      `D ${m.D_total?.toFixed(1)} m   T ${m.T_trial?.toFixed(1)} s   Vavg ${m.V_avg?.toFixed(2)}   Tcol ${m.T_collision?.toFixed(2)}`
    );
  }
  if (tm.phase === "Succeeded") lines.push("SUCCESS - final metrics above");
  if (tm.phase === "Failed") lines.push("CRASHED - configure a new session to retry");
  lines.forEach((line, i) => ctx.fillText(line, 14, canvasH - 14 - (lines.length - 1 - i) * 18));
}
