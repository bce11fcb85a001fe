// Wire types shared with the teleoperation server. Everything travels as
// JSON text frames tagged with a `type` field.

export interface InputMessage {
  type: "input";
  /** Normalized stick in -1..1 per axis; the server scales to cm. */
  stick: [number, number];
  yaw_button: -1 | 0 | 1;
  seq: number;
  t_client: number;
}

export interface TelemetryMessage {
  type: "telemetry";
  tick: number;
  t: number;
  pose: { x: number; y: number; yaw: number };
  velocity: [number, number];
  force: [number, number];
  u_ref: [number, number];
  u_safe: [number, number];
  margins: number[];
  risk: {
    risk: number;
    direction: [number, number];
    worst_obstacle: string;
    distance: number;
  } | null;
  phase: "Idle" | "Running" | "Succeeded" | "Failed";
  next_target: number;
  contact: boolean;
  last_input_seq: number;
  metrics_so_far: Record<string, number> | null;
  trial_event?: { phase: string; fail_reason: string };
}

export interface ErrorMessage {
  type: "error";
  error: string;
}

export interface ConfigureAck {
  type: "configure";
  session_id: string;
  world: string;
  condition: string;
  mode: string;
  barriers: number;
}

export type ServerMessage = TelemetryMessage | ErrorMessage | ConfigureAck;

export interface WorldGeometry {
  schema_version: number;
  name: string;
  outer: [number, number, number, number];
  inner: [number, number, number, number][];
  targets: { center: [number, number]; radius: number }[];
  uav_radius: number;
  start_pose: { position: [number, number]; yaw: number };
}

export function encodeInput(msg: InputMessage): string {
  return JSON.stringify(msg);
}

export function decodeServerMessage(raw: string): ServerMessage {
  const data = JSON.parse(raw);
  if (typeof data !== "object" || data === null || typeof data.type !== "string") {
    throw new Error("malformed server message");
  }
  if (data.type === "telemetry") {
    if (typeof data.tick !== "number" || typeof data.pose !== "object") {
      throw new Error("malformed telemetry");
    }
    return data as TelemetryMessage;
  }
  if (data.type === "error" || data.type === "configure") {
    return data as ServerMessage;
  }
  throw new Error(`unknown message type ${data.type}`);
}
