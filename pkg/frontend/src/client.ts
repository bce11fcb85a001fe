// Server connection: HTTP session management plus the WebSocket stream.

import { decodeServerMessage, encodeInput, InputMessage, ServerMessage, WorldGeometry } from "./protocol.js";

export class TeleopClient {
  private ws: WebSocket | null = null;
  private url: string;

  onMessage: (msg: ServerMessage) => void = () => {};
  onStatus: (connected: boolean) => void = () => {};

  constructor(private base: string = "") {
    const loc = typeof window !== "undefined" ? window.location : null;
    const host = base || (loc ? `${loc.protocol}//${loc.host}` : "http://127.0.0.1:8750");
    this.base = host;
    this.url = host.replace(/^http/, "ws") + "/ws";
  }

  async listWorlds(): Promise<string[]> {
    const resp = await fetch(`${this.base}/worlds`);
    return (await resp.json()).worlds;
  }

  async worldGeometry(name: string): Promise<WorldGeometry> {
    const resp = await fetch(`${this.base}/world/${name}`);
    if (!resp.ok) throw new Error(`world ${name} not found`);
    return await resp.json();
  }

  async configure(config: { world?: string; condition?: string; mode?: string }): Promise<{
    session_id: string;
  }> {
    const resp = await fetch(`${this.base}/session`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
    if (!resp.ok) throw new Error((await resp.json()).error ?? "configure failed");
    return await resp.json();
  }

  logUrl(sessionId: string): string {
    return `${this.base}/session/${sessionId}/log`;
  }

  connect(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => this.onStatus(true);
    this.ws.onclose = () => {
      this.onStatus(false);
      setTimeout(() => this.connect(), 1000); // reconnect with banner shown
    };
    this.ws.onmessage = (ev) => {
      try {
        this.onMessage(decodeServerMessage(ev.data));
      } catch {
        // ignore undecodable frames
      }
    };
  }

  sendInput(msg: InputMessage): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(encodeInput(msg));
    }
  }
}
