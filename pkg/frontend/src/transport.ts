/** Command transport: one in-flight command at a time, matched by id.
 *
 * The engine is a single-writer state machine, so the client never
 * pipelines: a second command waits until the first response lands.
 * Responses therefore apply in order by construction.
 */

import type { Command, CommandId, Response, Verb } from "./protocol.js";

export interface Transport {
  send(verb: Verb, params: Record<string, unknown>): Promise<Response>;
}

/** The subset of the browser WebSocket this module needs (injectable). */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = () => SocketLike;

interface PendingCommand {
  cmd: Command;
  resolve: (resp: Response) => void;
  reject: (err: Error) => void;
}

export class TransportClosed extends Error {}

export class WsTransport implements Transport {
  private socket: SocketLike | null = null;
  private opened = false;
  private nextId = 1;
  private inFlight: PendingCommand | null = null;
  private queue: PendingCommand[] = [];

  /** Fired when the connection drops; the owner decides how to resync. */
  onDisconnect: (() => void) | null = null;
  /** Fired on an unsolicited engine message (e.g. a SingleClient turn-away). */
  onUnsolicited: ((resp: Response) => void) | null = null;

  constructor(private readonly factory: SocketFactory) {}

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const socket = this.factory();
      this.socket = socket;
      this.opened = false;
      socket.onopen = () => {
        this.opened = true;
        resolve();
        this.pump();
      };
      socket.onmessage = (ev) => this.receive(ev.data);
      socket.onerror = () => {
        if (!this.opened) {
          reject(new TransportClosed("connection failed"));
        }
      };
      socket.onclose = () => {
        const wasOpen = this.opened;
        this.teardown(new TransportClosed("connection closed"));
        if (!wasOpen) {
          reject(new TransportClosed("connection closed before open"));
        } else if (this.onDisconnect) {
          this.onDisconnect();
        }
      };
    });
  }

  close(): void {
    this.socket?.close();
  }

  send(verb: Verb, params: Record<string, unknown>): Promise<Response> {
    const cmd: Command = { id: this.nextId++, verb, params };
    return new Promise<Response>((resolve, reject) => {
      this.queue.push({ cmd, resolve, reject });
      this.pump();
    });
  }

  private pump(): void {
    if (!this.socket || !this.opened || this.inFlight) {
      return;
    }
    const next = this.queue.shift();
    if (!next) {
      return;
    }
    this.inFlight = next;
    this.socket.send(JSON.stringify(next.cmd));
  }

  private receive(data: string): void {
    let resp: Response;
    try {
      resp = JSON.parse(data) as Response;
    } catch {
      this.teardown(new TransportClosed("engine sent unparseable frame"));
      this.close();
      return;
    }
    const current = this.inFlight;
    if (current && respondsTo(resp, current.cmd.id)) {
      this.inFlight = null;
      current.resolve(resp);
      this.pump();
      return;
    }
    if (this.onUnsolicited) {
      this.onUnsolicited(resp);
    }
  }

  private teardown(err: Error): void {
    this.opened = false;
    this.socket = null;
    const pending = this.inFlight ? [this.inFlight, ...this.queue] : this.queue;
    this.inFlight = null;
    this.queue = [];
    for (const p of pending) {
      p.reject(err);
    }
  }
}

function respondsTo(resp: Response, id: CommandId): boolean {
  // Parse-failure responses echo id: null; they still answer the command
  // in flight because the engine replies strictly one-for-one, in order.
  return resp.id === id || resp.id === null;
}
