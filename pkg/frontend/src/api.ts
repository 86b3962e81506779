/** HTTP client and event-stream subscription for the session service.
 *
 * Every submitted action round-trips through the service; the client never
 * applies a move locally. The event subscription resumes from the last seen
 * sequence number after a drop, so no event is missed or duplicated.
 */

import { ActionDoc, CardTexts, ReportDoc, SessionView, StreamEvent } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public status: number,
    public reason?: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const detail = body?.detail;
    const reason = typeof detail === "object" && detail ? detail.reason : undefined;
    const message =
      typeof detail === "object" && detail ? detail.message : detail ?? response.statusText;
    throw new ApiError(String(message), response.status, reason);
  }
  return body as T;
}

export class GameClient {
  constructor(private base: string = "") {}

  createGame(config: object): Promise<{ id: string; players_expected: number }> {
    return request(`${this.base}/games`, {
      method: "POST",
      body: JSON.stringify({ config }),
    });
  }

  join(gameId: string, name: string): Promise<{ seat: number; token: string }> {
    return request(`${this.base}/games/${gameId}/join`, {
      method: "POST",
      body: JSON.stringify({ name }),
    });
  }

  state(gameId: string, token?: string): Promise<SessionView> {
    const query = token ? `?token=${encodeURIComponent(token)}` : "";
    return request(`${this.base}/games/${gameId}/state${query}`);
  }

  submit(gameId: string, token: string, action: ActionDoc): Promise<{ accepted: boolean }> {
    return request(`${this.base}/games/${gameId}/actions`, {
      method: "POST",
      body: JSON.stringify({ token, action }),
    });
  }

  report(gameId: string): Promise<ReportDoc> {
    return request(`${this.base}/games/${gameId}/report`);
  }

  cardTexts(): Promise<CardTexts> {
    return request(`${this.base}/meta/cards`);
  }

  eventsUrl(gameId: string, after: number): string {
    return `${this.base}/games/${gameId}/events?after=${after}`;
  }
}

/** Minimal EventSource surface so tests can inject a fake transport. */
export interface EventSourceLike {
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface Subscription {
  close(): void;
  readonly lastSeq: number;
}

/**
 * Subscribe to a game's ordered event stream. Reconnects after errors from
 * the last seen sequence number; duplicate deliveries (possible across a
 * resume) are dropped by seq.
 */
export function subscribeEvents(
  client: GameClient,
  gameId: string,
  onEvent: (event: StreamEvent) => void,
  options: {
    after?: number;
    factory?: EventSourceFactory;
    reconnectDelayMs?: number;
    setTimeoutFn?: typeof setTimeout;
  } = {},
): Subscription {
  const factory =
    options.factory ?? ((url: string) => new EventSource(url) as unknown as EventSourceLike);
  const delay = options.reconnectDelayMs ?? 1000;
  const schedule = options.setTimeoutFn ?? setTimeout;
  let lastSeq = options.after ?? 0;
  let closed = false;
  let source: EventSourceLike | null = null;

  const connect = () => {
    if (closed) return;
    source = factory(client.eventsUrl(gameId, lastSeq));
    source.onmessage = (message) => {
      const event = JSON.parse(message.data) as StreamEvent;
      if (event.seq <= lastSeq) return; // duplicate across a resume
      lastSeq = event.seq;
      onEvent(event);
    };
    source.onerror = () => {
      source?.close();
      if (!closed) schedule(connect, delay);
    };
  };
  connect();

  return {
    close() {
      closed = true;
      source?.close();
    },
    get lastSeq() {
      return lastSeq;
    },
  };
}
