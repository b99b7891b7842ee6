// Thin client over the console service JSON API. The fetch function is
// injectable so tests can drive the client against canned responses.

import type { ProblemSummary, SessionEvent, SessionView } from "./types";

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClientError extends Error {
  constructor(
    public code: number,
    message: string,
  ) {
    super(message);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let message = response.statusText;
    try {
      const body = (await response.json()) as { message?: string };
      if (body.message) message = body.message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiClientError(response.status, message);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  listProblems(): Promise<ProblemSummary[]> {
    return this.get<ProblemSummary[]>("/problems");
  }

  createSession(problemId: string, incorrectCode: string): Promise<SessionView> {
    return this.post<SessionView>("/sessions", {
      problem_id: problemId,
      incorrect_code: incorrectCode,
    });
  }

  submitGuidance(sessionId: string, guidance: string): Promise<SessionView> {
    return this.post<SessionView>(`/sessions/${sessionId}/guidance`, { guidance });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.get<SessionView>(`/sessions/${sessionId}`);
  }

  approve(sessionId: string, reply: string): Promise<SessionView> {
    return this.post<SessionView>(`/sessions/${sessionId}/approve`, { reply });
  }

  /** Polling event fetch; used directly and as the SSE fallback. */
  eventsSince(sessionId: string, fromSeq: number): Promise<SessionEvent[]> {
    return this.get<SessionEvent[]>(`/sessions/${sessionId}/events?from_seq=${fromSeq}`);
  }

  /** Poll the event feed until a Finished event arrives, pushing each batch
   * through `onEvents`. The cursor advances past everything delivered, so a
   * dropped connection simply resumes without duplicates. */
  async followEvents(
    sessionId: string,
    onEvents: (events: SessionEvent[]) => void,
    opts: { fromSeq?: number; intervalMs?: number; sleep?: (ms: number) => Promise<void> } = {},
  ): Promise<void> {
    let cursor = opts.fromSeq ?? 1;
    const intervalMs = opts.intervalMs ?? 250;
    const sleep = opts.sleep ?? ((ms) => new Promise((resolve) => setTimeout(resolve, ms)));
    for (;;) {
      const batch = await this.eventsSince(sessionId, cursor);
      if (batch.length > 0) {
        cursor = batch[batch.length - 1].seq + 1;
        onEvents(batch);
        if (batch.some((e) => e.kind === "Finished")) {
          return;
        }
      }
      await sleep(intervalMs);
    }
  }

  private get<T>(path: string): Promise<T> {
    return this.fetchFn(this.baseUrl + path).then((r) => parseOrThrow<T>(r));
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => parseOrThrow<T>(r));
  }
}
