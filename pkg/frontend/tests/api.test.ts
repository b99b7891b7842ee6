import { describe, expect, it } from "vitest";

import { ApiClient, ApiClientError } from "../src/api";
import type { SessionEvent } from "../src/types";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

interface Call {
  url: string;
  init?: RequestInit;
}

function mockFetch(handler: (url: string, init?: RequestInit) => Response) {
  const calls: Call[] = [];
  const fetchFn = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return handler(url, init);
  };
  return { calls, fetchFn };
}

describe("ApiClient", () => {
  it("creates a session with a JSON POST", async () => {
    const { calls, fetchFn } = mockFetch(() =>
      jsonResponse(201, { id: "sess-1", state: "AwaitingGuidance" }),
    );
    const client = new ApiClient("http://svc", fetchFn);
    const view = await client.createSession("pair-sums", "int main() {}");
    expect(view.id).toBe("sess-1");
    expect(calls[0].url).toBe("http://svc/sessions");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({
      problem_id: "pair-sums",
      incorrect_code: "int main() {}",
    });
  });

  it("surfaces the service error body as an ApiClientError", async () => {
    const { fetchFn } = mockFetch(() =>
      jsonResponse(409, { code: 409, message: "session is not awaiting guidance" }),
    );
    const client = new ApiClient("", fetchFn);
    const err = await client
      .submitGuidance("sess-1", "hint")
      .then(() => null, (e: unknown) => e as ApiClientError);
    expect(err).toBeInstanceOf(ApiClientError);
    expect(err?.code).toBe(409);
    expect(err?.message).toBe("session is not awaiting guidance");
  });

  it("keeps the status text when the error body is not JSON", async () => {
    const { fetchFn } = mockFetch(
      () => new Response("boom", { status: 500, statusText: "Internal Server Error" }),
    );
    const client = new ApiClient("", fetchFn);
    await expect(client.getSession("sess-1")).rejects.toMatchObject({
      code: 500,
      message: "Internal Server Error",
    });
  });

  it("requests events from the given cursor", async () => {
    const { calls, fetchFn } = mockFetch(() => jsonResponse(200, []));
    const client = new ApiClient("", fetchFn);
    await client.eventsSince("sess-1", 4);
    expect(calls[0].url).toBe("/sessions/sess-1/events?from_seq=4");
  });

  it("follows the event feed, advancing the cursor and stopping on Finished", async () => {
    const batches: SessionEvent[][] = [
      [{ seq: 1, kind: "StageStarted", payload: { stage: 1 } }],
      [],
      [
        { seq: 2, kind: "StageValidated", payload: { stage: 1, passed: true, failing_cases: [] } },
        { seq: 3, kind: "Finished", payload: { success: true, succeeded_stage: 1 } },
      ],
    ];
    const { calls, fetchFn } = mockFetch(() => jsonResponse(200, batches.shift() ?? []));
    const client = new ApiClient("", fetchFn);
    const seen: number[] = [];
    await client.followEvents(
      "sess-1",
      (events) => seen.push(...events.map((e) => e.seq)),
      { sleep: async () => {} },
    );
    expect(seen).toEqual([1, 2, 3]);
    expect(calls.map((c) => c.url)).toEqual([
      "/sessions/sess-1/events?from_seq=1",
      "/sessions/sess-1/events?from_seq=2",
      "/sessions/sess-1/events?from_seq=2",
    ]);
  });
});
