// Pure timeline state derived from the ordered event stream. Rendered state
// is a function of (session view, last applied event sequence), so replaying
// a stored stream reproduces the exact same state, and reconnects at any
// cursor are idempotent: events at or below the cursor are dropped.

import type { SessionEvent } from "./types";

export interface StageRow {
  stage: number;
  status: "running" | "passed" | "failed";
  failingCases: number[] | null;
  extractionFailed: boolean;
}

export interface TimelineState {
  cursor: number; // highest event seq applied so far
  stages: StageRow[];
  finished: boolean;
  success: boolean | null;
  succeededStage: number | null;
  error: string | null;
}

export function initialTimeline(): TimelineState {
  return {
    cursor: 0,
    stages: [],
    finished: false,
    success: null,
    succeededStage: null,
    error: null,
  };
}

function stageRow(state: TimelineState, stage: number): StageRow {
  let row = state.stages.find((r) => r.stage === stage);
  if (!row) {
    row = { stage, status: "running", failingCases: null, extractionFailed: false };
    state.stages.push(row);
    state.stages.sort((a, b) => a.stage - b.stage);
  }
  return row;
}

/** Apply one event; returns a new state. Duplicate / already-seen events
 * (seq <= cursor) are ignored, which is what makes reconnect replay safe. */
export function applyEvent(state: TimelineState, event: SessionEvent): TimelineState {
  if (event.seq <= state.cursor) {
    return state;
  }
  const next: TimelineState = {
    ...state,
    cursor: event.seq,
    stages: state.stages.map((r) => ({ ...r })),
  };
  const stage = event.payload.stage ?? null;
  switch (event.kind) {
    case "StageStarted":
      if (stage !== null) {
        stageRow(next, stage).status = "running";
      }
      break;
    case "StageValidated":
      if (stage !== null) {
        const row = stageRow(next, stage);
        row.status = event.payload.passed ? "passed" : "failed";
        row.failingCases = event.payload.failing_cases ?? null;
      }
      break;
    case "ExtractionFailed":
      if (stage !== null) {
        stageRow(next, stage).extractionFailed = true;
      }
      break;
    case "Finished":
      next.finished = true;
      next.success = event.payload.success ?? false;
      next.succeededStage = event.payload.succeeded_stage ?? null;
      next.error = event.payload.error ?? null;
      break;
  }
  return next;
}

export function applyEvents(state: TimelineState, events: SessionEvent[]): TimelineState {
  return events.reduce(applyEvent, state);
}
