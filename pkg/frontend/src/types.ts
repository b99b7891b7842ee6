// Shapes mirrored from the console service JSON API. The UI treats these as
// opaque server data: nothing here is recomputed or mutated client-side.

export type SessionState =
  | "AwaitingGuidance"
  | "Running"
  | "Succeeded"
  | "Failed"
  | "Approved";

export interface ProblemSummary {
  id: string;
  title: string;
  tier: number;
  category: string;
  time_limit_ms: number;
  memory_limit_kb: number;
}

export interface TestVerdict {
  test_index: number;
  verdict: string;
}

export interface SessionView {
  id: string;
  problem_id: string;
  incorrect_code: string;
  state: SessionState;
  running_stage: number | null;
  succeeded_stage: number | null;
  guidance: string | null;
  repaired_code: string | null;
  diff: string | null;
  test_verdicts: TestVerdict[] | null;
  reply_draft: string | null;
  event_count: number;
}

export type EventKind =
  | "StageStarted"
  | "StageValidated"
  | "ExtractionFailed"
  | "Finished";

export interface SessionEvent {
  seq: number;
  kind: EventKind;
  payload: {
    stage?: number;
    passed?: boolean;
    failing_cases?: number[] | null;
    success?: boolean;
    succeeded_stage?: number | null;
    error?: string;
  };
}

export interface ApiError {
  code: number;
  message: string;
}
