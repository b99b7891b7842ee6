// Pure text rendering of the console view; the DOM layer (main.ts) and the
// snapshot tests both consume this, so what the tests freeze is exactly what
// the tutor sees.

import { unifiedDiff } from "./diff";
import type { TimelineState } from "./state";
import type { SessionView } from "./types";

const STATUS_LABEL: Record<string, string> = {
  running: "running…",
  passed: "passed",
  failed: "failed",
};

export function renderTimeline(timeline: TimelineState): string {
  const lines: string[] = [];
  for (const row of timeline.stages) {
    let line = `Stage ${row.stage}: ${STATUS_LABEL[row.status]}`;
    if (row.extractionFailed) {
      line += " (no code in response)";
    }
    if (row.status === "failed" && row.failingCases && row.failingCases.length > 0) {
      line += ` — failing tests: ${row.failingCases.join(", ")}`;
    }
    lines.push(line);
  }
  if (timeline.finished) {
    if (timeline.error) {
      lines.push(`Finished: error (${timeline.error})`);
    } else if (timeline.success) {
      lines.push(`Finished: repaired at stage ${timeline.succeededStage}`);
    } else {
      lines.push("Finished: no validated repair");
    }
  }
  return lines.join("\n");
}

export function renderDiffPanel(view: SessionView): string {
  if (view.repaired_code === null) {
    return "no validated repair — review the transcript and reply manually";
  }
  const diff = unifiedDiff(view.incorrect_code, view.repaired_code);
  return diff === "" ? "(repaired code is identical)" : diff;
}

export function renderVerdicts(view: SessionView): string {
  if (!view.test_verdicts) {
    return "";
  }
  return view.test_verdicts
    .map((v) => `test ${v.test_index}: ${v.verdict}`)
    .join("\n");
}

/** Full console snapshot: state header, stage timeline, verdicts, diff. */
export function renderConsole(view: SessionView, timeline: TimelineState): string {
  const sections = [
    `session ${view.id} — ${view.problem_id} [${view.state}]`,
    renderTimeline(timeline),
    renderVerdicts(view),
    renderDiffPanel(view),
  ];
  return sections.filter((s) => s !== "").join("\n\n") + "\n";
}
