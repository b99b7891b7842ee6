// DOM wiring for the tutor console. All state lives in (SessionView,
// TimelineState); this file only reflects it into the page.

import { ApiClient, ApiClientError } from "./api";
import { renderConsole } from "./render";
import { applyEvents, initialTimeline, type TimelineState } from "./state";
import type { SessionView } from "./types";

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

let view: SessionView | null = null;
let timeline: TimelineState = initialTimeline();

function refresh(): void {
  if (!view) return;
  el<HTMLPreElement>("console-output").textContent = renderConsole(view, timeline);
  el<HTMLDivElement>("guidance-panel").hidden = view.state !== "AwaitingGuidance";
  el<HTMLDivElement>("approve-panel").hidden =
    view.state !== "Succeeded" && view.state !== "Failed";
}

function showError(message: string): void {
  const box = el<HTMLDivElement>("error-box");
  box.textContent = message;
  box.hidden = message === "";
}

async function loadProblems(): Promise<void> {
  const select = el<HTMLSelectElement>("problem-select");
  for (const problem of await api.listProblems()) {
    const option = document.createElement("option");
    option.value = problem.id;
    option.textContent = `${problem.title} (tier ${problem.tier})`;
    select.appendChild(option);
  }
}

async function startSession(): Promise<void> {
  showError("");
  const problemId = el<HTMLSelectElement>("problem-select").value;
  const code = el<HTMLTextAreaElement>("code-input").value;
  try {
    view = await api.createSession(problemId, code);
    timeline = initialTimeline();
    refresh();
  } catch (e) {
    showError(e instanceof ApiClientError ? e.message : String(e));
  }
}

async function submitGuidance(): Promise<void> {
  if (!view) return;
  const guidance = el<HTMLTextAreaElement>("guidance-input").value;
  if (!guidance.trim()) {
    showError("guidance must be non-empty (typical guidance is a short paragraph)");
    return;
  }
  showError("");
  try {
    view = await api.submitGuidance(view.id, guidance);
    refresh();
    const sessionId = view.id;
    await api.followEvents(sessionId, (events) => {
      timeline = applyEvents(timeline, events);
      refresh();
    });
    view = await api.getSession(sessionId);
    refresh();
  } catch (e) {
    showError(e instanceof ApiClientError ? e.message : String(e));
  }
}

async function approve(): Promise<void> {
  if (!view) return;
  const reply = el<HTMLTextAreaElement>("reply-input").value;
  try {
    view = await api.approve(view.id, reply);
    refresh();
  } catch (e) {
    showError(e instanceof ApiClientError ? e.message : String(e));
  }
}

export function bootstrap(): void {
  void loadProblems();
  el<HTMLButtonElement>("start-button").addEventListener("click", () => void startSession());
  el<HTMLButtonElement>("guidance-button").addEventListener("click", () => void submitGuidance());
  el<HTMLButtonElement>("approve-button").addEventListener("click", () => void approve());
}

if (typeof document !== "undefined" && document.getElementById("start-button")) {
  bootstrap();
}
