import { segmentByScalarRange } from "./offsets.js";
import type { Analysis, UiTurn } from "./types.js";

/** User bubble content with the punchline span wrapped in <mark>. */
export function renderUserText(text: string, analysis: Analysis | null): DocumentFragment {
  const fragment = document.createDocumentFragment();
  const span = analysis?.punchline ?? null;
  if (!span) {
    fragment.append(text);
    return fragment;
  }
  for (const segment of segmentByScalarRange(text, span.start, span.end)) {
    if (segment.highlighted) {
      const mark = document.createElement("mark");
      mark.className = "punchline";
      mark.textContent = segment.text;
      fragment.append(mark);
    } else {
      fragment.append(segment.text);
    }
  }
  return fragment;
}

/** Candidate panel for the most recent analysis. */
export function renderCandidates(panel: HTMLElement, analysis: Analysis | null): void {
  panel.replaceChildren();
  const heading = document.createElement("h2");
  heading.textContent = "原词候选";
  panel.append(heading);
  if (!analysis || !analysis.punchline || analysis.candidates.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "no pun detected";
    panel.append(empty);
    return;
  }
  const sub = document.createElement("p");
  sub.className = "surface";
  sub.textContent = `谐音:「${analysis.punchline.surface}」`;
  panel.append(sub);
  const list = document.createElement("ol");
  list.className = "candidates";
  for (const candidate of analysis.candidates.slice(0, 5)) {
    const item = document.createElement("li");
    const word = document.createElement("span");
    word.className = "hanzi";
    word.textContent = candidate.hanzi;
    const score = document.createElement("span");
    score.className = "score";
    score.textContent = candidate.total_score.toFixed(2);
    item.append(word, score);
    list.append(item);
  }
  panel.append(list);
}

export interface ViewCallbacks {
  onRetry: (turnId: number) => void;
}

export function renderTurns(
  container: HTMLElement,
  turns: UiTurn[],
  callbacks: ViewCallbacks,
): void {
  container.replaceChildren();
  for (const turn of turns) {
    const user = document.createElement("div");
    user.className = "bubble user";
    user.dataset.turn = String(turn.id);
    user.append(renderUserText(turn.text, turn.analysis));
    container.append(user);

    if (turn.status === "pending") {
      const pending = document.createElement("div");
      pending.className = "bubble assistant pending";
      pending.textContent = "…";
      container.append(pending);
    } else if (turn.status === "error") {
      const error = document.createElement("div");
      error.className = "bubble error";
      error.dataset.turn = String(turn.id);
      const label = document.createElement("span");
      label.textContent = turn.errorDetail
        ? `请求失败:${turn.errorDetail}`
        : "请求失败";
      const retry = document.createElement("button");
      retry.className = "retry";
      retry.textContent = "重试";
      retry.addEventListener("click", () => callbacks.onRetry(turn.id));
      error.append(label, " ", retry);
      container.append(error);
    } else {
      const assistant = document.createElement("div");
      assistant.className = "bubble assistant";
      assistant.textContent = turn.reply ?? "";
      container.append(assistant);
    }
  }
  container.scrollTop = container.scrollHeight;
}
