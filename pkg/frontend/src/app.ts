import { ChatApi } from "./api.js";
import { ChatStore } from "./store.js";
import { renderCandidates, renderTurns } from "./view.js";

export interface AppElements {
  turns: HTMLElement;
  panel: HTMLElement;
  input: HTMLInputElement | HTMLTextAreaElement;
  send: HTMLButtonElement;
  status: HTMLElement;
}

/** Resolve the service base URL: ?api= query param, then saved, then origin. */
export function resolveBaseUrl(win: Pick<Window, "location" | "localStorage">): string {
  const fromQuery = new URLSearchParams(win.location.search).get("api");
  if (fromQuery) {
    win.localStorage.setItem("duanzai.api_base", fromQuery);
    return fromQuery.replace(/\/$/, "");
  }
  const saved = win.localStorage.getItem("duanzai.api_base");
  if (saved) return saved.replace(/\/$/, "");
  return win.location.origin;
}

export function createApp(elements: AppElements, api: ChatApi): ChatStore {
  const store = new ChatStore(api);

  const latestAnalysis = () => {
    for (let i = store.turns.length - 1; i >= 0; i--) {
      const analysis = store.turns[i].analysis;
      if (analysis) return analysis;
    }
    return null;
  };

  store.subscribe(() => {
    renderTurns(elements.turns, store.turns, {
      onRetry: (id) => void store.retry(id),
    });
    renderCandidates(elements.panel, latestAnalysis());
    elements.send.disabled = store.busy; // one in-flight request at a time
    elements.status.textContent = store.busy ? "发送中…" : "";
  });

  const submit = () => {
    const text = elements.input.value;
    if (!text.trim() || store.busy) return;
    elements.input.value = "";
    void store.send(text);
  };

  elements.send.addEventListener("click", submit);
  elements.input.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter" && !(event as KeyboardEvent).shiftKey) {
      event.preventDefault();
      submit();
    }
  });

  void api
    .health()
    .then((body) => {
      elements.status.textContent = `service ok (v${body.version})`;
    })
    .catch(() => {
      elements.status.textContent = "service unreachable";
    });

  return store;
}
