import { ChatApi } from "./api.js";
import type { UiTurn } from "./types.js";

const SESSION_KEY = "duanzai.session_id";

export type Listener = () => void;

/**
 * Chat state: ordered turns, one in-flight request at a time, session id
 * persisted in browser storage. Every send yields exactly one turn that
 * ends "done" or "error"; a retry re-resolves the same turn in place.
 */
export class ChatStore {
  turns: UiTurn[] = [];
  private nextId = 1;
  private inFlight = false;
  private listeners: Listener[] = [];

  constructor(
    private readonly api: ChatApi,
    private readonly storage: Pick<Storage, "getItem" | "setItem"> | null =
      typeof localStorage === "undefined" ? null : localStorage,
  ) {}

  get busy(): boolean {
    return this.inFlight;
  }

  get sessionId(): string | null {
    return this.storage ? this.storage.getItem(SESSION_KEY) : null;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** Send a message; no-op (returns null) while another send is pending. */
  async send(text: string): Promise<UiTurn | null> {
    const trimmed = text.trim();
    if (!trimmed || this.inFlight) return null;
    const turn: UiTurn = {
      id: this.nextId++,
      text: trimmed,
      analysis: null,
      reply: null,
      status: "pending",
    };
    this.turns.push(turn); // optimistic user bubble
    this.emit();
    return this.resolve(turn);
  }

  /** Re-attempt a failed turn's reply; the bubble is replaced in place. */
  async retry(turnId: number): Promise<UiTurn | null> {
    const turn = this.turns.find((t) => t.id === turnId);
    if (!turn || turn.status !== "error" || this.inFlight) return null;
    turn.status = "pending";
    turn.errorDetail = undefined;
    this.emit();
    return this.resolve(turn);
  }

  private async resolve(turn: UiTurn): Promise<UiTurn> {
    this.inFlight = true;
    this.emit();
    try {
      const response = await this.api.chat(turn.text, this.sessionId);
      if (this.storage) this.storage.setItem(SESSION_KEY, response.session_id);
      turn.analysis = response.analysis;
      if (response.error) {
        turn.status = "error";
        turn.reply = response.reply;
        turn.errorDetail = response.error.detail;
      } else {
        turn.status = "done";
        turn.reply = response.reply;
      }
    } catch (err) {
      turn.status = "error";
      turn.errorDetail = String(err);
    } finally {
      this.inFlight = false;
      this.emit();
    }
    return turn;
  }
}
