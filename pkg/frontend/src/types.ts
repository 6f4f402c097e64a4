// Payload shapes of the chat service HTTP API.

export interface PunchlineSpan {
  start: number; // Unicode scalar offsets, end exclusive
  end: number;
  surface: string;
}

export interface Candidate {
  hanzi: string;
  total_score: number;
  lm_logprob: number;
  phonetic_distance: number;
}

export interface Analysis {
  punchline: PunchlineSpan | null;
  candidates: Candidate[];
  clue_used: boolean;
}

export interface ChatResponse {
  session_id: string;
  reply: string;
  analysis: Analysis;
  error?: { type: string; detail: string };
}

export type TurnStatus = "pending" | "done" | "error";

export interface UiTurn {
  id: number;
  text: string; // what the user sent
  analysis: Analysis | null;
  reply: string | null;
  status: TurnStatus;
  errorDetail?: string;
}
