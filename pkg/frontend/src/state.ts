/** UI state construction: everything numeric is copied from the server. */

import { Snapshot, Suggestion, UiState } from "./types";

export function initialState(): UiState {
  return {
    sessionId: "",
    design: "digit",
    direction: "forward",
    cursorSide: "end",
    text: "",
    pending: "",
    suggestions: [],
    highlighted: 0,
    ledger: { actual: 0, manual_equivalent: 0, saved: 0 },
    aeDefined: false,
    aeRatio: null,
    banner: null,
    shake: false,
  };
}

/** Replace session fields wholesale from a snapshot (server authoritative);
 * purely local fields (highlight, banner, shake) are preserved. */
export function sync(state: UiState, snapshot: Snapshot): UiState {
  return {
    ...state,
    sessionId: snapshot.session_id,
    design: snapshot.design,
    direction: snapshot.direction,
    cursorSide: snapshot.cursor_side,
    text: snapshot.text,
    pending: snapshot.pending,
    ledger: snapshot.ledger,
    aeDefined: snapshot.ae_defined,
    aeRatio: snapshot.ae_ratio,
  };
}

export function withSuggestions(state: UiState, suggestions: Suggestion[]): UiState {
  const highlighted = Math.min(state.highlighted, Math.max(suggestions.length - 1, 0));
  return { ...state, suggestions, highlighted };
}

/** Rendered AE: one decimal, em-dash while undefined. */
export function formatAe(aeDefined: boolean, aeRatio: number | null): string {
  if (!aeDefined || aeRatio === null) {
    return "—";
  }
  return `${(aeRatio * 100).toFixed(1)}%`;
}
