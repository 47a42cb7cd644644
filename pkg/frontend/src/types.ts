/** Wire and UI state types for the autocomplete writing pad. */

export const SCHEMA_VERSION = 1;

export type Direction = "forward" | "backward";
export type Design = "digit" | "legacy";

export interface Ledger {
  actual: number;
  manual_equivalent: number;
  /** provided by the server so the client never does counter arithmetic */
  saved: number;
}

/** Server session snapshot; the single source of truth for all counters. */
export interface Snapshot {
  schema_version: number;
  session_id: string;
  design: Design;
  k: number;
  direction: Direction;
  cursor_side: "begin" | "end";
  text: string;
  pending: string;
  token_count: number;
  ledger: Ledger;
  ae_defined: boolean;
  ae_ratio: number | null;
}

export interface Suggestion {
  label: number;
  id: number;
  surface: string;
  score: number;
}

export type KeyEvent =
  | { type: "digit"; value: number }
  | { type: "char"; value: string }
  | { type: "toggle"; value: null }
  | { type: "backspace"; value: null };

/** Everything render() needs; counters are copied verbatim from the last
 * snapshot, never computed client-side. */
export interface UiState {
  sessionId: string;
  design: Design;
  direction: Direction;
  cursorSide: "begin" | "end";
  text: string;
  pending: string;
  suggestions: Suggestion[];
  highlighted: number; // legacy-mode arrow highlight, 0-based rank
  ledger: Ledger;
  aeDefined: boolean;
  aeRatio: number | null;
  banner: string | null;
  shake: boolean;
}

export class SchemaVersionError extends Error {
  constructor(got: number) {
    super(`server speaks schema_version ${got}, client expects ${SCHEMA_VERSION}`);
    this.name = "SchemaVersionError";
  }
}

export function checkSchemaVersion(body: { schema_version?: number }): void {
  if (body.schema_version !== SCHEMA_VERSION) {
    throw new SchemaVersionError(body.schema_version ?? -1);
  }
}
