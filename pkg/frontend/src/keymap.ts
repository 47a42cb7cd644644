/** Pure keyboard mapping.
 *
 * Digit design: the home-row number keys 0..9 select suggestions directly
 * (one keystroke per acceptance).  Legacy design: ArrowDown/ArrowUp move a
 * local highlight and Tab commits it, so selecting rank r costs r physical
 * keystrokes, which is exactly what the server charges for the one digit
 * event the commit sends.  Backquote toggles the writing direction in both
 * designs.
 */

import { Design, KeyEvent } from "./types";

export const TOGGLE_KEY = "`";

export type KeyAction =
  | { kind: "send"; event: KeyEvent }
  | { kind: "highlight"; delta: number }
  | { kind: "shake" }
  | { kind: "none" };

export interface KeyContext {
  design: Design;
  k: number;
  highlighted: number; // legacy-mode highlight, 0-based
}

export function mapKey(key: string, ctx: KeyContext): KeyAction {
  if (key === TOGGLE_KEY) {
    return { kind: "send", event: { type: "toggle", value: null } };
  }
  if (key === "Backspace") {
    return { kind: "send", event: { type: "backspace", value: null } };
  }
  if (ctx.design === "legacy") {
    if (key === "ArrowDown") {
      return { kind: "highlight", delta: 1 };
    }
    if (key === "ArrowUp") {
      return { kind: "highlight", delta: -1 };
    }
    if (key === "Tab") {
      if (ctx.highlighted < 0 || ctx.highlighted >= ctx.k) {
        return { kind: "shake" };
      }
      return { kind: "send", event: { type: "digit", value: ctx.highlighted } };
    }
  } else if (key >= "0" && key <= "9" && key.length === 1) {
    const label = key.charCodeAt(0) - 48;
    if (label >= ctx.k) {
      return { kind: "shake" };
    }
    return { kind: "send", event: { type: "digit", value: label } };
  }
  if (key.length === 1) {
    return { kind: "send", event: { type: "char", value: key } };
  }
  return { kind: "none" };
}
