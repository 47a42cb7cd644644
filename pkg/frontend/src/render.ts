/** DOM rendering: a full repaint of the writing pad from UiState.
 *
 * Structure rendered into the root element:
 *   .banner          blocking error messages (hidden when null)
 *   .editor          composed text with a caret marker on the writing side
 *   .suggestions     one chip per candidate, digit label left of surface
 *   .status          direction indicator and counters panel
 */

import { formatAe } from "./state";
import { UiState } from "./types";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function render(state: UiState, root: HTMLElement): void {
  root.textContent = "";

  if (state.banner !== null) {
    const banner = el("div", "banner", state.banner);
    banner.setAttribute("role", "alert");
    root.appendChild(banner);
  }

  const editor = el("div", "editor");
  editor.dataset.testid = "editor";
  const caret = el("span", "caret", "▏");
  if (state.cursorSide === "begin") {
    // backward writing: new tokens attach at the left edge
    editor.appendChild(el("span", "pending", state.pending));
    editor.appendChild(caret);
    editor.appendChild(el("span", "text", state.text));
  } else {
    editor.appendChild(el("span", "text", state.text));
    editor.appendChild(el("span", "pending", state.pending));
    editor.appendChild(caret);
  }
  root.appendChild(editor);

  const bar = el("div", "suggestions" + (state.shake ? " shake" : ""));
  bar.dataset.testid = "suggestions";
  state.suggestions.forEach((s, i) => {
    const chip = el(
      "button",
      "suggestion" +
        (state.design === "legacy" && i === state.highlighted ? " highlighted" : ""),
    );
    chip.dataset.label = String(s.label);
    chip.appendChild(el("kbd", "label", String(s.label)));
    chip.appendChild(el("span", "surface", s.surface));
    bar.appendChild(chip);
  });
  root.appendChild(bar);

  const status = el("div", "status");
  const dir = el("span", "direction", state.direction);
  dir.dataset.testid = "direction";
  status.appendChild(dir);

  const counters = el("dl", "counters");
  counters.dataset.testid = "counters";
  const pairs: Array<[string, string, string]> = [
    ["actual", "keys pressed", String(state.ledger.actual)],
    ["manual", "manual equivalent", String(state.ledger.manual_equivalent)],
    ["saved", "saved", String(state.ledger.saved)],
    ["ae", "live AE", formatAe(state.aeDefined, state.aeRatio)],
  ];
  for (const [id, label, value] of pairs) {
    counters.appendChild(el("dt", "counter-label", label));
    const dd = el("dd", "counter-value", value);
    dd.dataset.counter = id;
    counters.appendChild(dd);
  }
  status.appendChild(counters);
  root.appendChild(status);
}
