import { describe, expect, it } from "vitest";

import { mapKey, TOGGLE_KEY } from "../src/keymap";

const digitCtx = { design: "digit" as const, k: 10, highlighted: 0 };

describe("digit design", () => {
  it("maps key 5 to a digit event", () => {
    expect(mapKey("5", digitCtx)).toEqual({
      kind: "send",
      event: { type: "digit", value: 5 },
    });
  });

  it("maps printable keys to char events", () => {
    expect(mapKey("x", digitCtx)).toEqual({
      kind: "send",
      event: { type: "char", value: "x" },
    });
    expect(mapKey(" ", digitCtx)).toEqual({
      kind: "send",
      event: { type: "char", value: " " },
    });
  });

  it("signals shake for a digit beyond the suggestion count", () => {
    expect(mapKey("9", { ...digitCtx, k: 4 })).toEqual({ kind: "shake" });
  });

  it("maps the toggle key to a toggle event", () => {
    expect(mapKey(TOGGLE_KEY, digitCtx)).toEqual({
      kind: "send",
      event: { type: "toggle", value: null },
    });
  });

  it("maps Backspace to a backspace event", () => {
    expect(mapKey("Backspace", digitCtx)).toEqual({
      kind: "send",
      event: { type: "backspace", value: null },
    });
  });

  it("ignores non-printable keys", () => {
    expect(mapKey("Shift", digitCtx)).toEqual({ kind: "none" });
    expect(mapKey("ArrowDown", digitCtx)).toEqual({ kind: "none" });
  });
});

describe("legacy design", () => {
  const legacyCtx = { design: "legacy" as const, k: 10, highlighted: 2 };

  it("arrows adjust the highlight locally", () => {
    expect(mapKey("ArrowDown", legacyCtx)).toEqual({ kind: "highlight", delta: 1 });
    expect(mapKey("ArrowUp", legacyCtx)).toEqual({ kind: "highlight", delta: -1 });
  });

  it("tab commits the highlighted rank as one digit event", () => {
    expect(mapKey("Tab", legacyCtx)).toEqual({
      kind: "send",
      event: { type: "digit", value: 2 },
    });
  });

  it("digits are ordinary characters in legacy mode", () => {
    expect(mapKey("5", legacyCtx)).toEqual({
      kind: "send",
      event: { type: "char", value: "5" },
    });
  });

  it("tab with an out-of-range highlight shakes", () => {
    expect(mapKey("Tab", { ...legacyCtx, highlighted: 11 })).toEqual({
      kind: "shake",
    });
  });
});
