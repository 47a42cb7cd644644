/** Application wiring: keyboard -> event queue -> server -> state -> DOM.
 *
 * All state changes wait for server confirmation (the optimistic action is
 * a no-op); key presses that arrive while an event is in flight are queued
 * in order.  Counters and text always come from the last snapshot.
 */

import { ApiClient, ApiError } from "./api";
import { KeyAction, mapKey } from "./keymap";
import { SerialQueue } from "./queue";
import { initialState, sync, withSuggestions } from "./state";
import { render } from "./render";
import { Design, Direction, KeyEvent, SchemaVersionError, UiState } from "./types";

export class App {
  state: UiState = initialState();
  /** every event actually posted, in order (inspectable by tests) */
  readonly sentEvents: KeyEvent[] = [];
  private queue = new SerialQueue();
  private shakeTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private api: ApiClient,
    private root: HTMLElement,
    private design: Design = "digit",
    private direction: Direction = "forward",
  ) {}

  async start(): Promise<void> {
    this.state = initialState();
    this.state.banner = null;
    try {
      const snapshot = await this.api.createSession(this.design, this.direction);
      this.state = sync(this.state, snapshot);
      await this.refreshSuggestions();
    } catch (err) {
      this.state.banner = describe(err);
    }
    this.paint();
  }

  async restart(design: Design, direction: Direction): Promise<void> {
    this.design = design;
    this.direction = direction;
    await this.queue.drain();
    await this.start();
  }

  attach(target: EventTarget): void {
    target.addEventListener("keydown", (raw) => {
      const event = raw as KeyboardEvent;
      if (event.ctrlKey || event.metaKey || event.altKey) {
        return;
      }
      if (this.handleKey(event.key)) {
        event.preventDefault();
      }
    });
  }

  /** Returns true when the key was consumed. */
  handleKey(key: string): boolean {
    if (this.state.banner !== null) {
      return false;
    }
    const action = mapKey(key, {
      design: this.state.design,
      k: this.state.suggestions.length || 10,
      highlighted: this.state.highlighted,
    });
    this.applyAction(action);
    return action.kind !== "none";
  }

  private applyAction(action: KeyAction): void {
    switch (action.kind) {
      case "none":
        return;
      case "highlight": {
        const top = Math.max(this.state.suggestions.length - 1, 0);
        this.state.highlighted = Math.min(
          Math.max(this.state.highlighted + action.delta, 0),
          top,
        );
        this.paint();
        return;
      }
      case "shake":
        this.indicateRejection();
        return;
      case "send":
        void this.queue.enqueue(() => this.send(action.event));
        return;
    }
  }

  private async send(event: KeyEvent): Promise<void> {
    try {
      const snapshot = await this.api.postEvent(this.state.sessionId, event);
      this.sentEvents.push(event);
      this.state = sync(this.state, snapshot);
      if (event.type !== "backspace") {
        await this.refreshSuggestions();
      }
      this.paint();
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        // e.g. digit out of range: server state unchanged, tell the hand
        this.indicateRejection();
        return;
      }
      this.state.banner = describe(err);
      this.paint();
    }
  }

  private async refreshSuggestions(): Promise<void> {
    const suggestions = await this.api.getSuggestions(this.state.sessionId);
    this.state = withSuggestions(this.state, suggestions);
  }

  private indicateRejection(): void {
    this.state.shake = true;
    this.paint();
    if (this.shakeTimer !== null) {
      clearTimeout(this.shakeTimer);
    }
    this.shakeTimer = setTimeout(() => {
      this.state.shake = false;
      this.paint();
    }, 300);
  }

  /** Settle all in-flight events (used by tests). */
  idle(): Promise<void> {
    return this.queue.drain();
  }

  private paint(): void {
    render(this.state, this.root);
  }
}

function describe(err: unknown): string {
  if (err instanceof SchemaVersionError) {
    return `${err.message} — reload after upgrading`;
  }
  if (err instanceof ApiError && err.status === 404) {
    return `session lost (${err.message}) — use New Session to reconnect`;
  }
  return err instanceof Error ? err.message : String(err);
}
