/** FIFO serializer: at most one task in flight, later tasks wait in order.
 *
 * Key presses arriving while an event is being confirmed by the server are
 * queued, never reordered and never dropped.
 */

export class SerialQueue {
  private tail: Promise<unknown> = Promise.resolve();
  private pending = 0;

  get depth(): number {
    return this.pending;
  }

  enqueue<T>(task: () => Promise<T>): Promise<T> {
    this.pending += 1;
    const run = this.tail.then(task);
    // keep the chain alive whether the task succeeds or fails
    this.tail = run.catch(() => undefined).then(() => {
      this.pending -= 1;
    });
    return run;
  }

  /** Resolves once everything enqueued so far has settled. */
  async drain(): Promise<void> {
    while (this.pending > 0) {
      await this.tail;
    }
  }
}
