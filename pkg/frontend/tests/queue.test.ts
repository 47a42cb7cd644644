import { describe, expect, it } from "vitest";

import { SerialQueue } from "../src/queue";

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

describe("SerialQueue", () => {
  it("runs tasks one at a time in submission order", async () => {
    const queue = new SerialQueue();
    const log: string[] = [];
    let inFlight = 0;
    const task = (name: string, ms: number) => () =>
      (async () => {
        inFlight += 1;
        expect(inFlight).toBe(1);
        await sleep(ms);
        log.push(name);
        inFlight -= 1;
      })();
    void queue.enqueue(task("a", 20));
    void queue.enqueue(task("b", 5));
    void queue.enqueue(task("c", 1));
    await queue.drain();
    expect(log).toEqual(["a", "b", "c"]);
  });

  it("keeps going after a task fails", async () => {
    const queue = new SerialQueue();
    const log: string[] = [];
    const failing = queue.enqueue(async () => {
      throw new Error("boom");
    });
    await expect(failing).rejects.toThrow("boom");
    await queue.enqueue(async () => {
      log.push("after");
    });
    expect(log).toEqual(["after"]);
  });

  it("reports queue depth", async () => {
    const queue = new SerialQueue();
    void queue.enqueue(() => sleep(10));
    void queue.enqueue(() => sleep(1));
    expect(queue.depth).toBe(2);
    await queue.drain();
    expect(queue.depth).toBe(0);
  });
});
