/** Browser bootstrap: session settings pane plus the writing pad. */

import { ApiClient } from "./api";
import { App } from "./app";
import { Design, Direction } from "./types";

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

function currentDesign(): Design {
  const checked = document.querySelector<HTMLInputElement>(
    'input[name="design"]:checked',
  );
  return (checked?.value as Design) ?? "digit";
}

function currentDirection(): Direction {
  const checked = document.querySelector<HTMLInputElement>(
    'input[name="direction"]:checked',
  );
  return (checked?.value as Direction) ?? "forward";
}

window.addEventListener("DOMContentLoaded", () => {
  const base = param("server", "http://127.0.0.1:8080");
  const root = document.getElementById("pad");
  if (root === null) {
    throw new Error("missing #pad element");
  }
  const app = new App(new ApiClient(base), root, currentDesign(), currentDirection());
  app.attach(document);
  document.getElementById("new-session")?.addEventListener("click", () => {
    void app.restart(currentDesign(), currentDirection());
  });
  void app.start();
});
