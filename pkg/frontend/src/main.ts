/**
 * Browser entry point: wires the controller to the page and the keyboard.
 *
 * Query parameters: ?api=<service base url>&session=<session id>
 * (defaults: http://127.0.0.1:8000 and "default").
 */

import { LabelingApi } from "./api.js";
import { LabelingController } from "./controller.js";
import { renderState } from "./render.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "http://127.0.0.1:8000";
const sessionId = params.get("session") ?? "default";

const api = new LabelingApi(baseUrl);
const controller = new LabelingController(api, sessionId);
const root = document.getElementById("app")!;

controller.onChange(state => {
  root.innerHTML = renderState(state);
});

root.addEventListener("click", event => {
  const target = (event.target as HTMLElement).closest("[data-action]");
  if (!target) return;
  const action = target.getAttribute("data-action");
  if (action === "match" || action === "unmatch") {
    event.preventDefault();
    void controller.submit(action);
  } else if (action === "report") {
    event.preventDefault();
    window.open(`${baseUrl}/sessions/${sessionId}/report`, "_blank");
  }
});

document.addEventListener("keydown", event => {
  if (event.repeat) return;
  if (event.key === "m") void controller.submit("match");
  if (event.key === "u") void controller.submit("unmatch");
});

void controller.attach();
