/** Entry point: hash-routes between the participant game and the admin
 * panel. The service URL comes from ?server=... (defaults to same origin,
 * falling back to the local dev port). */

import { ExperimentApi } from "./api.js";
import { AdminPanel } from "./admin.js";
import { ParticipantView } from "./participant.js";
import { SessionFlow } from "./session.js";

function serverUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const override = params.get("server");
  if (override) return override.replace(/\/$/, "");
  if (window.location.protocol.startsWith("http") && window.location.port !== "8080") {
    return window.location.origin;
  }
  return "http://localhost:8000";
}

function boot(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const api = new ExperimentApi(serverUrl());

  if (window.location.hash === "#admin") {
    void new AdminPanel(root, api).start();
    return;
  }

  const joinBox = document.createElement("div");
  joinBox.className = "join";
  const input = document.createElement("input");
  input.placeholder = "participant id";
  input.className = "participant-id";
  const button = document.createElement("button");
  button.textContent = "Start voting";
  button.className = "join-button";
  joinBox.append(input, button);
  root.append(joinBox);

  button.addEventListener("click", () => {
    const participantId = input.value.trim();
    if (!participantId) {
      input.focus();
      return;
    }
    joinBox.remove();
    const flow = new SessionFlow(api, participantId);
    new ParticipantView(root, flow).start();
    void flow.join();
  });
}

window.addEventListener("DOMContentLoaded", boot);
window.addEventListener("hashchange", () => window.location.reload());
