// App bootstrap: poll the queue and dashboard, route events to the store.

import { ReviewApi } from "./api.js";
import { dashboardView } from "./dashboard.js";
import { QueueStore } from "./queueStore.js";
import { renderDashboard, renderQueue } from "./render.js";
import type { Decision } from "./types.js";

const POLL_MS = 5000;

function config() {
  const params = new URLSearchParams(window.location.search);
  return {
    baseUrl: params.get("api") ?? "",
    token: params.get("token") ?? undefined,
    reviewerId: params.get("reviewer") ?? "facilitator",
  };
}

async function start() {
  const { baseUrl, token, reviewerId } = config();
  const api = new ReviewApi(baseUrl, token);
  const store = new QueueStore(api, reviewerId);
  const queueRoot = document.getElementById("queue")!;
  const dashboardRoot = document.getElementById("dashboard")!;

  const handlers = {
    onFlag(candidateId: string, dimension: string, value: "pass" | "fail") {
      store.setFlag(candidateId, dimension, value);
      paint();
    },
    onNote(candidateId: string, note: string) {
      store.setNote(candidateId, note);
    },
    async onSubmit(candidateId: string, decision: Decision) {
      await store.submit(candidateId, decision);
      paint();
      void refreshDashboard();
    },
  };

  function paint() {
    const { cards, fetchError, staleView } = store.view();
    renderQueue(queueRoot, cards, fetchError, staleView, handlers);
  }

  async function refreshDashboard() {
    try {
      renderDashboard(dashboardRoot, dashboardView(await api.fetchAcceptanceMetrics()));
    } catch {
      // dashboard is best-effort; the queue banner reports connectivity
    }
  }

  async function tick() {
    await store.refresh();
    paint();
    await refreshDashboard();
  }

  await tick();
  setInterval(() => void tick(), POLL_MS);
}

void start();
