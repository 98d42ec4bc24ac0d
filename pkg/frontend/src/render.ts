// DOM rendering for the queue and dashboard. Renderers are plain functions
// from state to elements; event wiring happens through the passed handlers.

import type { QueueCard } from "./queueStore.js";
import type { DashboardView } from "./dashboard.js";
import { DIMENSIONS, DIMENSION_LABELS, type Decision } from "./types.js";
import { blockReason } from "./checklist.js";

export interface QueueHandlers {
  onFlag(candidateId: string, dimension: string, value: "pass" | "fail"): void;
  onNote(candidateId: string, note: string): void;
  onSubmit(candidateId: string, decision: Decision): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderThread(card: QueueCard): HTMLElement {
  const wrap = el("div", "thread");
  const thread = card.candidate.thread;
  if (!thread) return wrap;
  const post = el("details", "thread-post");
  post.open = thread.chain.length === 0;
  const summary = el("summary", undefined,
    `${thread.post.title || thread.post.post_id} — ${thread.post.author_id}`);
  post.append(summary, el("p", "post-content", thread.post.content));
  wrap.append(post);
  if (thread.chain.length > 0) {
    const chain = el("ol", "chain");
    for (const entry of thread.chain) {
      chain.append(el("li", "chain-entry", `[${entry.author_id}] ${entry.text}`));
    }
    wrap.append(chain);
  }
  return wrap;
}

export function renderCard(card: QueueCard, handlers: QueueHandlers): HTMLElement {
  const root = el("article", "card");
  root.dataset.candidateId = card.candidate.candidate_id;

  const header = el("header", "card-header");
  header.append(
    el("span", `role-badge role-${card.candidate.role.toLowerCase()}`, card.candidate.role),
    el("span", "generated-at", card.candidate.generated_at),
    el("code", "candidate-id", card.candidate.candidate_id),
  );
  root.append(header);
  root.append(renderThread(card));
  root.append(el("blockquote", "reply-text", card.candidate.text));

  const checklist = el("div", "checklist");
  for (const dim of DIMENSIONS) {
    const row = el("div", "dimension");
    row.append(el("span", "dimension-label", DIMENSION_LABELS[dim]));
    for (const value of ["pass", "fail"] as const) {
      const button = el("button", `flag flag-${value}`, value);
      if (card.checklist[dim] === value) button.classList.add("selected");
      button.addEventListener("click", () =>
        handlers.onFlag(card.candidate.candidate_id, dim, value));
      row.append(button);
    }
    checklist.append(row);
  }
  root.append(checklist);

  const note = el("textarea", "note");
  note.placeholder = "review note (required context for rejections)";
  note.value = card.note;
  note.addEventListener("input", () =>
    handlers.onNote(card.candidate.candidate_id, note.value));
  root.append(note);

  const actions = el("div", "actions");
  for (const decision of ["accept", "reject"] as const) {
    const button = el("button", `decide decide-${decision}`, decision);
    button.disabled = blockReason(card.checklist, decision) !== null;
    button.addEventListener("click", () =>
      handlers.onSubmit(card.candidate.candidate_id, decision));
    actions.append(button);
  }
  root.append(actions);

  if (card.conflict) {
    const conflict = el("div", "conflict");
    conflict.append(
      el("strong", undefined, "Already decided by another reviewer"),
      el("p", undefined,
        `${card.conflict.reviewer_id} ${card.conflict.decision}ed at ` +
        `${card.conflict.decided_at}`),
    );
    root.append(conflict);
    root.classList.add("stale");
  }
  if (card.draft) {
    root.append(el("div", "draft-banner",
      "decision saved locally (network failure); review and resubmit"));
  }
  if (card.error && !card.conflict) {
    root.append(el("div", "error", card.error));
  }
  return root;
}

export function renderQueue(
  container: HTMLElement,
  cards: QueueCard[],
  fetchError: string | null,
  staleView: boolean,
  handlers: QueueHandlers,
): void {
  container.replaceChildren();
  if (fetchError) {
    const banner = el("div", "banner banner-error",
      `queue refresh failed: ${fetchError} (view may be stale)`);
    container.append(banner);
  }
  if (staleView) container.classList.add("stale-view");
  else container.classList.remove("stale-view");
  if (cards.length === 0 && !fetchError) {
    container.append(el("div", "empty-state",
      "No candidates are waiting for review."));
    return;
  }
  for (const card of cards) container.append(renderCard(card, handlers));
}

export function renderDashboard(container: HTMLElement, view: DashboardView): void {
  container.replaceChildren();
  const summary = el("div", "summary");
  summary.append(
    el("span", "stat", `overall acceptance ${view.overallRateLabel}`),
    el("span", "stat", `generated ${view.totalGenerated}`),
    el("span", "stat pending-count", `pending ${view.pendingCount}`),
  );
  container.append(summary);
  const table = el("table", "daily");
  const head = el("tr");
  for (const col of ["date", "accepted", "rejected", "rate", "roles"]) {
    head.append(el("th", undefined, col));
  }
  table.append(head);
  for (const day of view.days) {
    const row = el("tr");
    row.append(
      el("td", undefined, day.date),
      el("td", undefined, String(day.accepted)),
      el("td", undefined, String(day.rejected)),
      el("td", "rate", day.rateLabel),
    );
    const roles = el("td", "roles");
    for (const { role, share } of day.roleShares) {
      const bar = el("span", "role-bar", `${role} ${(share * 100).toFixed(0)}%`);
      bar.style.setProperty("--share", String(share));
      roles.append(bar);
    }
    row.append(roles);
    table.append(row);
  }
  container.append(table);
}
