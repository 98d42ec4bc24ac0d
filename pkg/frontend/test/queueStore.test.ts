import { beforeEach, describe, expect, it } from "vitest";

import { ReviewApi } from "../src/api.js";
import { QueueStore } from "../src/queueStore.js";
import { ALL_PASS, FakeServer } from "./fakeServer.js";

function makeStore(server: FakeServer) {
  const api = new ReviewApi("", undefined, server.fetch);
  return new QueueStore(api, "rev-1");
}

describe("QueueStore", () => {
  let server: FakeServer;
  let store: QueueStore;

  beforeEach(async () => {
    server = new FakeServer();
    store = makeStore(server);
    await store.refresh();
  });

  it("mirrors the queue in FIFO order", () => {
    const ids = store.view().cards.map((c) => c.candidate.candidate_id);
    expect(ids).toEqual(["cand-1", "cand-2", "cand-3"]);
  });

  it("keeps checklist state across refreshes", async () => {
    store.setFlag("cand-2", "role_task_alignment", "pass");
    await store.refresh();
    expect(store.card("cand-2")!.checklist.role_task_alignment).toBe("pass");
  });

  it("blocks submission until the checklist is complete", async () => {
    store.setFlag("cand-1", "role_task_alignment", "pass");
    expect(store.canSubmit("cand-1", "accept")).toBe(false);
    const outcome = await store.submit("cand-1", "accept");
    expect(outcome.kind).toBe("blocked");
    expect(server.requests.filter((r) => r.method === "POST")).toHaveLength(0);
  });

  it("blocks accept client-side when a dimension fails", async () => {
    store.setFlag("cand-1", "role_task_alignment", "pass");
    store.setFlag("cand-1", "interactional_appropriateness", "fail");
    store.setFlag("cand-1", "factual_plausibility", "pass");
    expect(store.canSubmit("cand-1", "accept")).toBe(false);
    expect(store.canSubmit("cand-1", "reject")).toBe(true);
    const outcome = await store.submit("cand-1", "accept");
    expect(outcome.kind).toBe("blocked");
    // Never reached the server: blocked before the network call.
    expect(server.requests.filter((r) => r.method === "POST")).toHaveLength(0);
  });

  it("blocks reject when nothing fails (mirror of server rule)", async () => {
    for (const dim of Object.keys(ALL_PASS)) store.setFlag("cand-1", dim, "pass");
    const outcome = await store.submit("cand-1", "reject");
    expect(outcome.kind).toBe("blocked");
  });

  it("submits an accept and removes the card", async () => {
    for (const dim of Object.keys(ALL_PASS)) store.setFlag("cand-1", dim, "pass");
    const outcome = await store.submit("cand-1", "accept");
    expect(outcome.kind).toBe("decided");
    if (outcome.kind === "decided") {
      expect(outcome.record.decision).toBe("accept");
      expect(outcome.record.reviewer_id).toBe("rev-1");
    }
    expect(store.card("cand-1")).toBeUndefined();
    expect(server.reviews.get("cand-1")!.decision).toBe("accept");
  });

  it("surfaces the winning record on a concurrent decision", async () => {
    // Another reviewer decides first, directly against the server.
    const other = new ReviewApi("", undefined, server.fetch);
    await other.submitDecision("cand-1", "accept", ALL_PASS, "rev-other");

    for (const dim of Object.keys(ALL_PASS)) store.setFlag("cand-1", dim, "pass");
    const outcome = await store.submit("cand-1", "accept");
    expect(outcome.kind).toBe("conflict");
    const card = store.card("cand-1")!;
    expect(card.conflict!.reviewer_id).toBe("rev-other");
    expect(card.stale).toBe(true);
    // The decided card leaves the queue on the next refresh.
    await store.refresh();
    expect(store.card("cand-1")).toBeUndefined();
  });

  it("retains an undelivered decision as a local draft, never auto-submits", async () => {
    for (const dim of Object.keys(ALL_PASS)) store.setFlag("cand-2", dim, "pass");
    server.offline = new Error("network down");
    const outcome = await store.submit("cand-2", "accept");
    expect(outcome.kind).toBe("network_error");
    const card = store.card("cand-2")!;
    expect(card.draft).toBeDefined();
    expect(card.draft!.decision).toBe("accept");
    expect(server.reviews.has("cand-2")).toBe(false);

    // Connectivity returns; nothing is sent until the reviewer acts again.
    server.offline = null;
    const posts = server.requests.filter((r) => r.method === "POST").length;
    await store.refresh();
    expect(server.requests.filter((r) => r.method === "POST")).toHaveLength(posts);
    expect(store.card("cand-2")!.draft).toBeDefined();
  });

  it("flags a stale view when refresh fails and recovers after", async () => {
    server.offline = new Error("gateway timeout");
    await store.refresh();
    const view = store.view();
    expect(view.staleView).toBe(true);
    expect(view.fetchError).toContain("gateway timeout");
    expect(view.cards).toHaveLength(3); // last known queue still shown
    server.offline = null;
    await store.refresh();
    expect(store.view().staleView).toBe(false);
    expect(store.view().fetchError).toBeNull();
  });

  it("server-side rejection reasons land on the card", async () => {
    // Bypass the client gate to prove the server also blocks bad accepts.
    const api = new ReviewApi("", undefined, server.fetch);
    await expect(
      api.submitDecision("cand-3", "accept",
        { ...ALL_PASS, factual_plausibility: "fail" }, "rev-1"),
    ).rejects.toThrowError(/accept requires all dimensions/);
    expect(server.reviews.has("cand-3")).toBe(false);
  });
});
