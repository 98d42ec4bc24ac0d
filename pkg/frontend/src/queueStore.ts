// Queue state: mirrors GET /api/queue (FIFO, oldest first), tracks per-card
// checklist state, keeps undelivered decisions as local drafts, and
// surfaces first-decision-wins conflicts with the winning record.

import { DecisionConflictError, ReviewApi, ValidationRejectedError } from "./api.js";
import { asFlags, blockReason, emptyChecklist, type ChecklistState } from "./checklist.js";
import type { CandidateCard, Decision, ReviewRecord } from "./types.js";

export interface DecisionDraft {
  checklist: ChecklistState;
  decision: Decision;
  note?: string;
}

export interface QueueCard {
  candidate: CandidateCard;
  checklist: ChecklistState;
  note: string;
  /** Winning record when another reviewer decided first. */
  conflict?: ReviewRecord;
  /** Set when submission failed locally or in transport. */
  error?: string;
  /** Retained decision that was never delivered (network failure). */
  draft?: DecisionDraft;
  stale: boolean;
}

export type SubmitOutcome =
  | { kind: "decided"; record: ReviewRecord }
  | { kind: "blocked"; reason: string }
  | { kind: "conflict"; existing: ReviewRecord }
  | { kind: "rejected"; reason: string }
  | { kind: "network_error"; draft: DecisionDraft };

export class QueueStore {
  private cards: QueueCard[] = [];
  private fetchError: string | null = null;
  private staleView = false;

  constructor(
    private readonly api: ReviewApi,
    readonly reviewerId: string,
  ) {}

  view(): { cards: QueueCard[]; fetchError: string | null; staleView: boolean } {
    return { cards: this.cards, fetchError: this.fetchError, staleView: this.staleView };
  }

  card(candidateId: string): QueueCard | undefined {
    return this.cards.find((c) => c.candidate.candidate_id === candidateId);
  }

  async refresh(): Promise<void> {
    let pending: CandidateCard[];
    try {
      pending = await this.api.fetchQueue();
    } catch (err) {
      // Keep showing the last known queue, flagged stale, with a retriable
      // error banner.
      this.fetchError = err instanceof Error ? err.message : String(err);
      this.staleView = true;
      return;
    }
    this.fetchError = null;
    this.staleView = false;
    const previous = new Map(this.cards.map((c) => [c.candidate.candidate_id, c]));
    this.cards = pending.map((candidate) => {
      const old = previous.get(candidate.candidate_id);
      return {
        candidate,
        checklist: old?.checklist ?? emptyChecklist(),
        note: old?.note ?? "",
        conflict: old?.conflict,
        error: old?.error,
        draft: old?.draft,
        stale: false,
      };
    });
  }

  setFlag(candidateId: string, dimension: string, value: "pass" | "fail"): void {
    const card = this.card(candidateId);
    if (!card) return;
    (card.checklist as Record<string, "pass" | "fail">)[dimension] = value;
    card.error = undefined;
  }

  setNote(candidateId: string, note: string): void {
    const card = this.card(candidateId);
    if (card) card.note = note;
  }

  /** True when the decision controls may be enabled for this card. */
  canSubmit(candidateId: string, decision: Decision): boolean {
    const card = this.card(candidateId);
    return !!card && blockReason(card.checklist, decision) === null;
  }

  async submit(candidateId: string, decision: Decision): Promise<SubmitOutcome> {
    const card = this.card(candidateId);
    if (!card) return { kind: "blocked", reason: "candidate is no longer queued" };
    const reason = blockReason(card.checklist, decision);
    if (reason !== null) {
      card.error = reason;
      return { kind: "blocked", reason };
    }
    try {
      const record = await this.api.submitDecision(
        candidateId,
        decision,
        asFlags(card.checklist),
        this.reviewerId,
        card.note || undefined,
      );
      this.remove(candidateId);
      return { kind: "decided", record };
    } catch (err) {
      if (err instanceof DecisionConflictError) {
        // First decision wins; show the winning record and flag the card.
        card.conflict = err.existing;
        card.stale = true;
        return { kind: "conflict", existing: err.existing };
      }
      if (err instanceof ValidationRejectedError) {
        card.error = err.message;
        return { kind: "rejected", reason: err.message };
      }
      // Transport failure: retain the decision locally, never auto-submit.
      const draft: DecisionDraft = {
        checklist: { ...card.checklist },
        decision,
        note: card.note || undefined,
      };
      card.draft = draft;
      card.error = err instanceof Error ? err.message : String(err);
      return { kind: "network_error", draft };
    }
  }

  private remove(candidateId: string): void {
    this.cards = this.cards.filter((c) => c.candidate.candidate_id !== candidateId);
  }
}
