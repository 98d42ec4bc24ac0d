// Moderation checklist state: all three dimensions must be explicitly set
// before any decision control enables, and accept requires three passes
// (the client-side mirror of the server invariant).

import { DIMENSIONS, type Decision, type Dimension, type Flag } from "./types.js";

export type ChecklistState = Partial<Record<Dimension, Flag>>;

export function emptyChecklist(): ChecklistState {
  return {};
}

export function isComplete(checklist: ChecklistState): boolean {
  return DIMENSIONS.every((dim) => checklist[dim] === "pass" || checklist[dim] === "fail");
}

export function failingDimensions(checklist: ChecklistState): Dimension[] {
  return DIMENSIONS.filter((dim) => checklist[dim] === "fail");
}

/** Why a decision cannot be submitted right now, or null if it can. */
export function blockReason(checklist: ChecklistState, decision: Decision): string | null {
  if (!isComplete(checklist)) {
    return "set all three dimensions before deciding";
  }
  const failing = failingDimensions(checklist);
  if (decision === "accept" && failing.length > 0) {
    return `accept requires all dimensions to pass (failing: ${failing.join(", ")})`;
  }
  if (decision === "reject" && failing.length === 0) {
    return "reject requires at least one failing dimension";
  }
  return null;
}

export function asFlags(checklist: ChecklistState): Record<string, Flag> {
  const flags: Record<string, Flag> = {};
  for (const dim of DIMENSIONS) {
    const value = checklist[dim];
    if (value) flags[dim] = value;
  }
  return flags;
}
