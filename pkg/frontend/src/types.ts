// Payload shapes of the engine HTTP API consumed by the review UI.

export type Dimension =
  | "role_task_alignment"
  | "interactional_appropriateness"
  | "factual_plausibility";

export const DIMENSIONS: Dimension[] = [
  "role_task_alignment",
  "interactional_appropriateness",
  "factual_plausibility",
];

export const DIMENSION_LABELS: Record<Dimension, string> = {
  role_task_alignment: "Role and task alignment",
  interactional_appropriateness: "Interactional appropriateness",
  factual_plausibility: "Factual plausibility",
};

export type Flag = "pass" | "fail";
export type Decision = "accept" | "reject";
export type CandidateStatus = "pending" | "accepted" | "rejected";

export interface ThreadEntry {
  id: string;
  author_id: string;
  text: string;
}

export interface ThreadContext {
  post: { post_id: string; title: string; content: string; author_id: string };
  chain: ThreadEntry[];
  target_kind: "post" | "comment" | "reply";
}

export interface CandidateCard {
  candidate_id: string;
  target_id: string;
  role: string;
  text: string;
  generated_at: string;
  status: CandidateStatus;
  thread?: ThreadContext;
}

export interface ReviewRecord {
  candidate_id: string;
  decision: Decision;
  dimension_flags: Record<string, Flag>;
  reviewer_id: string;
  decided_at: string;
  note?: string | null;
}

export interface AcceptanceRow {
  date: string;
  generated: number;
  accepted: number;
  rejected: number;
  acceptance_rate: number | null;
  role_composition: Record<string, number>;
}

export interface AcceptanceMetrics {
  rows: AcceptanceRow[];
  overall_rate: number | null;
  total_generated: number;
  pending: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field_errors?: Record<string, string>;
  existing?: ReviewRecord;
}
