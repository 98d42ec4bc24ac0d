// Thin typed client over the documented engine endpoints. The UI never
// touches the store directly and never recomputes server statistics.

import type {
  AcceptanceMetrics,
  ApiErrorBody,
  CandidateCard,
  Decision,
  Flag,
  ReviewRecord,
} from "./types.js";

export class DecisionConflictError extends Error {
  readonly existing: ReviewRecord;
  constructor(message: string, existing: ReviewRecord) {
    super(message);
    this.existing = existing;
  }
}

export class ValidationRejectedError extends Error {
  readonly fieldErrors: Record<string, string>;
  constructor(message: string, fieldErrors: Record<string, string> = {}) {
    super(message);
    this.fieldErrors = fieldErrors;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ReviewApi {
  constructor(
    private readonly baseUrl: string,
    private readonly token?: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async errorBody(res: Response): Promise<ApiErrorBody> {
    try {
      const body = await res.json();
      if (body && body.error) return body.error as ApiErrorBody;
    } catch {
      // fall through: non-JSON error body
    }
    return { code: "http_error", message: `request failed: ${res.status}` };
  }

  async fetchQueue(): Promise<CandidateCard[]> {
    const res = await this.fetchImpl(`${this.baseUrl}/api/queue`, {
      headers: this.headers(),
    });
    if (!res.ok) throw new Error((await this.errorBody(res)).message);
    const body = await res.json();
    return body.pending as CandidateCard[];
  }

  async fetchCandidate(candidateId: string): Promise<CandidateCard & { review?: ReviewRecord }> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/api/candidates/${encodeURIComponent(candidateId)}`,
      { headers: this.headers() },
    );
    if (!res.ok) throw new Error((await this.errorBody(res)).message);
    return res.json();
  }

  async submitDecision(
    candidateId: string,
    decision: Decision,
    flags: Record<string, Flag>,
    reviewerId: string,
    note?: string,
  ): Promise<ReviewRecord> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/api/candidates/${encodeURIComponent(candidateId)}/decision`,
      {
        method: "POST",
        headers: this.headers(true),
        body: JSON.stringify({
          decision,
          dimension_flags: flags,
          reviewer_id: reviewerId,
          note: note ?? null,
        }),
      },
    );
    if (res.status === 409) {
      const error = await this.errorBody(res);
      if (!error.existing) throw new Error(error.message);
      throw new DecisionConflictError(error.message, error.existing);
    }
    if (res.status === 422) {
      const error = await this.errorBody(res);
      throw new ValidationRejectedError(error.message, error.field_errors ?? {});
    }
    if (!res.ok) throw new Error((await this.errorBody(res)).message);
    return res.json();
  }

  async fetchAcceptanceMetrics(): Promise<AcceptanceMetrics> {
    const res = await this.fetchImpl(`${this.baseUrl}/api/metrics/acceptance`, {
      headers: this.headers(),
    });
    if (!res.ok) throw new Error((await this.errorBody(res)).message);
    return res.json();
  }
}
