// Dashboard view model: pure formatting of server-computed metrics. The
// UI performs no statistical arithmetic; rates and ratios arrive computed.

import type { AcceptanceMetrics } from "./types.js";

export interface DashboardView {
  days: {
    date: string;
    accepted: number;
    rejected: number;
    rateLabel: string;           // e.g. "71.4%" or "–"
    roleShares: { role: string; share: number }[];
  }[];
  overallRateLabel: string;
  totalGenerated: number;
  pendingCount: number;
}

export function formatRate(rate: number | null): string {
  return rate === null ? "–" : `${(rate * 100).toFixed(1)}%`;
}

export function dashboardView(metrics: AcceptanceMetrics): DashboardView {
  return {
    days: metrics.rows.map((row) => ({
      date: row.date,
      accepted: row.accepted,
      rejected: row.rejected,
      rateLabel: formatRate(row.acceptance_rate),
      roleShares: Object.entries(row.role_composition)
        .map(([role, share]) => ({ role, share }))
        .sort((a, b) => a.role.localeCompare(b.role)),
    })),
    overallRateLabel: formatRate(metrics.overall_rate),
    totalGenerated: metrics.total_generated,
    pendingCount: metrics.pending,
  };
}
