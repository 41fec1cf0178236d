/** JSON payload shapes exchanged with the decision service. */

export interface VectorPayload {
  labels: string[];
  values: number[];
}

export interface ConsistencyPayload {
  lambda_max: number;
  ci: number;
  ri: number;
  cr: number;
  acceptable: boolean;
}

export interface StakeholderEntry {
  stakeholder: string;
  weights: VectorPayload;
  consistency: ConsistencyPayload;
}

export interface DerivedPayload {
  top_level_weights: VectorPayload;
  sub_weights: Record<string, VectorPayload>;
  stakeholders: Record<string, StakeholderEntry[]>;
  warnings: string[];
}

export interface ScaleBinDoc {
  label: string;
  lower?: number;
  upper?: number | null;
  score: number;
}

export interface CriterionDoc {
  id: string;
  name: string;
  kind?: string;
  direction?: string;
  children?: string[];
  scale?: {
    kind: string;
    bins?: ScaleBinDoc[];
    levels?: { label: string; score: number }[];
  } | null;
}

export interface KnockoutDoc {
  criterion: string;
  predicate: string;
  threshold: number | string[];
  reason?: string;
}

export interface ScenarioDocument {
  format_version: number;
  objective: string;
  criteria: CriterionDoc[];
  weights: {
    top_level: VectorPayload;
    sub?: Record<string, VectorPayload>;
  };
  judgments?: Record<
    string,
    { stakeholder: string; labels: string[]; entries: number[][] }[]
  >;
  knockouts?: KnockoutDoc[];
  alternatives: { id: string; metrics: Record<string, number | string> }[];
}

export interface ProblemResponse {
  id: string;
  version: number;
  document: ScenarioDocument;
  derived: DerivedPayload;
}

export interface BreakdownPayload {
  alternative_id: string;
  criterion_scores: Record<string, number>;
  sub_scores: Record<string, number>;
  labels: Record<string, string>;
  total: number;
  rank: number;
}

export interface RankingResponse {
  id: string;
  version: number;
  objective: string;
  retained: string[];
  eliminated: { id: string; criterion: string; reason: string }[];
  breakdowns: BreakdownPayload[];
  warnings: string[];
}

export interface JudgmentResponse {
  id: string;
  version: number;
  criterion: string;
  stakeholder: string;
  stakeholder_weights: VectorPayload;
  consistency: ConsistencyPayload;
  weights: VectorPayload;
  warnings: string[];
}

export interface WeightsResponse {
  id: string;
  version: number;
  derived: DerivedPayload;
}

export interface KnockoutsResponse {
  id: string;
  version: number;
  knockouts: KnockoutDoc[];
}

export interface SweepPointPayload {
  weight: number;
  ranking: string[];
  totals: Record<string, number>;
}

export interface SensitivityResponse {
  id: string;
  version: number;
  criterion: string;
  baseline_weight: number;
  baseline_ranking: string[];
  stability_interval: { lower: number; upper: number; tie_at_baseline: boolean };
  sweep: SweepPointPayload[];
  reversals: { weight: number; displaced: string; displacing: string }[];
  sampling?: {
    samples: number;
    seed: number;
    frequencies: Record<string, number>;
  };
}
