/**
 * Session state mirror.
 *
 * Holds the last server-confirmed view of one decision session and
 * funnels every mutation through the service with the current version.
 * The store never computes weights, scores or consistency ratios
 * itself: displayed numbers always come from service responses. After
 * each committed change it re-polls the ranking; on a version conflict
 * it reloads and reports, never silently replaying the lost edit.
 */

import { ApiClient, ApiError, VersionConflictError } from "./api";
import type {
  DerivedPayload,
  KnockoutDoc,
  RankingResponse,
  ScenarioDocument,
  SensitivityResponse,
  VectorPayload,
} from "./types";

export interface UiState {
  id: string;
  version: number;
  document: ScenarioDocument;
  derived: DerivedPayload;
  ranking: RankingResponse;
  sensitivity: SensitivityResponse | null;
}

export interface StateEvent {
  kind: "loaded" | "mutated" | "conflict" | "rejected" | "sensitivity";
  message?: string;
}

type Listener = (state: UiState, event: StateEvent) => void;

export class SessionStore {
  state: UiState | null = null;
  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(event: StateEvent): void {
    if (!this.state) {
      return;
    }
    for (const listener of this.listeners) {
      listener(this.state, event);
    }
  }

  private require(): UiState {
    if (!this.state) {
      throw new Error("no session loaded");
    }
    return this.state;
  }

  async load(id: string): Promise<void> {
    const problem = await this.api.getProblem(id);
    const ranking = await this.api.getRanking(id);
    this.state = {
      id: problem.id,
      version: problem.version,
      document: problem.document,
      derived: problem.derived,
      ranking,
      sensitivity: null,
    };
    this.emit({ kind: "loaded" });
  }

  /** Reload after a conflict; the in-flight edit is dropped, not replayed. */
  private async recoverFromConflict(error: VersionConflictError): Promise<void> {
    const state = this.require();
    await this.load(state.id);
    this.emit({ kind: "conflict", message: error.message });
  }

  private async refreshRanking(): Promise<void> {
    const state = this.require();
    state.ranking = await this.api.getRanking(state.id);
  }

  async commitJudgments(
    stakeholder: string,
    labels: string[],
    entries: number[][],
    criterion?: string,
  ): Promise<void> {
    const state = this.require();
    try {
      const response = await this.api.putJudgments(
        state.id, stakeholder, { criterion, labels, entries }, state.version);
      state.version = response.version;
      state.derived.sub_weights[response.criterion] = response.weights;
      const group = state.derived.stakeholders[response.criterion] ?? [];
      const entry = {
        stakeholder,
        weights: response.stakeholder_weights,
        consistency: response.consistency,
      };
      const index = group.findIndex((e) => e.stakeholder === stakeholder);
      if (index >= 0) {
        group[index] = entry;
      } else {
        group.push(entry);
      }
      state.derived.stakeholders[response.criterion] = group;
      state.derived.warnings = response.warnings;
      await this.refreshRanking();
      this.emit({ kind: "mutated" });
    } catch (error) {
      await this.handleMutationError(error);
    }
  }

  async commitTopLevelWeights(weights: VectorPayload): Promise<void> {
    const state = this.require();
    try {
      const response = await this.api.putWeights(
        state.id, { top_level: weights }, state.version);
      state.version = response.version;
      state.derived = response.derived;
      state.document.weights.top_level = weights;
      await this.refreshRanking();
      this.emit({ kind: "mutated" });
    } catch (error) {
      await this.handleMutationError(error);
    }
  }

  async commitKnockouts(rules: KnockoutDoc[]): Promise<void> {
    const state = this.require();
    try {
      const response = await this.api.putKnockouts(state.id, rules, state.version);
      state.version = response.version;
      state.document.knockouts = response.knockouts;
      await this.refreshRanking();
      this.emit({ kind: "mutated" });
    } catch (error) {
      await this.handleMutationError(error);
    }
  }

  async runSensitivity(criterion: string, grid = 101): Promise<void> {
    const state = this.require();
    state.sensitivity = await this.api.postSensitivity(state.id, { criterion, grid });
    this.emit({ kind: "sensitivity" });
  }

  private async handleMutationError(error: unknown): Promise<void> {
    if (error instanceof VersionConflictError) {
      await this.recoverFromConflict(error);
      return;
    }
    if (error instanceof ApiError) {
      // e.g. a knock-out change the document cannot support; state on
      // the server is unchanged, so just surface the report
      this.emit({ kind: "rejected", message: error.message });
      return;
    }
    throw error;
  }
}

/**
 * Proportional renormalization used when one slider moves: the chosen
 * criterion takes the target weight, the rest keep their mutual ratios.
 * This only shapes the request body; displayed weights still come from
 * the service response.
 */
export function proportionalTarget(
  current: VectorPayload,
  criterion: string,
  target: number,
): VectorPayload {
  const index = current.labels.indexOf(criterion);
  if (index < 0) {
    throw new Error(`unknown criterion ${criterion}`);
  }
  const old = current.values[index];
  const factor = (1 - target) / (1 - old);
  const values = current.values.map((value, k) =>
    k === index ? target : value * factor);
  return { labels: [...current.labels], values };
}
