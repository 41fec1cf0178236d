/**
 * Typed client for the decision service.
 *
 * Every mutation carries the last seen session version in an If-Match
 * header; a stale version surfaces as VersionConflictError so callers
 * can reload instead of overwriting someone else's change.
 */

import type {
  JudgmentResponse,
  KnockoutDoc,
  KnockoutsResponse,
  ProblemResponse,
  RankingResponse,
  ScenarioDocument,
  SensitivityResponse,
  VectorPayload,
  WeightsResponse,
} from "./types";

export class ApiError extends Error {
  status: number;
  code: string;
  location: string;

  constructor(status: number, code: string, message: string, location = "") {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.location = location;
  }
}

export class VersionConflictError extends ApiError {
  currentVersion: number | null;

  constructor(message: string, location = "") {
    super(409, "version_conflict", message, location);
    this.name = "VersionConflictError";
    const match = /current version (\d+)/.exec(message);
    this.currentVersion = match ? Number(match[1]) : null;
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) {
    return;
  }
  let code = "http_error";
  let message = `request failed with status ${response.status}`;
  let location = "";
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
    location = body.location ?? "";
  } catch {
    // non-JSON error body; keep the generic message
  }
  if (response.status === 409) {
    throw new VersionConflictError(message, location);
  }
  throw new ApiError(response.status, code, message, location);
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.url(path));
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  private async send<T>(
    method: string,
    path: string,
    body: unknown,
    version?: number,
  ): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (version !== undefined) {
      headers["If-Match"] = String(version);
    }
    const response = await fetch(this.url(path), {
      method,
      headers,
      body: JSON.stringify(body),
    });
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  createProblem(document: ScenarioDocument): Promise<{ id: string; version: number }> {
    return this.send("POST", "/problems", document);
  }

  listProblems(): Promise<{ problems: { id: string; version: number; objective: string }[] }> {
    return this.getJson("/problems");
  }

  getProblem(id: string): Promise<ProblemResponse> {
    return this.getJson(`/problems/${id}`);
  }

  getRanking(id: string): Promise<RankingResponse> {
    return this.getJson(`/problems/${id}/ranking`);
  }

  putJudgments(
    id: string,
    stakeholder: string,
    body: { criterion?: string; labels: string[]; entries: number[][] },
    version: number,
  ): Promise<JudgmentResponse> {
    return this.send("PUT", `/problems/${id}/judgments/${stakeholder}`, body, version);
  }

  putWeights(
    id: string,
    body: { top_level?: VectorPayload; sub?: Record<string, VectorPayload> },
    version: number,
  ): Promise<WeightsResponse> {
    return this.send("PUT", `/problems/${id}/weights`, body, version);
  }

  putKnockouts(
    id: string,
    rules: KnockoutDoc[],
    version: number,
  ): Promise<KnockoutsResponse> {
    return this.send("PUT", `/problems/${id}/knockouts`, { knockouts: rules }, version);
  }

  postSensitivity(
    id: string,
    body: { criterion: string; grid?: number; samples?: number; seed?: number },
  ): Promise<SensitivityResponse> {
    return this.send("POST", `/problems/${id}/sensitivity`, body);
  }
}
