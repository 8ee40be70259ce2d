/** Typed client for the experiment service. The UI never computes election
 * math itself: every prediction, outcome, and payoff comes through here. */

import type {
  BallotAccepted,
  ModelQuery,
  Prediction,
  ScenarioFile,
  ScoreResponse,
  SessionCreated,
  SessionResults,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.detail !== undefined) detail = JSON.stringify(body.detail);
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, detail);
}

export class ExperimentApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(participantId: string): Promise<SessionCreated> {
    return this.post<SessionCreated>("/sessions", { participantId });
  }

  submitBallot(
    sessionId: string,
    condition: { scenarioId: string; winners: number; missing: number },
    approved: string[],
  ): Promise<BallotAccepted> {
    return this.post<BallotAccepted>(`/sessions/${sessionId}/ballots`, {
      ...condition,
      approved,
    });
  }

  getResults(sessionId: string): Promise<SessionResults> {
    return this.request<SessionResults>(`/sessions/${sessionId}/results`);
  }

  getPrediction(
    scenarioId: string,
    winners: number,
    missing: number,
    query: ModelQuery,
  ): Promise<Prediction> {
    const params = new URLSearchParams({
      scenarioId,
      k: String(winners),
      missing: String(missing),
      model: query.model,
    });
    for (const key of ["alpha", "beta", "tau", "x"] as const) {
      const value = query[key];
      if (value !== undefined) params.set(key, String(value));
    }
    return this.request<Prediction>(`/predict?${params}`);
  }

  getScores(
    scenarioId: string,
    winners: number,
    missing: number,
    beta: number,
    alpha = 1.0,
  ): Promise<ScoreResponse> {
    const params = new URLSearchParams({
      scenarioId,
      k: String(winners),
      missing: String(missing),
      beta: String(beta),
      alpha: String(alpha),
    });
    return this.request<ScoreResponse>(`/scores?${params}`);
  }

  listScenarios(): Promise<Record<string, ScenarioFile>> {
    return this.request<Record<string, ScenarioFile>>("/scenarios");
  }

  saveScenario(scenario: ScenarioFile): Promise<ScenarioFile> {
    return this.post<ScenarioFile>("/scenarios", scenario);
  }

  async exportCsv(): Promise<string> {
    const response = await this.fetchFn(`${this.baseUrl}/export?format=csv`);
    if (!response.ok) throw await parseError(response);
    return response.text();
  }
}
