/** Wire types mirrored from the experiment-service JSON API. */

export interface CandidateView {
  label: string;
  utility: number;
  cash: number;
  count: number;
}

export interface ScenarioView {
  scenarioId: string;
  winners: number;
  missing: number;
  position: number;
  total: number;
  knownBallots: number;
  candidates: CandidateView[];
}

export interface SessionCreated {
  sessionId: string;
  assignedK: number;
  firstScenario: ScenarioView | null;
}

export interface Outcome {
  scenarioId: string;
  winners: number;
  missing: number;
  sampledBallots: string[][];
  winnerSet: string[];
  utilityDelta: number;
  payoffDelta: number;
}

export interface BallotAccepted {
  outcome: Outcome;
  accumulatedPayoff: number;
  nextScenario: ScenarioView | null;
}

export interface SessionResults {
  sessionId: string;
  participantId: string;
  assignedK: number;
  position: number;
  total: number;
  completed: boolean;
  accumulatedPayoff: number;
  bonus: number;
  earnings: number;
  outcomes: Outcome[];
  currentScenario: ScenarioView | null;
}

export interface Prediction {
  model: string;
  scenarioId: string;
  winners: number;
  missing: number;
  ballot: string[];
  value: number | null;
  note: string;
}

export interface ScoreResponse {
  scenarioId: string;
  winners: number;
  missing: number;
  scores: Record<string, number>;
  note: string;
}

export interface ScenarioFile {
  id: string;
  candidates: string[];
  utilities: Record<string, number>;
  counts: Record<string, number>;
  knownBallots: number;
  missingBallots: number;
  winners: number;
}

export interface ModelQuery {
  model: "complete" | "takex" | "au" | "aut" | "optimal";
  alpha?: number;
  beta?: number;
  tau?: number;
  x?: number;
}
