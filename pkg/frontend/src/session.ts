/** Participant-flow state machine.
 *
 * Pure application logic over the API client: joining a session, toggling
 * approvals, submitting the queue-head ballot, showing the realized
 * outcome, and finishing. Kept free of DOM so it can be tested directly.
 *
 * Error discipline: a network failure keeps the current selections and
 * offers a retry; a 409 (stale queue position, e.g. after a duplicated
 * submit) resyncs to the service's queue head, which makes retries
 * idempotent per queue position.
 */

import { ApiError, ExperimentApi } from "./api.js";
import type { Outcome, ScenarioView, SessionResults } from "./types.js";

export type FlowState =
  | { kind: "idle" }
  | { kind: "joining" }
  | { kind: "voting"; scenario: ScenarioView; approved: Set<string> }
  | { kind: "submitting"; scenario: ScenarioView; approved: Set<string> }
  | {
      kind: "outcome";
      scenario: ScenarioView;
      outcome: Outcome;
      accumulated: number;
      next: ScenarioView | null;
    }
  | { kind: "done"; results: SessionResults }
  | {
      kind: "error";
      message: string;
      retry: "join" | "submit";
      scenario?: ScenarioView;
      approved?: Set<string>;
    };

type Listener = (state: FlowState) => void;

function isNetworkFailure(error: unknown): boolean {
  return !(error instanceof ApiError);
}

export class SessionFlow {
  state: FlowState = { kind: "idle" };
  sessionId: string | null = null;
  assignedK: number | null = null;

  private listeners: Listener[] = [];
  private inFlight = false;

  constructor(
    private readonly api: ExperimentApi,
    private readonly participantId: string,
  ) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private setState(state: FlowState): void {
    this.state = state;
    for (const listener of this.listeners) listener(state);
  }

  /** Selections are only valid among the currently displayed candidates. */
  get approved(): Set<string> {
    return this.state.kind === "voting" || this.state.kind === "submitting"
      ? this.state.approved
      : new Set();
  }

  get canSubmit(): boolean {
    return this.state.kind === "voting" && !this.inFlight;
  }

  async join(): Promise<void> {
    this.setState({ kind: "joining" });
    try {
      const created = await this.api.createSession(this.participantId);
      this.sessionId = created.sessionId;
      this.assignedK = created.assignedK;
      if (created.firstScenario === null) {
        await this.finish();
      } else {
        this.setState({
          kind: "voting",
          scenario: created.firstScenario,
          approved: new Set(),
        });
      }
    } catch (error) {
      this.setState({
        kind: "error",
        message: messageOf(error),
        retry: "join",
      });
    }
  }

  toggle(label: string): void {
    if (this.state.kind !== "voting") return;
    if (!this.state.scenario.candidates.some((c) => c.label === label)) return;
    const approved = new Set(this.state.approved);
    if (approved.has(label)) approved.delete(label);
    else approved.add(label);
    this.setState({ ...this.state, approved });
  }

  async submit(): Promise<void> {
    if (this.state.kind !== "voting" || this.inFlight || this.sessionId === null) return;
    const { scenario, approved } = this.state;
    this.inFlight = true;
    this.setState({ kind: "submitting", scenario, approved });
    try {
      const accepted = await this.api.submitBallot(
        this.sessionId,
        {
          scenarioId: scenario.scenarioId,
          winners: scenario.winners,
          missing: scenario.missing,
        },
        [...approved].sort(),
      );
      this.setState({
        kind: "outcome",
        scenario,
        outcome: accepted.outcome,
        accumulated: accepted.accumulatedPayoff,
        next: accepted.nextScenario,
      });
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.resync();
      } else if (isNetworkFailure(error)) {
        this.setState({
          kind: "error",
          message: messageOf(error),
          retry: "submit",
          scenario,
          approved,
        });
      } else {
        this.setState({
          kind: "error",
          message: messageOf(error),
          retry: "submit",
          scenario,
          approved: new Set(),
        });
      }
    } finally {
      this.inFlight = false;
    }
  }

  /** Retry after a failure without losing what the participant selected. */
  async retry(): Promise<void> {
    if (this.state.kind !== "error") return;
    if (this.state.retry === "join") {
      await this.join();
      return;
    }
    const { scenario, approved } = this.state;
    if (scenario === undefined) {
      await this.resync();
      return;
    }
    this.setState({ kind: "voting", scenario, approved: approved ?? new Set() });
    await this.submit();
  }

  async continueToNext(): Promise<void> {
    if (this.state.kind !== "outcome") return;
    if (this.state.next === null) {
      await this.finish();
    } else {
      this.setState({ kind: "voting", scenario: this.state.next, approved: new Set() });
    }
  }

  /** Pull the authoritative queue head (used after 409 or a lost reply). */
  async resync(): Promise<void> {
    if (this.sessionId === null) return;
    try {
      const results = await this.api.getResults(this.sessionId);
      if (results.completed || results.currentScenario === null) {
        this.setState({ kind: "done", results });
      } else {
        this.setState({
          kind: "voting",
          scenario: results.currentScenario,
          approved: new Set(),
        });
      }
    } catch (error) {
      this.setState({ kind: "error", message: messageOf(error), retry: "submit" });
    }
  }

  private async finish(): Promise<void> {
    if (this.sessionId === null) return;
    const results = await this.api.getResults(this.sessionId);
    this.setState({ kind: "done", results });
  }
}

function messageOf(error: unknown): string {
  if (error instanceof ApiError) return error.detail;
  if (error instanceof Error) return error.message;
  return String(error);
}
