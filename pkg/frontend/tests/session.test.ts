import { beforeEach, describe, expect, it } from "vitest";

import { ExperimentApi } from "../src/api.js";
import { SessionFlow } from "../src/session.js";
import { makeFakeService, type FakeService } from "./fakeService.js";

describe("SessionFlow", () => {
  let fake: FakeService;
  let flow: SessionFlow;

  beforeEach(() => {
    fake = makeFakeService();
    flow = new SessionFlow(new ExperimentApi("http://fake", fake.fetchFn), "p1");
  });

  it("joins and presents the first condition", async () => {
    await flow.join();
    expect(flow.state.kind).toBe("voting");
    if (flow.state.kind !== "voting") return;
    expect(flow.state.scenario.scenarioId).toBe("A");
    expect(flow.state.scenario.winners).toBe(1);
    expect(flow.state.scenario.total).toBe(12);
  });

  it("toggles approvals only among displayed candidates", async () => {
    await flow.join();
    flow.toggle("E");
    flow.toggle("B");
    flow.toggle("Z");
    expect([...flow.approved].sort()).toEqual(["B", "E"]);
    flow.toggle("B");
    expect([...flow.approved]).toEqual(["E"]);
  });

  it("walks all twelve conditions to completion", async () => {
    await flow.join();
    for (let i = 0; i < 12; i++) {
      expect(flow.state.kind).toBe("voting");
      flow.toggle("D");
      await flow.submit();
      expect(flow.state.kind).toBe("outcome");
      await flow.continueToNext();
    }
    expect(flow.state.kind).toBe("done");
    if (flow.state.kind !== "done") return;
    expect(flow.state.results.completed).toBe(true);
    expect(flow.state.results.outcomes).toHaveLength(12);
  });

  it("shows realized winners and payoff after a submission", async () => {
    await flow.join();
    flow.toggle("D");
    await flow.submit();
    expect(flow.state.kind).toBe("outcome");
    if (flow.state.kind !== "outcome") return;
    expect(flow.state.outcome.winnerSet).toEqual(["D"]);
    expect(flow.state.outcome.payoffDelta).toBeCloseTo(0.5);
    expect(flow.state.accumulated).toBeCloseTo(0.5);
  });

  it("keeps selections and retries after a network failure", async () => {
    await flow.join();
    flow.toggle("E");
    flow.toggle("B");
    fake.failNextSubmit.count = 1;
    await flow.submit();
    expect(flow.state.kind).toBe("error");
    if (flow.state.kind !== "error") return;
    expect([...(flow.state.approved ?? [])].sort()).toEqual(["B", "E"]);
    await flow.retry();
    expect(flow.state.kind).toBe("outcome");
    const session = [...fake.sessions.values()][0]!;
    expect(session.rows[0]).toContain("B|E");
  });

  it("resyncs to the queue head on a 409", async () => {
    await flow.join();
    // another client submits the head behind our back
    const api = new ExperimentApi("http://fake", fake.fetchFn);
    const sessionId = flow.sessionId!;
    await api.submitBallot(sessionId, { scenarioId: "A", winners: 1, missing: 0 }, ["D"]);
    flow.toggle("E");
    await flow.submit();
    expect(flow.state.kind).toBe("voting");
    if (flow.state.kind !== "voting") return;
    expect(flow.state.scenario.scenarioId).toBe("B");
    expect(flow.state.scenario.position).toBe(1);
    expect(flow.approved.size).toBe(0);
  });

  it("reports a join failure with retry", async () => {
    const broken = new SessionFlow(new ExperimentApi("http://fake", fake.fetchFn), "");
    await broken.join();
    expect(broken.state.kind).toBe("error");
    if (broken.state.kind !== "error") return;
    expect(broken.state.retry).toBe("join");
    expect(broken.state.message).toContain("participantId");
  });
});
