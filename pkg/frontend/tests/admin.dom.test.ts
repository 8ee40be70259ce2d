/** Admin panel behavior against the fake service: what-if sliders,
 * threshold monotonicity, scenario editing, score chart. */

import { beforeEach, describe, expect, it } from "vitest";

import { AdminPanel } from "../src/admin.js";
import { ExperimentApi } from "../src/api.js";
import { makeFakeService, type FakeService } from "./fakeService.js";

describe("AdminPanel", () => {
  let fake: FakeService;
  let root: HTMLElement;
  let panel: AdminPanel;

  beforeEach(async () => {
    fake = makeFakeService();
    root = document.createElement("div");
    document.body.replaceChildren(root);
    panel = new AdminPanel(root, new ExperimentApi("http://fake", fake.fetchFn));
    await panel.start();
  });

  async function setTau(value: number): Promise<void> {
    const slider = root.querySelector<HTMLInputElement>(".slider-tau")!;
    slider.value = String(value);
    await panel.refresh();
  }

  it("highlights the worked-example prediction at tau = 0.007", async () => {
    await setTau(0.007);
    expect([...panel.highlightedCandidates()].sort()).toEqual(["D"]);
    await setTau(0.001);
    expect([...panel.highlightedCandidates()].sort()).toEqual(["A", "B", "D"]);
  });

  it("raising tau never adds a highlighted candidate", async () => {
    const taus = [0, 0.0005, 0.001, 0.003, 0.007, 0.02, 0.1];
    let previous: Set<string> | null = null;
    for (const tau of taus) {
      await setTau(tau);
      const current = panel.highlightedCandidates();
      if (previous !== null) {
        for (const label of current) expect(previous.has(label)).toBe(true);
      }
      previous = current;
    }
    // and lowering it back grows the set again
    await setTau(0.0005);
    expect(panel.highlightedCandidates().size).toBeGreaterThan(previous!.size);
  });

  it("renders a score bar per candidate", () => {
    const rows = root.querySelectorAll(".score-row");
    expect(rows).toHaveLength(5);
    const widths = [...rows].map(
      (row) => row.querySelector<HTMLElement>(".score-bar")!.style.width,
    );
    expect(widths.every((w) => w.endsWith("%"))).toBe(true);
  });

  it("rejects an invalid scenario edit inline without saving", async () => {
    const editor = root.querySelector<HTMLTextAreaElement>(".scenario-json")!;
    const file = JSON.parse(editor.value);
    file.winners = 0;
    editor.value = JSON.stringify(file);
    await panel.saveScenario();
    expect(root.querySelector(".editor-error")?.textContent).toContain("k out of range");
    expect(fake.scenarios[file.id]!.winners).not.toBe(0);
  });

  it("accepts a valid scenario edit and reloads the list", async () => {
    const editor = root.querySelector<HTMLTextAreaElement>(".scenario-json")!;
    const file = JSON.parse(editor.value);
    file.id = "C";
    file.winners = 2;
    editor.value = JSON.stringify(file);
    await panel.saveScenario();
    expect(root.querySelector(".editor-error")?.textContent).toBe("");
    expect(Object.keys(fake.scenarios)).toContain("C");
    const options = [...root.querySelectorAll<HTMLOptionElement>(".scenario-select option")];
    expect(options.map((o) => o.value)).toContain("C");
  });

  it("switching the model to takex queries with x instead of tau", async () => {
    const model = root.querySelector<HTMLSelectElement>(".model-select")!;
    model.value = "takex";
    const x = root.querySelector<HTMLInputElement>(".slider-x")!;
    x.value = "2";
    await panel.refresh();
    expect([...panel.highlightedCandidates()].sort()).toEqual(["B", "D"]);
  });
});
