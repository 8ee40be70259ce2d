/** Admin panel: scenario editing, what-if model predictions with
 * parameter sliders, a live per-candidate score chart, and dataset
 * export. Everything shown is fetched from the service; raising the
 * threshold slider can only ever shrink the highlighted set. */

import { ApiError, ExperimentApi } from "./api.js";
import type { ModelQuery, ScenarioFile } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

interface Controls {
  scenario: HTMLSelectElement;
  winners: HTMLInputElement;
  missing: HTMLInputElement;
  model: HTMLSelectElement;
  alpha: HTMLInputElement;
  beta: HTMLInputElement;
  tau: HTMLInputElement;
  x: HTMLInputElement;
}

export class AdminPanel {
  private controls!: Controls;
  private predictionBox!: HTMLElement;
  private scoreBox!: HTMLElement;
  private editor!: HTMLTextAreaElement;
  private editorError!: HTMLElement;
  private scenarios: Record<string, ScenarioFile> = {};

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ExperimentApi,
  ) {}

  async start(): Promise<void> {
    this.buildSkeleton();
    await this.reloadScenarios();
    await this.refresh();
  }

  private buildSkeleton(): void {
    this.root.replaceChildren();
    const form = el("div", "what-if");
    form.append(el("h2", undefined, "What-if predictions"));

    const scenario = el("select", "scenario-select") as HTMLSelectElement;
    const winners = this.slider("winners", 1, 3, 1, 1);
    const missing = this.slider("missing", 0, 3, 1, 0);
    const model = el("select", "model-select") as HTMLSelectElement;
    for (const name of ["aut", "au", "complete", "takex", "optimal"]) {
      const option = el("option", undefined, name) as HTMLOptionElement;
      option.value = name;
      model.append(option);
    }
    const alpha = this.slider("alpha", 0, 2, 0.1, 1);
    const beta = this.slider("beta", 1, 32, 1, 2);
    const tau = this.slider("tau", 0, 0.1, 0.0005, 0.007);
    const x = this.slider("x", 1, 5, 1, 1);

    this.controls = { scenario, winners, missing, model, alpha, beta, tau, x };
    for (const [name, control] of Object.entries(this.controls)) {
      const row = el("div", `control control-${name}`);
      row.append(el("span", "control-name", name));
      row.append(control);
      form.append(row);
      control.addEventListener("change", () => void this.refresh());
      control.addEventListener("input", () => void this.refresh());
    }
    this.root.append(form);

    this.predictionBox = el("div", "prediction");
    this.root.append(this.predictionBox);
    this.scoreBox = el("div", "scores");
    this.root.append(this.scoreBox);

    const editorBox = el("div", "editor");
    editorBox.append(el("h2", undefined, "Scenario editor"));
    this.editor = el("textarea", "scenario-json") as HTMLTextAreaElement;
    this.editor.rows = 12;
    this.editorError = el("p", "editor-error");
    const save = el("button", "save-scenario", "Save scenario");
    save.addEventListener("click", () => void this.saveScenario());
    editorBox.append(this.editor, this.editorError, save);
    this.root.append(editorBox);

    const exportBtn = el("button", "export", "Download responses CSV");
    exportBtn.addEventListener("click", () => void this.downloadExport());
    this.root.append(exportBtn);
  }

  private slider(name: string, min: number, max: number, step: number, value: number): HTMLInputElement {
    const input = el("input", `slider slider-${name}`) as HTMLInputElement;
    input.type = "range";
    input.min = String(min);
    input.max = String(max);
    input.step = String(step);
    input.value = String(value);
    return input;
  }

  async reloadScenarios(): Promise<void> {
    this.scenarios = await this.api.listScenarios();
    const select = this.controls.scenario;
    const previous = select.value;
    select.replaceChildren();
    for (const id of Object.keys(this.scenarios).sort()) {
      const option = el("option", undefined, id) as HTMLOptionElement;
      option.value = id;
      select.append(option);
    }
    if (previous && previous in this.scenarios) select.value = previous;
    const current = this.scenarios[select.value];
    if (current) this.editor.value = JSON.stringify(current, null, 2);
  }

  currentQuery(): { scenarioId: string; winners: number; missing: number; query: ModelQuery } {
    const c = this.controls;
    const model = c.model.value as ModelQuery["model"];
    const query: ModelQuery = { model };
    if (model === "au") {
      query.alpha = Number(c.alpha.value);
      query.beta = Number(c.beta.value);
    } else if (model === "aut") {
      query.beta = Number(c.beta.value);
      query.tau = Number(c.tau.value);
    } else if (model === "takex") {
      query.x = Number(c.x.value);
    }
    return {
      scenarioId: c.scenario.value,
      winners: Number(c.winners.value),
      missing: Number(c.missing.value),
      query,
    };
  }

  /** Re-fetch the prediction and score chart for the current controls. */
  async refresh(): Promise<void> {
    const { scenarioId, winners, missing, query } = this.currentQuery();
    if (!scenarioId) return;
    const prediction = await this.api.getPrediction(scenarioId, winners, missing, query);
    const approvedSet = new Set(prediction.ballot);

    this.predictionBox.replaceChildren();
    this.predictionBox.append(el("h2", undefined, `Predicted ballot (${query.model})`));
    const list = el("div", "prediction-candidates");
    const scenario = this.scenarios[scenarioId];
    const labels = scenario ? scenario.candidates : prediction.ballot;
    for (const label of labels) {
      const chip = el("span", approvedSet.has(label) ? "chip approved" : "chip", label);
      chip.dataset.label = label;
      list.append(chip);
    }
    this.predictionBox.append(list);
    if (prediction.value !== null) {
      this.predictionBox.append(
        el("p", "expected-value", `expected utility ${prediction.value.toFixed(4)}`),
      );
    }

    const scores = await this.api.getScores(
      scenarioId,
      winners,
      missing,
      Number(this.controls.beta.value),
      query.model === "au" ? Number(this.controls.alpha.value) : 1.0,
    );
    this.scoreBox.replaceChildren();
    this.scoreBox.append(el("h2", undefined, "Candidate scores"));
    const max = Math.max(...Object.values(scores.scores), 1e-12);
    for (const [label, score] of Object.entries(scores.scores)) {
      const row = el("div", "score-row");
      row.dataset.label = label;
      const bar = el("div", "score-bar");
      bar.style.width = `${Math.max(1, Math.round((score / max) * 100))}%`;
      row.append(el("span", "score-label", label), bar, el("span", "score-value", score.toExponential(3)));
      this.scoreBox.append(row);
    }
  }

  highlightedCandidates(): Set<string> {
    return new Set(
      [...this.predictionBox.querySelectorAll<HTMLElement>(".chip.approved")].map(
        (chip) => chip.dataset.label ?? "",
      ),
    );
  }

  async saveScenario(): Promise<void> {
    this.editorError.textContent = "";
    let parsed: ScenarioFile;
    try {
      parsed = JSON.parse(this.editor.value) as ScenarioFile;
    } catch (error) {
      this.editorError.textContent = `invalid JSON: ${(error as Error).message}`;
      return;
    }
    try {
      await this.api.saveScenario(parsed);
    } catch (error) {
      this.editorError.textContent =
        error instanceof ApiError ? error.detail : (error as Error).message;
      return;
    }
    await this.reloadScenarios();
    await this.refresh();
  }

  private async downloadExport(): Promise<void> {
    const csv = await this.api.exportCsv();
    const blob = new Blob([csv], { type: "text/csv" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "responses.csv";
    link.click();
    URL.revokeObjectURL(link.href);
  }
}
