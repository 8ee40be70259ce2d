/** Participant view: renders the voting game over a SessionFlow.
 *
 * Participants see candidate payoffs as cash, the current approval
 * counts, and — after each submission — the realized winners and what
 * they earned. They never see model predictions or the sampled missing
 * ballots.
 */

import { formatCash } from "./money.js";
import { SessionFlow, type FlowState } from "./session.js";
import type { ScenarioView } from "./types.js";

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

export class ParticipantView {
  private pendingEmptyConfirm = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly flow: SessionFlow,
  ) {
    flow.onChange(() => this.render());
  }

  start(): void {
    this.render();
  }

  private render(): void {
    const state = this.flow.state;
    this.root.replaceChildren();
    switch (state.kind) {
      case "idle":
      case "joining":
        this.root.append(el("p", "status", state.kind === "idle" ? "Ready." : "Joining study..."));
        break;
      case "voting":
      case "submitting":
        this.renderScenario(state.scenario, state.approved, state.kind === "submitting");
        break;
      case "outcome": {
        const box = el("div", "outcome");
        box.append(el("h2", undefined, "Election result"));
        box.append(
          el("p", "winners", `Winners: ${state.outcome.winnerSet.join(", ") || "(none)"}`),
        );
        box.append(el("p", "delta", `You earned ${formatCash(state.outcome.payoffDelta)}`));
        box.append(el("p", "running", `Total so far: ${formatCash(state.accumulated)}`));
        const next = el("button", "continue", state.next ? "Next election" : "Finish");
        next.addEventListener("click", () => void this.flow.continueToNext());
        box.append(next);
        this.root.append(box);
        break;
      }
      case "done": {
        const box = el("div", "final");
        box.append(el("h2", undefined, "Study complete"));
        box.append(el("p", "bonus", `Bonus earned: ${formatCash(state.results.bonus)}`));
        box.append(el("p", "earnings", `Total payment: ${formatCash(state.results.earnings)}`));
        this.root.append(box);
        break;
      }
      case "error": {
        const box = el("div", "error");
        box.append(el("p", "message", `Something went wrong: ${state.message}`));
        const retry = el("button", "retry", "Retry");
        retry.addEventListener("click", () => void this.flow.retry());
        box.append(retry);
        this.root.append(box);
        break;
      }
    }
  }

  private renderScenario(scenario: ScenarioView, approved: Set<string>, submitting: boolean): void {
    const header = el("div", "condition");
    header.append(
      el("h2", undefined, `Election ${scenario.position + 1} of ${scenario.total}`),
    );
    header.append(
      el(
        "p",
        "rules",
        `${scenario.winners} winner${scenario.winners > 1 ? "s" : ""}; ` +
          `${scenario.missing} ballot${scenario.missing === 1 ? "" : "s"} still to be cast by others`,
      ),
    );
    this.root.append(header);

    const list = el("div", "candidates");
    for (const candidate of scenario.candidates) {
      const card = el("label", "candidate");
      card.dataset.label = candidate.label;
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.checked = approved.has(candidate.label);
      box.disabled = submitting;
      box.addEventListener("change", () => this.flow.toggle(candidate.label));
      card.append(box);
      card.append(el("span", "label", candidate.label));
      card.append(el("span", "cash", formatCash(candidate.cash)));
      card.append(el("span", "count", `${candidate.count} approvals so far`));
      list.append(card);
    }
    this.root.append(list);

    const submit = el("button", "submit", submitting ? "Submitting..." : "Submit ballot");
    submit.disabled = submitting || !this.flow.canSubmit;
    submit.addEventListener("click", () => void this.onSubmit());
    this.root.append(submit);

    if (this.pendingEmptyConfirm) {
      const confirmBox = el("div", "confirm-empty");
      confirmBox.append(
        el("p", undefined, "You have not approved anyone. Submit an empty ballot?"),
      );
      const yes = el("button", "confirm-yes", "Submit empty ballot");
      yes.addEventListener("click", () => {
        this.pendingEmptyConfirm = false;
        void this.flow.submit();
      });
      const no = el("button", "confirm-no", "Go back");
      no.addEventListener("click", () => {
        this.pendingEmptyConfirm = false;
        this.render();
      });
      confirmBox.append(yes, no);
      this.root.append(confirmBox);
    }
  }

  private async onSubmit(): Promise<void> {
    if (this.flow.state.kind !== "voting") return;
    if (this.flow.approved.size === 0 && !this.pendingEmptyConfirm) {
      this.pendingEmptyConfirm = true;
      this.render();
      return;
    }
    this.pendingEmptyConfirm = false;
    await this.flow.submit();
  }
}
