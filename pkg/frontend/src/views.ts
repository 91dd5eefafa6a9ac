/** DOM rendering for the four ballot screens and the results table.
 *
 * Views are thin: every rule lives in the session objects, and each
 * interaction re-renders its screen from session state.
 */

import { ApiError, ElectionApi } from "./api.js";
import {
  ApprovalSession,
  ElectionSnapshot,
  KnapsackSession,
  PairwiseSession,
  RankingSession,
} from "./session.js";
import type { BallotWire, ResultsWire } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export type SubmitHandler = (ballot: BallotWire) => Promise<void>;

function submitRow(enabled: boolean, label: string, onClick: () => void): HTMLElement {
  const row = el("div", "submit-row");
  const button = el("button", "submit", label);
  button.disabled = !enabled;
  button.addEventListener("click", onClick);
  row.appendChild(button);
  return row;
}

/** Budget screen: dollar steppers, full-cost toggles, live budget bar. */
export function renderKnapsack(
  root: HTMLElement,
  snapshot: ElectionSnapshot,
  session: KnapsackSession,
  onSubmit: () => void,
): void {
  root.replaceChildren();
  const used = snapshot.budget - session.remaining();
  const bar = el("div", "budget-bar");
  const fill = el("div", "budget-fill");
  fill.style.width = snapshot.budget ? `${(100 * used) / snapshot.budget}%` : "0%";
  if (session.canSubmit()) {
    fill.classList.add("full");
  }
  bar.appendChild(fill);
  root.appendChild(bar);
  root.appendChild(
    el(
      "p",
      "budget-note",
      `allocated ${used} of ${snapshot.budget}, remaining ${session.remaining()}`,
    ),
  );
  const list = el("div", "project-list");
  for (const project of snapshot.projects) {
    const row = el("div", "project-row");
    const full = el("input") as HTMLInputElement;
    full.type = "checkbox";
    full.checked = session.amount(project.id) === project.cost;
    full.addEventListener("change", () => {
      session.toggleFull(project.id);
      renderKnapsack(root, snapshot, session, onSubmit);
    });
    row.appendChild(full);
    row.appendChild(el("span", "name", `${project.name} (cost ${project.cost})`));
    const minus = el("button", "step", "-");
    minus.addEventListener("click", () => {
      session.step(project.id, -1);
      renderKnapsack(root, snapshot, session, onSubmit);
    });
    const amount = el("span", "amount", String(session.amount(project.id)));
    const plus = el("button", "step", "+");
    plus.addEventListener("click", () => {
      session.step(project.id, +1);
      renderKnapsack(root, snapshot, session, onSubmit);
    });
    row.append(minus, amount, plus);
    list.appendChild(row);
  }
  root.appendChild(list);
  root.appendChild(submitRow(session.canSubmit(), "Submit allocation", onSubmit));
}

/** Approval screen: checkboxes with a selection cap. */
export function renderApproval(
  root: HTMLElement,
  snapshot: ElectionSnapshot,
  session: ApprovalSession,
  onSubmit: () => void,
): void {
  root.replaceChildren();
  const capText = snapshot.k === null ? "any number of" : `up to ${snapshot.k}`;
  root.appendChild(el("p", "budget-note", `approve ${capText} projects`));
  const list = el("div", "project-list");
  for (const project of snapshot.projects) {
    const row = el("label", "project-row");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = session.isApproved(project.id);
    box.disabled = !box.checked && session.atCap();
    box.addEventListener("change", () => {
      if (!session.toggle(project.id)) {
        box.checked = false; // click past the cap is rejected client-side
      }
      renderApproval(root, snapshot, session, onSubmit);
    });
    row.appendChild(box);
    row.appendChild(el("span", "name", `${project.name} (cost ${project.cost})`));
    list.appendChild(row);
  }
  root.appendChild(list);
  root.appendChild(submitRow(session.canSubmit(), "Submit approvals", onSubmit));
}

/** Pairwise screen: one two-card choice at a time. */
export function renderPairwise(
  root: HTMLElement,
  snapshot: ElectionSnapshot,
  session: PairwiseSession,
  onSubmit: () => void,
): void {
  root.replaceChildren();
  const index = session.nextUnanswered();
  if (session.pairCount() === 0) {
    root.appendChild(el("p", "budget-note", "no comparison pairs assigned"));
    return;
  }
  if (index < 0) {
    root.appendChild(el("p", "budget-note", "all comparisons answered"));
    root.appendChild(submitRow(session.canSubmit(), "Submit comparisons", onSubmit));
    return;
  }
  root.appendChild(
    el("p", "budget-note", `comparison ${index + 1} of ${session.pairCount()}: ` +
      "which gives more benefit per dollar?"),
  );
  const cards = el("div", "pair-cards");
  for (const projectId of session.pairAt(index)) {
    const project = snapshot.projects.find((p) => p.id === projectId);
    const card = el("button", "pair-card");
    card.appendChild(el("strong", undefined, project ? project.name : projectId));
    card.appendChild(el("div", undefined, `cost ${project ? project.cost : "?"}`));
    card.addEventListener("click", () => {
      session.choose(index, projectId);
      renderPairwise(root, snapshot, session, onSubmit);
    });
    cards.appendChild(card);
  }
  root.appendChild(cards);
}

/** Ranking screen: ordered top-R list with move-up/move-down controls. */
export function renderRanking(
  root: HTMLElement,
  snapshot: ElectionSnapshot,
  session: RankingSession,
  onSubmit: () => void,
): void {
  root.replaceChildren();
  root.appendChild(
    el("p", "budget-note", `rank your top ${snapshot.rankingLength} projects by value for money`),
  );
  const ranked = el("ol", "ranking");
  for (const projectId of session.current()) {
    const project = snapshot.projects.find((p) => p.id === projectId);
    const item = el("li", "ranking-row");
    item.appendChild(el("span", "name", project ? project.name : projectId));
    const up = el("button", "step", "▲");
    up.addEventListener("click", () => {
      session.move(projectId, -1);
      renderRanking(root, snapshot, session, onSubmit);
    });
    const down = el("button", "step", "▼");
    down.addEventListener("click", () => {
      session.move(projectId, +1);
      renderRanking(root, snapshot, session, onSubmit);
    });
    const drop = el("button", "step", "✕");
    drop.addEventListener("click", () => {
      session.remove(projectId);
      renderRanking(root, snapshot, session, onSubmit);
    });
    item.append(up, down, drop);
    ranked.appendChild(item);
  }
  root.appendChild(ranked);
  const unranked = el("div", "project-list");
  for (const project of snapshot.projects) {
    if (session.current().includes(project.id)) {
      continue;
    }
    const row = el("button", "project-row addable");
    row.textContent = `add ${project.name} (cost ${project.cost})`;
    row.disabled = session.atCap();
    row.addEventListener("click", () => {
      session.add(project.id);
      renderRanking(root, snapshot, session, onSubmit);
    });
    unranked.appendChild(row);
  }
  root.appendChild(unranked);
  root.appendChild(submitRow(session.canSubmit(), "Submit ranking", onSubmit));
}

/** Read-only results table. */
export function renderResults(root: HTMLElement, results: ResultsWire): void {
  root.replaceChildren();
  root.appendChild(el("h3", undefined, `results (${results.method})`));
  const table = el("table", "results");
  const head = el("tr");
  head.append(el("th", undefined, "project"), el("th", undefined, "funded"));
  table.appendChild(head);
  for (const [project, amount] of Object.entries(results.outcome.allocation).sort()) {
    const row = el("tr");
    row.append(el("td", undefined, project), el("td", undefined, String(amount)));
    table.appendChild(row);
  }
  root.appendChild(table);
  if (results.outcome.fractional) {
    root.appendChild(
      el(
        "p",
        "budget-note",
        `${results.outcome.fractional.project} partially funded ` +
          `(${results.outcome.fractional.fraction} of its cost)`,
      ),
    );
  }
}

/** Shared submit wiring: POST the ballot, surface 422s inline, keep the
 * draft and offer a retry on network failure. */
export function makeSubmitter(
  api: ElectionApi,
  electionId: string,
  statusNode: HTMLElement,
  onAccepted: () => void,
): SubmitHandler {
  return async (ballot: BallotWire) => {
    statusNode.className = "status";
    statusNode.textContent = "submitting…";
    try {
      const ack = await api.submitBallot(electionId, ballot);
      statusNode.classList.add("ok");
      statusNode.textContent = ack.replaced
        ? "ballot replaced your earlier submission"
        : "ballot accepted";
      onAccepted();
    } catch (error) {
      if (error instanceof ApiError) {
        statusNode.classList.add("error");
        statusNode.textContent = `rejected: ${error.message}`;
      } else {
        statusNode.classList.add("error");
        statusNode.textContent = "network problem — your draft is kept, try again";
      }
    }
  };
}
