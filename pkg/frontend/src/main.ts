/** Entry point: join an election, pick a screen, vote. */

import { ElectionApi } from "./api.js";
import {
  ApprovalSession,
  ElectionSnapshot,
  KnapsackSession,
  PairwiseSession,
  RankingSession,
  snapshotFrom,
} from "./session.js";
import {
  makeSubmitter,
  renderApproval,
  renderKnapsack,
  renderPairwise,
  renderRanking,
  renderResults,
} from "./views.js";

type Screen = "knapsack" | "kapproval" | "pairwise" | "ranking" | "results";

const SCREENS: Screen[] = ["knapsack", "kapproval", "pairwise", "ranking", "results"];

class App {
  private api: ElectionApi;
  private snapshot: ElectionSnapshot | null = null;
  private voterId = "";
  private knapsack: KnapsackSession | null = null;
  private approval: ApprovalSession | null = null;
  private pairwise: PairwiseSession | null = null;
  private ranking: RankingSession | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly statusNode: HTMLElement,
    baseUrl: string,
  ) {
    this.api = new ElectionApi(baseUrl);
  }

  async join(electionId: string, voterId: string): Promise<void> {
    const wire = await this.api.getElection(electionId);
    this.snapshot = snapshotFrom(wire);
    this.voterId = voterId;
    this.knapsack = new KnapsackSession(this.snapshot);
    this.approval = new ApprovalSession(this.snapshot);
    this.ranking = new RankingSession(this.snapshot);
    const pairs = await this.api.getPairs(electionId, voterId, 4);
    this.pairwise = new PairwiseSession(pairs.pairs);
    this.show("knapsack");
  }

  show(screen: Screen): void {
    if (!this.snapshot) {
      return;
    }
    const snapshot = this.snapshot;
    const submit = makeSubmitter(this.api, snapshot.electionId, this.statusNode, () => {
      this.show(screen);
    });
    const submitCurrent = (ballot: { voter_id: string } | null) => {
      if (ballot) {
        void submit(ballot as never);
      }
    };
    switch (screen) {
      case "knapsack":
        renderKnapsack(this.root, snapshot, this.knapsack as KnapsackSession, () =>
          submitCurrent((this.knapsack as KnapsackSession).ballot(this.voterId)),
        );
        break;
      case "kapproval":
        renderApproval(this.root, snapshot, this.approval as ApprovalSession, () =>
          submitCurrent((this.approval as ApprovalSession).ballot(this.voterId)),
        );
        break;
      case "pairwise":
        renderPairwise(this.root, snapshot, this.pairwise as PairwiseSession, () =>
          submitCurrent((this.pairwise as PairwiseSession).ballot(this.voterId)),
        );
        break;
      case "ranking":
        renderRanking(this.root, snapshot, this.ranking as RankingSession, () =>
          submitCurrent((this.ranking as RankingSession).ballot(this.voterId)),
        );
        break;
      case "results":
        void this.api
          .getResults(snapshot.electionId, "knapsack")
          .then((results) => renderResults(this.root, results))
          .catch((error: Error) => {
            this.root.replaceChildren();
            this.statusNode.className = "status error";
            this.statusNode.textContent = error.message;
          });
        break;
    }
  }
}

function bootstrap(): void {
  const root = document.getElementById("screen");
  const statusNode = document.getElementById("status");
  const tabs = document.getElementById("tabs");
  const joinForm = document.getElementById("join-form") as HTMLFormElement | null;
  if (!root || !statusNode || !tabs || !joinForm) {
    return;
  }
  let app: App | null = null;
  for (const screen of SCREENS) {
    const button = document.createElement("button");
    button.textContent = screen;
    button.addEventListener("click", () => app?.show(screen));
    tabs.appendChild(button);
  }
  joinForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const serviceUrl = (document.getElementById("service-url") as HTMLInputElement).value;
    const electionId = (document.getElementById("election-id") as HTMLInputElement).value;
    const voterId = (document.getElementById("voter-id") as HTMLInputElement).value;
    statusNode.className = "status";
    statusNode.textContent = "joining…";
    app = new App(root, statusNode, serviceUrl.trim().replace(/\/$/, ""));
    app
      .join(electionId.trim(), voterId.trim())
      .then(() => {
        statusNode.textContent = "joined";
      })
      .catch((error: Error) => {
        statusNode.className = "status error";
        statusNode.textContent = error.message;
      });
  });
}

bootstrap();
