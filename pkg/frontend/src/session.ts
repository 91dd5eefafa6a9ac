/** Ballot drafting state for the four elicitation screens.
 *
 * These classes hold all client-side validation. The rule they enforce is
 * deliberately a strict subset of the server's: any ballot a session
 * reports submittable must be accepted by the service.
 */

import type {
  ApprovalBallotWire,
  ElectionWire,
  KnapsackBallotWire,
  PairwiseBallotWire,
  ProjectWire,
  RankingBallotWire,
} from "./types.js";

export interface ElectionSnapshot {
  electionId: string;
  projects: ProjectWire[];
  budget: number;
  k: number | null;
  rankingLength: number;
}

export function snapshotFrom(wire: ElectionWire): ElectionSnapshot {
  return {
    electionId: wire.election_id,
    projects: wire.config.projects.filter((p) => p.kind === "expenditure"),
    budget: wire.config.budget,
    k: wire.settings.k,
    rankingLength: wire.settings.ranking_length,
  };
}

/** Budget-allocation screen with per-project dollar steppers.
 *
 * The live budget bar reads `total()` / `remaining()`; submission is
 * enabled exactly when the whole budget is allocated.
 */
export class KnapsackSession {
  private amounts = new Map<string, number>();

  constructor(private readonly snapshot: ElectionSnapshot) {}

  private cap(projectId: string): number {
    const project = this.snapshot.projects.find((p) => p.id === projectId);
    if (!project) {
      throw new Error(`unknown project ${projectId}`);
    }
    return project.cost;
  }

  amount(projectId: string): number {
    return this.amounts.get(projectId) ?? 0;
  }

  /** Set a project's dollars, clamped to [0, cap] and to what the
   * remaining budget can absorb. Returns the amount actually stored. */
  setAmount(projectId: string, dollars: number): number {
    const cap = this.cap(projectId);
    const headroom = this.remaining() + this.amount(projectId);
    const clamped = Math.max(0, Math.min(Math.floor(dollars), cap, headroom));
    if (clamped === 0) {
      this.amounts.delete(projectId);
    } else {
      this.amounts.set(projectId, clamped);
    }
    return clamped;
  }

  step(projectId: string, delta: number): number {
    return this.setAmount(projectId, this.amount(projectId) + delta);
  }

  /** Checkbox behavior: toggle between zero and full cost (or whatever
   * still fits). */
  toggleFull(projectId: string): number {
    return this.amount(projectId) > 0
      ? this.setAmount(projectId, 0)
      : this.setAmount(projectId, this.cap(projectId));
  }

  total(): number {
    let sum = 0;
    for (const value of this.amounts.values()) {
      sum += value;
    }
    return sum;
  }

  remaining(): number {
    return this.snapshot.budget - this.total();
  }

  canSubmit(): boolean {
    return this.remaining() === 0 && this.snapshot.budget > 0;
  }

  ballot(voterId: string): KnapsackBallotWire | null {
    if (!this.canSubmit()) {
      return null;
    }
    return {
      voter_id: voterId,
      kind: "knapsack",
      allocation: Object.fromEntries(this.amounts),
    };
  }
}

/** Approval screen: a checkbox list capped at k selections. */
export class ApprovalSession {
  private approved = new Set<string>();

  constructor(private readonly snapshot: ElectionSnapshot) {}

  selections(): string[] {
    return [...this.approved];
  }

  isApproved(projectId: string): boolean {
    return this.approved.has(projectId);
  }

  atCap(): boolean {
    return this.snapshot.k !== null && this.approved.size >= this.snapshot.k;
  }

  /** Toggle a project; returns false when the click is rejected because
   * the cap is already reached. */
  toggle(projectId: string): boolean {
    if (!this.snapshot.projects.some((p) => p.id === projectId)) {
      throw new Error(`unknown project ${projectId}`);
    }
    if (this.approved.has(projectId)) {
      this.approved.delete(projectId);
      return true;
    }
    if (this.atCap()) {
      return false;
    }
    this.approved.add(projectId);
    return true;
  }

  canSubmit(): boolean {
    return this.approved.size > 0;
  }

  ballot(voterId: string): ApprovalBallotWire | null {
    if (!this.canSubmit()) {
      return null;
    }
    return { voter_id: voterId, kind: "kapproval", approved: [...this.approved].sort() };
  }
}

/** Pairwise screen: a fetched sequence of two-card choices. */
export class PairwiseSession {
  private choices: (string | null)[];

  constructor(private readonly pairs: [string, string][]) {
    this.choices = pairs.map(() => null);
  }

  pairCount(): number {
    return this.pairs.length;
  }

  pairAt(index: number): [string, string] {
    return this.pairs[index];
  }

  choiceAt(index: number): string | null {
    return this.choices[index];
  }

  /** Record the winner of one pair; rejects projects outside the pair. */
  choose(index: number, winner: string): boolean {
    const pair = this.pairs[index];
    if (!pair || !pair.includes(winner)) {
      return false;
    }
    this.choices[index] = winner;
    return true;
  }

  nextUnanswered(): number {
    return this.choices.findIndex((c) => c === null);
  }

  canSubmit(): boolean {
    return this.pairs.length > 0 && this.choices.every((c) => c !== null);
  }

  ballot(voterId: string): PairwiseBallotWire | null {
    if (!this.canSubmit()) {
      return null;
    }
    return {
      voter_id: voterId,
      kind: "pairwise",
      comparisons: this.pairs.map((pair, i) => ({ pair, winner: this.choices[i] as string })),
    };
  }
}

/** Ranking screen: an ordered top-R list built by add/remove/move. */
export class RankingSession {
  private ranking: string[] = [];

  constructor(private readonly snapshot: ElectionSnapshot) {}

  current(): string[] {
    return [...this.ranking];
  }

  atCap(): boolean {
    return this.ranking.length >= this.snapshot.rankingLength;
  }

  /** Append a project; rejected beyond the cap or when already ranked. */
  add(projectId: string): boolean {
    if (this.atCap() || this.ranking.includes(projectId)) {
      return false;
    }
    if (!this.snapshot.projects.some((p) => p.id === projectId)) {
      throw new Error(`unknown project ${projectId}`);
    }
    this.ranking.push(projectId);
    return true;
  }

  remove(projectId: string): void {
    this.ranking = this.ranking.filter((p) => p !== projectId);
  }

  /** Move a ranked project up (-1) or down (+1) one slot. */
  move(projectId: string, delta: -1 | 1): boolean {
    const from = this.ranking.indexOf(projectId);
    const to = from + delta;
    if (from < 0 || to < 0 || to >= this.ranking.length) {
      return false;
    }
    const [item] = this.ranking.splice(from, 1);
    this.ranking.splice(to, 0, item);
    return true;
  }

  canSubmit(): boolean {
    return this.ranking.length > 0;
  }

  ballot(voterId: string): RankingBallotWire | null {
    if (!this.canSubmit()) {
      return null;
    }
    return { voter_id: voterId, kind: "ranking", ranking: [...this.ranking] };
  }
}
