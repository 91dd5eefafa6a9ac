/** Wire types mirroring the election service's JSON payloads. */

export interface ProjectWire {
  id: string;
  name: string;
  cost: number;
  kind: "expenditure" | "revenue";
}

export interface ConfigWire {
  projects: ProjectWire[];
  budget: number;
  mode: string;
  tie_break?: string[];
  unit?: number;
}

export interface SettingsWire {
  k: number | null;
  ranking_length: number;
  method: string | null;
  pair_seed: number;
  live_results: boolean;
}

export interface ElectionWire {
  election_id: string;
  status: "draft" | "open" | "closed";
  config: ConfigWire;
  settings: SettingsWire;
  ballots_logged: number;
}

export interface KnapsackBallotWire {
  voter_id: string;
  kind: "knapsack";
  allocation: Record<string, number>;
  revenue_allocation?: Record<string, number>;
}

export interface ApprovalBallotWire {
  voter_id: string;
  kind: "kapproval";
  approved: string[];
}

export interface PairwiseBallotWire {
  voter_id: string;
  kind: "pairwise";
  comparisons: { pair: [string, string]; winner: string }[];
}

export interface RankingBallotWire {
  voter_id: string;
  kind: "ranking";
  ranking: string[];
}

export type BallotWire =
  | KnapsackBallotWire
  | ApprovalBallotWire
  | PairwiseBallotWire
  | RankingBallotWire;

export interface SubmitAckWire {
  accepted: boolean;
  voter_id: string;
  kind: string;
  replaced: boolean;
}

export interface PairsWire {
  voter_id: string;
  pairs: [string, string][];
}

export interface ResultsWire {
  election_id: string;
  method: string;
  outcome: {
    allocation: Record<string, number>;
    funded_projects?: string[];
    fractional?: { project: string; fraction: string };
  };
  diagnostics: Record<string, unknown>;
}
