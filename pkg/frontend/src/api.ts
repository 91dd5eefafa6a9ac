/** Minimal typed client for the election service HTTP API. */

import type {
  BallotWire,
  ConfigWire,
  ElectionWire,
  PairsWire,
  ResultsWire,
  SubmitAckWire,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function call<T>(url: string, method: string, body?: unknown): Promise<T> {
  const response = await fetch(url, {
    method,
    headers: body === undefined ? {} : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = await response.json();
  if (!response.ok) {
    const message =
      typeof payload?.error?.message === "string"
        ? payload.error.message
        : `request failed with status ${response.status}`;
    throw new ApiError(response.status, message);
  }
  return payload as T;
}

export class ElectionApi {
  constructor(private readonly baseUrl: string) {}

  health(): Promise<{ status: string }> {
    return call(`${this.baseUrl}/healthz`, "GET");
  }

  createElection(
    config: ConfigWire,
    settings?: Partial<ElectionWire["settings"]>,
  ): Promise<{ election_id: string; status: string }> {
    return call(`${this.baseUrl}/elections`, "POST", { config, settings });
  }

  getElection(electionId: string): Promise<ElectionWire> {
    return call(`${this.baseUrl}/elections/${electionId}`, "GET");
  }

  setStatus(electionId: string, status: "open" | "closed"): Promise<unknown> {
    return call(`${this.baseUrl}/elections/${electionId}/status`, "POST", { status });
  }

  submitBallot(electionId: string, ballot: BallotWire): Promise<SubmitAckWire> {
    return call(`${this.baseUrl}/elections/${electionId}/ballots`, "POST", ballot);
  }

  getPairs(electionId: string, voterId: string, count: number): Promise<PairsWire> {
    const query = `voter=${encodeURIComponent(voterId)}&count=${count}`;
    return call(`${this.baseUrl}/elections/${electionId}/pairs?${query}`, "GET");
  }

  getResults(electionId: string, method: string): Promise<ResultsWire> {
    return call(`${this.baseUrl}/elections/${electionId}/results?method=${method}`, "GET");
  }
}
