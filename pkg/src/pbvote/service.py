"""Long-running HTTP service hosting live elections.

Endpoints (all payloads UTF-8 JSON):

    POST /elections                     create (draft) from a config
    GET  /elections/{id}                config + status echo
    POST /elections/{id}/status        {"status": "open" | "closed"}
    POST /elections/{id}/ballots        submit a ballot (election must be open)
    GET  /elections/{id}/pairs?voter=&count=   comparison pairs for a voter
    GET  /elections/{id}/results?method=&k=    outcome + diagnostics
    GET  /healthz

Persistence is a config file plus an append-only JSON-lines ballot log per
election; state is reconstructed by replay, so results are a pure function
of (config, log) and byte-identical across restarts. Resubmission by the
same voter in the same format replaces the earlier ballot (the log keeps
both lines as an audit trail). Environment: PB_DATA_DIR, PB_BIND_ADDR.
"""

from __future__ import annotations

import json
import os
import re
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import analytics, comparisons
from .model import (
    Ballot,
    ElectionConfig,
    PBError,
    UndefinedScoreError,
    ValidationError,
    ballot_from_json_dict,
    ballot_to_json_dict,
    expand_per_dollar,
    fraction_str,
    validate_ballot,
)
from .tally import (
    TALLY_METHODS,
    approval_counts,
    ballots_for_method,
    run_method,
    score_ballots,
)

DEFAULT_RANKING_LENGTH = 4
STATUSES = ("draft", "open", "closed")
TRANSITIONS = {("draft", "open"), ("open", "closed")}


class HttpError(PBError):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class ElectionSettings:
    k: int | None = None
    ranking_length: int = DEFAULT_RANKING_LENGTH
    method: str | None = None
    pair_seed: int = 0
    live_results: bool = False

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "ranking_length": self.ranking_length,
            "method": self.method,
            "pair_seed": self.pair_seed,
            "live_results": self.live_results,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "ElectionSettings":
        settings = ElectionSettings()
        if data.get("k") is not None:
            settings.k = int(data["k"])
        if data.get("ranking_length") is not None:
            settings.ranking_length = int(data["ranking_length"])
        if data.get("method") is not None:
            if data["method"] not in TALLY_METHODS:
                raise ValidationError(f"unknown method {data['method']!r}")
            settings.method = data["method"]
        if data.get("pair_seed") is not None:
            settings.pair_seed = int(data["pair_seed"])
        settings.live_results = bool(data.get("live_results", False))
        return settings


@dataclass
class Election:
    """In-memory view of one election; writes go through the log first."""

    election_id: str
    directory: Path
    config: ElectionConfig
    settings: ElectionSettings
    status: str = "draft"
    log: list[Ballot] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    _expansions: dict = field(default_factory=dict)

    @property
    def log_path(self) -> Path:
        return self.directory / "ballots.jsonl"

    @property
    def meta_path(self) -> Path:
        return self.directory / "meta.json"

    def save_meta(self) -> None:
        payload = {
            "election_id": self.election_id,
            "status": self.status,
            "settings": self.settings.to_json_dict(),
        }
        tmp = self.meta_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        os.replace(tmp, self.meta_path)

    def set_status(self, status: str) -> None:
        if status not in STATUSES:
            raise HttpError(422, f"unknown status {status!r}")
        with self.lock:
            if (self.status, status) not in TRANSITIONS:
                raise HttpError(409, f"cannot move from {self.status!r} to {status!r}")
            self.status = status
            self.save_meta()

    def validate(self, ballot: Ballot) -> None:
        validate_ballot(
            ballot,
            self.config,
            k=self.settings.k,
            ranking_limit=self.settings.ranking_length,
            integral=self.settings.method in ("integral", "approx-integral"),
        )

    def submit(self, ballot: Ballot) -> dict:
        with self.lock:
            if self.status != "open":
                raise HttpError(409, f"election is {self.status}, not open")
            try:
                self.validate(ballot)
            except ValidationError as exc:
                raise HttpError(422, str(exc)) from exc
            replaced = any(
                b.voter_id == ballot.voter_id and b.kind == ballot.kind for b in self.log
            )
            record = ballot_to_json_dict(ballot)
            record["submitted_at"] = datetime.now(timezone.utc).isoformat()
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self.log.append(ballot)
            if hasattr(ballot.payload, "allocation"):
                self._expansions[(ballot.voter_id, ballot.kind)] = expand_per_dollar(
                    ballot.payload.allocation, self.config
                )
            return {
                "accepted": True,
                "voter_id": ballot.voter_id,
                "kind": ballot.kind,
                "replaced": replaced,
            }

    def effective_ballots(self) -> list[Ballot]:
        """Last write wins per (voter, format); order of first submission."""
        latest: dict[tuple[str, str], Ballot] = {}
        order: list[tuple[str, str]] = []
        for ballot in self.log:
            key = (ballot.voter_id, ballot.kind)
            if key not in latest:
                order.append(key)
            latest[key] = ballot
        return [latest[key] for key in order]

    def pairs(self, voter_id: str, count: int) -> list[tuple[str, str]]:
        return comparisons.assign_pairs(
            self.config.project_ids(), voter_id, count, self.settings.pair_seed
        )

    def results(self, method: str, k: int | None) -> dict:
        with self.lock:
            if self.status != "closed" and not self.settings.live_results:
                raise HttpError(409, "results are available after the election closes")
            ballots = self.effective_ballots()
        if method not in TALLY_METHODS:
            raise HttpError(422, f"unknown method {method!r}")
        if k is None:
            k = self.settings.k
        method_ballots = ballots_for_method(ballots, method)
        try:
            outcome = run_method(method, method_ballots, self.config, k=k)
        except ValidationError as exc:
            raise HttpError(422, str(exc)) from exc
        diagnostics: dict = {"ballots_tallied": len(method_ballots)}
        if method in ("knapsack", "balanced", "deficit"):
            table = score_ballots(method_ballots, self.config)
            diagnostics["score_table"] = table.per_project(self.config)
        else:
            diagnostics["approval_counts"] = approval_counts(
                [b.payload for b in method_ballots], self.config
            )
        votes = analytics.votes_per_project(method_ballots, self.config, method)
        diagnostics["cost_cumulative"] = analytics.cost_cumulative_rows(votes, self.config)
        funded = analytics.winning_projects(outcome, self.config)
        avg = analytics.average_winning_cost(funded, self.config)
        diagnostics["winning_projects"] = sorted(funded)
        diagnostics["average_winning_cost_fraction"] = None if avg is None else fraction_str(avg)
        matrix = comparisons.matrix_from_ballots(ballots, self.config)
        if matrix.total_comparisons() and funded and len(funded) < len(self.config.projects):
            try:
                agreement = comparisons.agreement_report(
                    matrix, {method: funded}, self.config.costs()
                )
                diagnostics["set_borda_agreement"] = agreement["methods"][method]
            except UndefinedScoreError:
                pass
        return {
            "election_id": self.election_id,
            "method": method,
            "outcome": outcome.to_json_dict(),
            "diagnostics": diagnostics,
        }

    def describe(self) -> dict:
        with self.lock:
            return {
                "election_id": self.election_id,
                "status": self.status,
                "config": self.config.to_json_dict(),
                "settings": self.settings.to_json_dict(),
                "ballots_logged": len(self.log),
            }


class ElectionStore:
    """Directory of elections; everything observable survives restart."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._elections: dict[str, Election] = {}
        self._lock = threading.Lock()
        for entry in sorted(self.data_dir.iterdir()):
            if (entry / "meta.json").exists():
                self._load(entry)

    def _load(self, directory: Path) -> None:
        meta = json.loads((directory / "meta.json").read_text(encoding="utf-8"))
        with open(directory / "config.json", encoding="utf-8") as fh:
            config = ElectionConfig.from_json_dict(json.load(fh))
        election = Election(
            election_id=meta["election_id"],
            directory=directory,
            config=config,
            settings=ElectionSettings.from_json_dict(meta.get("settings", {})),
            status=meta.get("status", "draft"),
        )
        log_path = election.log_path
        if log_path.exists():
            with open(log_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        election.log.append(ballot_from_json_dict(json.loads(line)))
        self._elections[election.election_id] = election

    def create(self, config: ElectionConfig, settings: ElectionSettings) -> Election:
        election_id = secrets.token_hex(8)
        directory = self.data_dir / election_id
        directory.mkdir()
        (directory / "config.json").write_text(
            json.dumps(config.to_json_dict(), sort_keys=True), encoding="utf-8"
        )
        election = Election(
            election_id=election_id, directory=directory, config=config, settings=settings
        )
        election.save_meta()
        election.log_path.touch()
        with self._lock:
            self._elections[election_id] = election
        return election

    def get(self, election_id: str) -> Election:
        with self._lock:
            election = self._elections.get(election_id)
        if election is None:
            raise HttpError(404, f"no election {election_id!r}")
        return election


def _json_bytes(payload: dict) -> bytes:
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode()


class _Handler(BaseHTTPRequestHandler):
    store: ElectionStore  # injected by make_server
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        if os.environ.get("PBVOTE_HTTP_LOG"):
            super().log_message(fmt, *args)

    def _reply(self, status: int, payload: dict) -> None:
        body = _json_bytes(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self):  # CORS preflight for browser clients
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _error(self, status: int, message: str) -> None:
        self._reply(status, {"error": {"status": status, "message": message}})

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            return json.loads(raw.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise HttpError(400, f"invalid JSON body: {exc}") from exc

    def _dispatch(self, method: str) -> None:
        parsed = urlparse(self.path)
        query = {k: v[0] for k, v in parse_qs(parsed.query).items()}
        try:
            self._route(method, parsed.path, query)
        except HttpError as exc:
            self._error(exc.status, exc.message)
        except ValidationError as exc:
            self._error(422, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            self._error(500, f"internal error: {exc}")

    def _route(self, method: str, path: str, query: dict) -> None:
        if method == "GET" and path == "/healthz":
            self._reply(200, {"status": "ok"})
            return
        if method == "POST" and path == "/elections":
            body = self._body()
            config_data = body.get("config", body)
            try:
                config = ElectionConfig.from_json_dict(config_data)
                settings = ElectionSettings.from_json_dict(body.get("settings", {}))
            except ValidationError as exc:
                raise HttpError(400, str(exc)) from exc
            election = self.store.create(config, settings)
            self._reply(201, {"election_id": election.election_id, "status": election.status})
            return
        match = re.fullmatch(r"/elections/([0-9a-f]+)(/[a-z]+)?", path)
        if not match:
            raise HttpError(404, f"no route {path!r}")
        election = self.store.get(match.group(1))
        tail = match.group(2) or ""
        if method == "GET" and tail == "":
            self._reply(200, election.describe())
        elif method == "POST" and tail == "/status":
            status = self._body().get("status")
            election.set_status(str(status))
            self._reply(200, {"election_id": election.election_id, "status": election.status})
        elif method == "POST" and tail == "/ballots":
            body = self._body()
            try:
                ballot = ballot_from_json_dict(body)
            except ValidationError as exc:
                raise HttpError(422, str(exc)) from exc
            self._reply(201, election.submit(ballot))
        elif method == "GET" and tail == "/pairs":
            voter = query.get("voter")
            if not voter:
                raise HttpError(422, "missing voter parameter")
            count = int(query.get("count", "4"))
            pairs = election.pairs(voter, count)
            self._reply(200, {"voter_id": voter, "pairs": [list(p) for p in pairs]})
        elif method == "GET" and tail == "/results":
            method_name = query.get("method") or election.settings.method or "knapsack"
            k = int(query["k"]) if "k" in query else None
            self._reply(200, election.results(method_name, k))
        else:
            raise HttpError(404, f"no route {method} {path!r}")

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")


def make_server(data_dir: str | Path, bind: str = "127.0.0.1:0") -> ThreadingHTTPServer:
    host, _, port = bind.rpartition(":")
    handler = type("BoundHandler", (_Handler,), {"store": ElectionStore(data_dir)})
    return ThreadingHTTPServer((host or "127.0.0.1", int(port or 0)), handler)


def serve(data_dir: str | None = None, bind: str | None = None) -> None:
    data_dir = data_dir or os.environ.get("PB_DATA_DIR", "./pb-data")
    bind = bind or os.environ.get("PB_BIND_ADDR", "127.0.0.1:8080")
    server = make_server(data_dir, bind)
    host, port = server.server_address[:2]
    print(f"serving elections from {data_dir} on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
