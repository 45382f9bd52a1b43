"""HTTP labeling service: drives a verification session for a human labeler.

State is persisted as a config snapshot plus an append-only label log; a
session is resumed by deterministically rebuilding the classifier from the
dataset and replaying the log.
"""

from __future__ import annotations

import json
import os
import threading
from datetime import datetime, timezone

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .classifier import TrainConfig, active_learn
from .datasets import load_dataset
from .orchestrator import SessionConfig, VerificationSession, oracle_from_gold
from .riskengine import RiskConfig

SESSION_FILE = "session.json"
LABEL_LOG = "labels.log"


class StartSessionRequest(BaseModel):
    dataset_dir: str
    strategy: str = "cvar"
    budget: int
    batch_size: int = 1
    theta: float = 0.8
    seed: int = 0
    train_budget: int | None = None
    session_id: str | None = None


class LabelRequest(BaseModel):
    seq: int
    pair_id: str
    label: str  # "match" or "unmatch"


class LiveSession:
    def __init__(self, session_id: str, config: dict, storage_dir: str):
        self.session_id = session_id
        self.config = config
        self.dir = storage_dir
        self.lock = threading.Lock()
        self.events = []  # applied label events
        self.session = self._build()

    def _build(self) -> VerificationSession:
        ds = load_dataset(self.config["dataset_dir"])
        train_budget = self.config.get("train_budget") or max(40, len(ds.workload.pairs) // 20)
        result = active_learn(ds.workload, oracle_from_gold(ds.gold), train_budget,
                              ds.feature_config, hyper=TrainConfig(seed=self.config["seed"]))
        sess_config = SessionConfig(
            strategy=self.config["strategy"],
            budget=self.config["budget"],
            batch_size=self.config.get("batch_size", 1),
            risk=RiskConfig(theta=self.config.get("theta", 0.8)),
            seed=self.config["seed"],
            labeler="human",
        )
        return VerificationSession(ds.workload, result.classifier, sess_config,
                                   gold=ds.gold,
                                   train_indices=result.train_indices,
                                   train_labels=result.train_labels)

    @property
    def status(self):
        return "complete" if self.session.complete else "awaiting_label"

    def offered_payload(self):
        idx = self.session.offer()
        if idx is None:
            return {"status": "complete", "session_id": self.session_id}
        pair = self.session.workload.pairs[idx]
        st = self.session.states[idx]
        return {
            "status": "awaiting_label",
            "session_id": self.session_id,
            "pair": {
                "pair_id": pair.pair_id,
                "left": {"id": pair.left.id, "attributes": dict(pair.left.attributes)},
                "right": {"id": pair.right.id, "attributes": dict(pair.right.attributes)},
                "machine_label": st.machine_label,
                "risk": st.risk,
            },
            "remaining_budget": self.session.config.budget - self.session.consumed,
        }

    def apply_event(self, event: dict, persist: bool):
        """Append to the durable log, then advance in-memory state."""
        if persist:
            with open(os.path.join(self.dir, LABEL_LOG), "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        self.session.apply_label(event["pair_id"], 1 if event["label"] == "match" else 0)
        self.events.append(event)

    def metrics_payload(self):
        payload = {
            "session_id": self.session_id,
            "status": self.status,
            "consumed_budget": self.session.consumed,
            "budget": self.session.config.budget,
            "pickup": self.session.pickup,
        }
        m = self.session.metrics()
        if m:
            payload.update(precision=m[0], recall=m[1], f1=m[2])
        return payload


def _now():
    return datetime.now(timezone.utc).isoformat()


def create_app(storage_root: str) -> FastAPI:
    os.makedirs(storage_root, exist_ok=True)
    app = FastAPI(title="riskloop labeling service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    sessions: dict[str, LiveSession] = {}
    registry_lock = threading.Lock()

    def session_dir(sid):
        return os.path.join(storage_root, sid)

    def get_session(sid) -> LiveSession:
        with registry_lock:
            live = sessions.get(sid)
            if live is None:
                live = _resume(sid)
                sessions[sid] = live
            return live

    def _resume(sid) -> LiveSession:
        sdir = session_dir(sid)
        cfg_path = os.path.join(sdir, SESSION_FILE)
        if not os.path.exists(cfg_path):
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        with open(cfg_path, encoding="utf-8") as fh:
            config = json.load(fh)
        live = LiveSession(sid, config, sdir)
        log_path = os.path.join(sdir, LABEL_LOG)
        if os.path.exists(log_path):
            with open(log_path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        event = json.loads(line)
                        live.apply_event(event, persist=False)
                    except Exception as exc:
                        raise HTTPException(
                            status_code=500,
                            detail=f"corrupt log entry at line {lineno} (seq "
                                   f"{len(live.events) + 1}): {exc}")
        return live

    @app.post("/sessions", status_code=201)
    def start_session(req: StartSessionRequest):
        sid = req.session_id or f"s{int(datetime.now(timezone.utc).timestamp() * 1000)}"
        sdir = session_dir(sid)
        with registry_lock:
            if sid in sessions or os.path.exists(os.path.join(sdir, SESSION_FILE)):
                raise HTTPException(status_code=409, detail=f"session {sid!r} already exists")
            config = {
                "session_id": sid,
                "dataset_dir": req.dataset_dir,
                "strategy": req.strategy,
                "budget": req.budget,
                "batch_size": req.batch_size,
                "theta": req.theta,
                "seed": req.seed,
                "train_budget": req.train_budget,
                "created": _now(),
            }
            try:
                os.makedirs(sdir, exist_ok=True)
                live = LiveSession(sid, config, sdir)
            except HTTPException:
                raise
            except Exception as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            with open(os.path.join(sdir, SESSION_FILE), "w", encoding="utf-8") as fh:
                json.dump(config, fh, indent=2)
            sessions[sid] = live
        return {"session_id": sid, "status": live.status,
                "workload_size": len(live.session.workload.pairs)}

    @app.get("/sessions/{sid}/next")
    def next_pair(sid: str):
        live = get_session(sid)
        with live.lock:
            return live.offered_payload()

    @app.post("/sessions/{sid}/labels")
    def post_label(sid: str, req: LabelRequest):
        if req.label not in ("match", "unmatch"):
            raise HTTPException(status_code=422, detail=f"invalid label {req.label!r}")
        live = get_session(sid)
        with live.lock:
            expected_seq = len(live.events) + 1
            if req.seq < expected_seq:
                prior = live.events[req.seq - 1]
                if prior["pair_id"] == req.pair_id and prior["label"] == req.label:
                    return {"status": live.status, "seq": req.seq, "duplicate": True,
                            "metrics": live.metrics_payload()}
                raise HTTPException(status_code=409, detail="sequence replay mismatch")
            if req.seq > expected_seq:
                raise HTTPException(status_code=409, detail="sequence gap; refetch state")
            if live.session.complete:
                raise HTTPException(status_code=409, detail="budget exhausted")
            offered = live.session.offer()
            offered_id = live.session.workload.pairs[offered].pair_id
            if req.pair_id != offered_id:
                raise HTTPException(status_code=409,
                                    detail=f"stale pair; current offer is {offered_id!r}")
            event = {"seq": req.seq, "pair_id": req.pair_id, "label": req.label,
                     "timestamp": _now()}
            live.apply_event(event, persist=True)
            return {"status": live.status, "seq": req.seq, "duplicate": False,
                    "metrics": live.metrics_payload()}

    @app.get("/sessions/{sid}/metrics")
    def metrics(sid: str):
        live = get_session(sid)
        with live.lock:
            return live.metrics_payload()

    @app.get("/sessions/{sid}/report")
    def report(sid: str):
        live = get_session(sid)
        with live.lock:
            rep = live.session.report
            return {
                "version": 1,
                "session_id": sid,
                "config": live.config,
                "pickup_curve": rep.pickup_curve,
                "quality_curve": rep.quality_curve,
                "iterations": rep.iterations,
            }

    return app
