"""HTTP session API for interactive decision making over the era loop.

Sessions are in-memory; each one drives run_demoa on a background thread and
parks at a blocking decision source whenever a front is ready. Progress is
pull-based: clients poll GET /api/sessions/{id}.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .core import ApproximationSet, CommittedState
from .decisions import Decision, QueueSource, d_rank_select
from .dynamics import EraTrace, run_clairvoyant, run_demoa, upper_bound
from .emoa import EmoaConfig
from .instances import (Instance, InstanceError, generate_clustered, generate_uniform,
                        parse_instance_text)
from .metrics import to_aposteriori

DECISION_TIMEOUT = 3600.0


def bundled_instances() -> dict[str, Instance]:
    """Small deterministic sample instances served by GET /api/instances."""
    return {
        "uniform-small": generate_uniform(8, 16, seed=11, n_eras=5, delta=45.0),
        "cl2-small": generate_clustered(2, 8, 16, seed=12, n_eras=5, delta=45.0),
        "uniform-100": generate_uniform(25, 75, seed=1, n_eras=7, delta=80.0),
    }


class SessionConfig(BaseModel):
    instance: str | None = None       # bundled instance name
    instance_text: str | None = None  # or a raw instance file body
    n_eras: int | None = None
    delta: float | None = None
    generations: int = 300
    mu: int = 30
    lambda_: int = 30
    seed: int = 0
    clairvoyant_repeats: int = 5


class DecisionBody(BaseModel):
    index: int | None = None  # 1-based into the sorted front
    d: float | None = None


@dataclass
class Session:
    id: str
    instance: Instance
    config: SessionConfig
    emoa: EmoaConfig
    n_eras: int
    delta: float
    source: QueueSource
    state: str = "optimizing"  # optimizing | awaiting_decision | finished | aborted
    era_index: int = 1
    generation: int = 0
    front: ApproximationSet | None = None
    committed: CommittedState = field(default_factory=CommittedState)
    decisions: list[Decision] = field(default_factory=list)
    trace: EraTrace | None = None
    clairvoyant: list | None = None
    clairvoyant_state: str = "idle"  # idle | computing | ready
    lock: threading.Lock = field(default_factory=threading.Lock)
    thread: threading.Thread | None = None
    cl_thread: threading.Thread | None = None


def _front_json(front: ApproximationSet, appeared: int, total: int) -> list[dict]:
    out = []
    for i, (_, obj) in enumerate(front.members):
        apost = to_aposteriori(obj, appeared, total)
        out.append({"index": i + 1, "tour_length": obj.tour_length,
                    "unvisited": obj.unvisited, "unvisited_apost": apost.unvisited})
    return out


def _resolve_instance(cfg: SessionConfig, catalog: dict[str, Instance]) -> Instance:
    if (cfg.instance is None) == (cfg.instance_text is None):
        raise HTTPException(422, "provide exactly one of 'instance' or 'instance_text'")
    if cfg.instance is not None:
        if cfg.instance not in catalog:
            raise HTTPException(404, f"unknown bundled instance {cfg.instance!r}")
        return catalog[cfg.instance]
    try:
        return parse_instance_text(cfg.instance_text)
    except InstanceError as exc:
        raise HTTPException(422, f"bad instance: {exc}") from None


def create_app(max_sessions: int = 8, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="dynroute decision support")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    catalog = bundled_instances()

    def get_session(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"no session {sid!r}")
        return s

    @app.get("/api/instances")
    def list_instances():
        return [{"name": name, "n": inst.n, "n_mandatory": inst.n_mandatory,
                 "n_dynamic": inst.n_dynamic, "topology": inst.topology_label,
                 "n_eras": inst.n_eras, "delta": inst.delta}
                for name, inst in sorted(catalog.items())]

    @app.post("/api/sessions", status_code=201)
    def create_session(cfg: SessionConfig):
        with registry_lock:
            live = sum(1 for s in sessions.values() if s.state in ("optimizing", "awaiting_decision"))
            if live >= max_sessions:
                raise HTTPException(429, f"session cap of {max_sessions} reached")
            instance = _resolve_instance(cfg, catalog)
            emoa = EmoaConfig(mu=cfg.mu, lambda_=cfg.lambda_, generations=cfg.generations,
                              seed=cfg.seed)
            sid = uuid.uuid4().hex[:12]
            sess = Session(
                id=sid, instance=instance, config=cfg, emoa=emoa,
                n_eras=cfg.n_eras or instance.n_eras,
                delta=cfg.delta or instance.delta,
                source=QueueSource(timeout=DECISION_TIMEOUT),
            )
            sessions[sid] = sess

        def on_front(era_index: int, front: ApproximationSet, committed: CommittedState):
            with sess.lock:
                sess.era_index = era_index
                sess.front = front
                sess.committed = committed
                sess.state = "awaiting_decision"

        sess.source.on_front = on_front

        def on_progress(era_index: int, generation: int):
            sess.era_index = era_index
            sess.generation = generation

        def work():
            try:
                trace = run_demoa(sess.instance, sess.n_eras, sess.delta, sess.source,
                                  sess.emoa, on_progress=on_progress)
                with sess.lock:
                    sess.trace = trace
                    sess.state = "aborted" if trace.aborted else "finished"
            except Exception:
                with sess.lock:
                    sess.state = "aborted"

        sess.thread = threading.Thread(target=work, daemon=True, name=f"session-{sid}")
        sess.thread.start()
        return {"id": sid}

    @app.get("/api/sessions/{sid}")
    def get_state(sid: str):
        sess = get_session(sid)
        inst = sess.instance
        with sess.lock:
            now = sess.committed.era_start_time
            appeared = int(np.count_nonzero(inst.appeared_mask(now)))
            snap = {
                "id": sess.id,
                "state": sess.state,
                "era_index": sess.era_index,
                "n_eras": sess.n_eras,
                "delta": sess.delta,
                "generation": sess.generation,
                "generations_per_era": sess.emoa.generations,
                "appeared": appeared,
                "total_dynamic": inst.n_dynamic,
                "upper_bound": upper_bound(sess.committed, inst, now),
                "committed": {"prefix": list(sess.committed.prefix),
                              "era_start_time": sess.committed.era_start_time},
                "decisions": [{"era": d.era_index, "index": d.index + 1, "d": d.d}
                              for d in sess.decisions],
                "front": (_front_json(sess.front, appeared, inst.n_dynamic)
                          if sess.front is not None else None),
                "customers": [{"id": c.id, "x": c.x, "y": c.y, "kind": c.kind,
                               "request_time": c.request_time} for c in inst.customers],
            }
            if sess.state == "finished" and sess.trace is not None:
                snap["final_tour"] = [{"position": p, "id": cid, "arrival": t}
                                      for p, cid, t in sess.trace.final_tour_rows()]
            if sess.front is not None:
                snap["front_tours"] = [
                    {"index": i + 1, "active": [int(c) for c in ind.active_ids()]}
                    for i, (ind, _) in enumerate(sess.front.members)]
        return snap

    @app.post("/api/sessions/{sid}/decision")
    def submit_decision(sid: str, body: DecisionBody):
        sess = get_session(sid)
        with sess.lock:
            if sess.state != "awaiting_decision":
                raise HTTPException(409, f"session is {sess.state}, not awaiting a decision")
            front = sess.front
            m = len(front)
            if (body.index is None) == (body.d is None):
                raise HTTPException(422, "provide exactly one of 'index' or 'd'")
            if body.index is not None:
                if not 1 <= body.index <= m:
                    raise HTTPException(422, f"index must lie in [1, {m}]")
                k = body.index
            else:
                if not 0.0 <= body.d <= 1.0:
                    raise HTTPException(422, "d must lie in [0, 1]")
                k = d_rank_select(front, body.d)
            sess.decisions.append(Decision(sess.era_index, k - 1, body.d))
            sess.state = "optimizing"
            sess.generation = 0
        sess.source.submit(k - 1, body.d)
        return {"accepted": True, "era_index": sess.era_index, "chosen_index": k}

    @app.get("/api/sessions/{sid}/clairvoyant")
    def get_clairvoyant(sid: str):
        sess = get_session(sid)
        with sess.lock:
            if sess.clairvoyant_state == "ready":
                return {"status": "ready", "front": sess.clairvoyant}
            if sess.clairvoyant_state == "computing":
                return {"status": "computing", "front": None}
            sess.clairvoyant_state = "computing"

        def work():
            front = run_clairvoyant(sess.instance, sess.emoa, sess.config.clairvoyant_repeats)
            payload = [{"tour_length": o.tour_length, "unvisited": o.unvisited}
                       for o in front.objective_list()]
            with sess.lock:
                sess.clairvoyant = payload
                sess.clairvoyant_state = "ready"

        sess.cl_thread = threading.Thread(target=work, daemon=True, name=f"clairvoyant-{sid}")
        sess.cl_thread.start()
        return {"status": "computing", "front": None}

    @app.get("/api/sessions/{sid}/trace.csv", response_class=PlainTextResponse)
    def get_trace(sid: str):
        sess = get_session(sid)
        with sess.lock:
            if sess.trace is None:
                raise HTTPException(409, "trace available once the session finished")
            return sess.trace.to_csv()

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    # expose internals for tests
    app.state.sessions = sessions
    return app
