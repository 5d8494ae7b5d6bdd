"""REST service powering the interactive what-if loop.

Sessions are in-memory: each one pins a dataset (the attribution
background), a model, and a current instance, and records an append-only
history of edits. Peer-influence documents are computed synchronously
with a per-session seed, so repeated identical requests return identical
bytes; the elapsed time travels in the ``X-Computation-Ms`` header to
keep bodies deterministic.
"""

from __future__ import annotations

import hashlib
import secrets
import threading
import time
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict

from .data import CATEGORICAL, Dataset, Instance
from .errors import EncodingError
from .influence import ZERO_POLICIES, alt, calt, conflict_matrix, pi_explanation, pi_graph
from .export import emit_result_document
from .shapley import EXACT, Attribution, ExplainerConfig, explain


@dataclass
class ServiceLimits:
    max_pi_features: int = 12
    max_background_rows: int = 500
    background_rows: int = 100


@dataclass
class Session:
    id: str
    dataset_id: str
    model_id: str
    instance: np.ndarray
    initial_instance: np.ndarray
    seed: int
    history: list[dict] = dataclass_field(default_factory=list)
    last_attribution: Attribution | None = None
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)
    pi_lock: threading.Lock = dataclass_field(default_factory=threading.Lock)


class ServiceState:
    """Registry of datasets, models, and live sessions."""

    def __init__(self, base_seed: int = 0, limits: ServiceLimits | None = None):
        self.datasets: dict[str, Dataset] = {}
        self.models: dict[str, object] = {}
        self.sessions: dict[str, Session] = {}
        self.base_seed = base_seed
        self.limits = limits or ServiceLimits()
        self._registry_lock = threading.Lock()

    def add_dataset(self, dataset_id: str, dataset: Dataset) -> None:
        self.datasets[dataset_id] = dataset

    def add_model(self, model_id: str, model) -> None:
        self.models[model_id] = model


class CreateSessionRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    dataset: str
    model: str
    instance: dict[str, float | str]


class WhatIfRequest(BaseModel):
    edits: dict[str, float | str] = {}


class PIRequest(BaseModel):
    zero_policy: str = "strict"
    controllable: list[str] | None = None


def _encode_value(dataset: Dataset, name: str, value) -> float:
    try:
        j = dataset.feature_index(name)
    except Exception:
        raise HTTPException(status_code=422, detail=f"unknown feature {name!r}") from None
    feature = dataset.schema[j]
    if isinstance(value, str):
        if feature.kind != CATEGORICAL:
            try:
                return float(value)
            except ValueError:
                raise HTTPException(
                    status_code=422,
                    detail=f"feature {name!r}: cannot parse {value!r} as a number",
                ) from None
        try:
            return feature.encode(value)
        except EncodingError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
    v = float(value)
    if feature.kind == CATEGORICAL:
        if abs(v - round(v)) > 1e-9 or not 0 <= round(v) < feature.n_categories:
            raise HTTPException(
                status_code=422,
                detail=f"feature {name!r}: {v} is not a valid category code",
            )
    if not np.isfinite(v):
        raise HTTPException(status_code=422, detail=f"feature {name!r}: non-finite value")
    return v


def _encode_instance(dataset: Dataset, mapping: dict) -> np.ndarray:
    missing = [n for n in dataset.feature_names if n not in mapping]
    if missing:
        raise HTTPException(status_code=422, detail=f"missing features {missing}")
    extra = [n for n in mapping if n not in dataset.feature_names]
    if extra:
        raise HTTPException(status_code=422, detail=f"unknown features {extra}")
    values = np.empty(dataset.m)
    for name, value in mapping.items():
        values[dataset.feature_index(name)] = _encode_value(dataset, name, value)
    return values


def _attribution_digest(attribution: Attribution) -> str:
    return hashlib.sha256(np.ascontiguousarray(attribution.phi).tobytes()).hexdigest()[:16]


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="peerinfluence service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def get_session(session_id: str) -> Session:
        session = state.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def explainer_config(session: Session, dataset: Dataset) -> ExplainerConfig:
        # The PI endpoint enforces its own feature cap (413); single
        # attributions are one pass and use the library's default guard.
        return ExplainerConfig(
            backend=EXACT,
            background_rows=state.limits.background_rows,
            seed=session.seed,
        )

    def attribute(session: Session) -> Attribution:
        dataset = state.datasets[session.dataset_id]
        model = state.models[session.model_id]
        return explain(model, dataset, Instance(values=session.instance),
                       explainer_config(session, dataset))

    @app.get("/catalog")
    def catalog():
        return {
            "datasets": {
                did: {
                    "features": [f.to_dict() for f in ds.schema],
                    "n": ds.n,
                }
                for did, ds in state.datasets.items()
            },
            "models": {mid: getattr(m, "kind", "unknown") for mid, m in state.models.items()},
        }

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest):
        dataset = state.datasets.get(request.dataset)
        if dataset is None:
            raise HTTPException(status_code=404, detail=f"unknown dataset {request.dataset!r}")
        model = state.models.get(request.model)
        if model is None:
            raise HTTPException(status_code=404, detail=f"unknown model {request.model!r}")
        values = _encode_instance(dataset, request.instance)
        session = Session(
            id=secrets.token_hex(8),
            dataset_id=request.dataset,
            model_id=request.model,
            instance=values,
            initial_instance=values.copy(),
            seed=state.base_seed,
        )
        with state._registry_lock:
            state.sessions[session.id] = session
        attribution = attribute(session)
        session.last_attribution = attribution
        return {
            "session": session.id,
            "prediction": int(attribution.target_score >= 0),
            "score": attribution.target_score,
            "attribution": attribution.to_dict(),
            "instance": {n: float(v) for n, v in zip(dataset.feature_names, values)},
        }

    @app.get("/sessions/{session_id}")
    def session_info(session_id: str):
        session = get_session(session_id)
        dataset = state.datasets[session.dataset_id]
        model = state.models[session.model_id]
        score = float(model.decision_function(session.instance[None, :])[0])
        return {
            "session": session.id,
            "dataset": session.dataset_id,
            "model": session.model_id,
            "instance": {n: float(v) for n, v in zip(dataset.feature_names, session.instance)},
            "initial_instance": {
                n: float(v) for n, v in zip(dataset.feature_names, session.initial_instance)
            },
            "prediction": int(score >= 0),
            "score": score,
        }

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        get_session(session_id)
        with state._registry_lock:
            del state.sessions[session_id]
        return Response(status_code=204)

    @app.post("/sessions/{session_id}/pi")
    def compute_pi(session_id: str, request: PIRequest):
        session = get_session(session_id)
        if request.zero_policy not in ZERO_POLICIES:
            raise HTTPException(
                status_code=422,
                detail=f"zero_policy must be one of {list(ZERO_POLICIES)}",
            )
        dataset = state.datasets[session.dataset_id]
        if dataset.m > state.limits.max_pi_features:
            raise HTTPException(
                status_code=413,
                detail=f"{dataset.m} features exceed the interactive cap "
                f"of {state.limits.max_pi_features}",
            )
        if state.limits.background_rows > state.limits.max_background_rows:
            raise HTTPException(status_code=413, detail="background size exceeds the cap")
        mask = None
        if request.controllable is not None:
            if not request.controllable:
                raise HTTPException(status_code=422, detail="controllable list must be non-empty")
            try:
                mask = tuple(dataset.feature_index(n) for n in request.controllable)
            except Exception:
                raise HTTPException(
                    status_code=422, detail=f"unknown controllable feature in {request.controllable}"
                ) from None

        if not session.pi_lock.acquire(blocking=False):
            raise HTTPException(
                status_code=409, detail="a peer-influence computation is already running"
            )
        try:
            started = time.perf_counter()
            model = state.models[session.model_id]
            pi = pi_explanation(
                model, dataset, Instance(values=session.instance),
                explainer_config(session, dataset),
            )
            graph = pi_graph(pi)
            conflict = conflict_matrix(pi, request.zero_policy)
            document = emit_result_document(pi, graph, conflict, alt(pi, mask), calt(conflict, mask))
            elapsed_ms = (time.perf_counter() - started) * 1000.0
        finally:
            session.pi_lock.release()
        return Response(
            content=document,
            media_type="application/json",
            headers={"X-Computation-Ms": f"{elapsed_ms:.1f}"},
        )

    @app.post("/sessions/{session_id}/whatif")
    def whatif(session_id: str, request: WhatIfRequest):
        session = get_session(session_id)
        dataset = state.datasets[session.dataset_id]
        encoded = {
            name: _encode_value(dataset, name, value) for name, value in request.edits.items()
        }
        with session.lock:
            previous = session.last_attribution
            values = session.instance.copy()
            for name, v in encoded.items():
                values[dataset.feature_index(name)] = v
            session.instance = values
            attribution = attribute(session)
            session.last_attribution = attribution
            prediction = int(attribution.target_score >= 0)
            entry = {
                "edits": encoded,
                "prediction": prediction,
                "score": attribution.target_score,
                "attribution_digest": _attribution_digest(attribution),
            }
            session.history.append(entry)
        deltas = {
            name: float(attribution.phi[i] - (previous.phi[i] if previous is not None else 0.0))
            for i, name in enumerate(dataset.feature_names)
        }
        return {
            "prediction": prediction,
            "score": attribution.target_score,
            "previous_score": previous.target_score if previous is not None else None,
            "attribution": attribution.to_dict(),
            "deltas": deltas,
            "instance": {n: float(v) for n, v in zip(dataset.feature_names, values)},
        }

    @app.get("/sessions/{session_id}/history")
    def history(session_id: str):
        session = get_session(session_id)
        return {"entries": list(session.history)}

    return app
