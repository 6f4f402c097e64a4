"""Chat service: per message, tag the punchline, recover the original
phrase, inject both as prompt clues, and reply through the gateway."""

from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import __version__
from .crf import CrfModel, load_model, predict_spans
from .fuzzy import DEFAULT_COSTS, FuzzyCostTable
from .gateway import CompletionRequest, GatewayError, make_backend
from .pinyin import PinyinLexicon, default_inventory, load_lexicon, default_lexicon
from .prompts import PromptMode, TemplateSet, build_prompt
from .retrieval import (
    BigramLm,
    OriginalCandidate,
    RetrievalConfig,
    RetrievalError,
    load_lm,
    retrieve_original,
)

logger = logging.getLogger(__name__)

GATEWAY_ERROR_REPLY = "【错误】上游模型暂时不可用,请稍后重试。"


@dataclass(frozen=True)
class Analysis:
    """What the pipeline found in one user message."""

    punchline: tuple[int, int, str] | None
    candidates: tuple[OriginalCandidate, ...]
    clue_used: bool

    def to_dict(self) -> dict:
        return {
            "punchline": (
                {"start": self.punchline[0], "end": self.punchline[1],
                 "surface": self.punchline[2]}
                if self.punchline else None),
            "candidates": [
                {"hanzi": c.hanzi, "total_score": c.total_score,
                 "lm_logprob": c.lm_logprob,
                 "phonetic_distance": c.phonetic_distance}
                for c in self.candidates
            ],
            "clue_used": self.clue_used,
        }


@dataclass
class ServiceResources:
    lexicon: PinyinLexicon
    model: CrfModel
    lm: BigramLm
    costs: FuzzyCostTable = DEFAULT_COSTS
    retrieval: RetrievalConfig = RetrievalConfig()
    templates: TemplateSet = field(default_factory=TemplateSet.default)
    model_name: str = ""
    # retrieve_original is pure, so repeated punchlines can reuse results
    _retrieval_cache: dict = field(default_factory=dict, repr=False)
    _cache_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def cached_retrieve(self, surface: str) -> tuple[OriginalCandidate, ...]:
        with self._cache_lock:
            if surface in self._retrieval_cache:
                return self._retrieval_cache[surface]
        candidates = tuple(retrieve_original(
            surface, self.lexicon, self.lm, self.costs, self.retrieval))
        with self._cache_lock:
            if len(self._retrieval_cache) > 4096:
                self._retrieval_cache.clear()
            self._retrieval_cache[surface] = candidates
        return candidates


def analyze(text: str, resources: ServiceResources) -> Analysis:
    """Never raises: any stage failure degrades to a clue-less Analysis."""
    if not text:
        return Analysis(None, (), False)
    try:
        spans = predict_spans(resources.model, text, resources.lexicon)
    except Exception:  # defensive: tagging must never break the chat
        logger.exception("punchline tagging failed")
        spans = []
    if not spans:
        return Analysis(None, (), False)
    start, end = spans[0]
    surface = text[start:end]
    candidates: tuple[OriginalCandidate, ...] = ()
    try:
        candidates = resources.cached_retrieve(surface)
    except Exception as exc:  # degrade to clue-less, e.g. RetrievalError
        logger.info("retrieval failed for %r: %s", surface, exc)
    clue_used = bool(candidates)
    return Analysis((start, end, surface), candidates, clue_used)


@dataclass
class Turn:
    role: str
    text: str
    analysis: Analysis | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"role": self.role, "text": self.text}
        if self.analysis is not None:
            out["analysis"] = self.analysis.to_dict()
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class ChatSession:
    session_id: str
    turns: list[Turn] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    last_active: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    """In-memory sessions with TTL eviction; safe under concurrent access.

    Subclass and override persist()/restore() for durable storage; the
    default implementation keeps everything in memory.
    """

    def __init__(self, ttl_seconds: float = 3600.0):
        self.ttl = ttl_seconds
        self._sessions: dict[str, ChatSession] = {}
        self._lock = threading.Lock()

    def _evict(self, now: float) -> None:
        dead = [sid for sid, s in self._sessions.items()
                if now - s.last_active > self.ttl]
        for sid in dead:
            session = self._sessions.pop(sid)
            self.persist(session)

    def get_or_create(self, session_id: str | None) -> ChatSession:
        now = time.time()
        with self._lock:
            self._evict(now)
            if session_id and session_id in self._sessions:
                session = self._sessions[session_id]
                session.last_active = now
                return session
            new_id = uuid.uuid4().hex
            session = ChatSession(session_id=new_id)
            self._sessions[new_id] = session
            return session

    def get(self, session_id: str) -> ChatSession | None:
        with self._lock:
            return self._sessions.get(session_id)

    def persist(self, session: ChatSession) -> None:
        """Hook for durable storage of evicted sessions; no-op by default."""

    def restore(self, session_id: str) -> ChatSession | None:
        return None


def chat(session: ChatSession, message: str, resources: ServiceResources,
         gateway) -> tuple[str, Analysis, str | None]:
    """One chat turn. Returns (reply text, analysis, error detail or None).

    The user turn and an assistant (or error-assistant) turn are always
    appended, so transcripts stay consistent even when the gateway fails.
    """
    if not message:
        raise ValueError("message must be non-empty")
    analysis = analyze(message, resources)
    if analysis.clue_used:
        bundle = build_prompt(
            PromptMode.CLUE_PROVIDED, message,
            clue=(analysis.punchline[2], analysis.candidates[0].hanzi),
            templates=resources.templates)
    else:
        bundle = build_prompt(PromptMode.ZERO_SHOT, message,
                              templates=resources.templates)
    request = CompletionRequest(messages=bundle.messages,
                                model_name=resources.model_name)
    with session.lock:
        session.turns.append(Turn("user", message, analysis=analysis))
        try:
            result = gateway.complete(request)
            session.turns.append(Turn("assistant", result.text))
            session.last_active = time.time()
            return result.text, analysis, None
        except GatewayError as exc:
            detail = str(exc)
            session.turns.append(
                Turn("assistant", GATEWAY_ERROR_REPLY, error=detail))
            session.last_active = time.time()
            return GATEWAY_ERROR_REPLY, analysis, detail


# ------------------------------------------------------------------ HTTP API


class AnalyzeIn(BaseModel):
    text: str


class ChatIn(BaseModel):
    message: str
    session_id: str | None = None


def create_app(resources: ServiceResources, gateway,
               store: SessionStore | None = None) -> FastAPI:
    app = FastAPI(title="duanzai chat service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])
    sessions = store or SessionStore()
    app.state.sessions = sessions

    @app.middleware("http")
    async def log_latency(request, call_next):
        start = time.monotonic()
        response = await call_next(request)
        logger.info("%s %s -> %d (%.1f ms)", request.method,
                    request.url.path, response.status_code,
                    (time.monotonic() - start) * 1000)
        return response

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/analyze")
    def api_analyze(payload: AnalyzeIn):
        return analyze(payload.text, resources).to_dict()

    @app.post("/api/chat")
    def api_chat(payload: ChatIn):
        if not payload.message:
            raise HTTPException(status_code=400, detail="message is empty")
        session = sessions.get_or_create(payload.session_id)
        reply, analysis, error = chat(session, payload.message, resources, gateway)
        out = {
            "session_id": session.session_id,
            "reply": reply,
            "analysis": analysis.to_dict(),
        }
        if error is not None:
            out["error"] = {"type": "gateway", "detail": error}
        return out

    @app.get("/api/session/{session_id}")
    def api_session(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        with session.lock:
            return {
                "session_id": session.session_id,
                "created_at": session.created_at,
                "turns": [t.to_dict() for t in session.turns],
            }

    return app


# ------------------------------------------------------------------- config


@dataclass
class ServiceConfig:
    crf_model: str
    lm: str
    lexicon: str | None = None
    templates: str | None = None
    gateway_backend: str = "mock"
    beta: float = 2.0
    tau: float = 1.3
    k: int = 5
    session_ttl: float = 3600.0
    model_name: str = ""

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)


def load_resources(config: ServiceConfig) -> ServiceResources:
    inventory = default_inventory()
    if config.lexicon:
        with open(config.lexicon, encoding="utf-8") as fh:
            lexicon = load_lexicon(fh, inventory)
    else:
        lexicon = default_lexicon(inventory)
    with open(config.crf_model, encoding="utf-8") as fh:
        model = load_model(fh)
    with open(config.lm, encoding="utf-8") as fh:
        lm = load_lm(fh)
    if config.templates:
        with open(config.templates, encoding="utf-8") as fh:
            templates = TemplateSet.from_stream(fh)
    else:
        templates = TemplateSet.default()
    return ServiceResources(
        lexicon=lexicon, model=model, lm=lm,
        retrieval=RetrievalConfig(tau=config.tau, beta=config.beta, k=config.k),
        templates=templates, model_name=config.model_name,
    )


def serve(config_path: str, port: int = 8000, host: str = "127.0.0.1") -> None:
    """Load models per config, then run the HTTP service until signalled."""
    import uvicorn

    config = ServiceConfig.from_file(config_path)
    resources = load_resources(config)
    gateway = make_backend(config.gateway_backend)
    app = create_app(resources, gateway, SessionStore(config.session_ttl))
    uvicorn.run(app, host=host, port=port, log_level="info")
