"""HTTP service: stateless prediction plus stateful autocomplete sessions.

The server owns all keystroke accounting.  A session tracks committed
tokens, a pending manually-typed fragment, and two counters: `actual`
(keystrokes really pressed) and `manual_equivalent` (keystrokes the same
text would have cost typed entirely by hand, i.e. the stripped lengths of
committed tokens plus the pending fragment).  The live AE ratio is
(manual_equivalent - actual) / manual_equivalent.

Endpoints (all JSON, all responses carry schema_version 1):

    POST /v1/sessions                     create a session
    GET  /v1/sessions/{id}                snapshot
    POST /v1/sessions/{id}/events         apply one key event
    GET  /v1/sessions/{id}/suggestions    current top-k with digit labels
    POST /v1/predict                      stateless prediction
    GET  /v1/health
"""

from __future__ import annotations

import itertools
import threading
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import UiDesign, selection_cost
from .errors import AekitError
from .predictor import DIRECTIONS, FORWARD, BidirectionalPredictor, Prediction
from .tokenizer import Vocabulary

SCHEMA_VERSION = 1
MAX_SESSION_K = 10  # digit labels span 0..9


class ApiError(AekitError):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


class Session:
    """One interactive writing session; all mutation goes through apply()."""

    def __init__(
        self,
        session_id: str,
        bp: BidirectionalPredictor,
        vocab: Vocabulary,
        design: UiDesign,
        direction: str,
        k: int,
        max_context: int = 1024,
    ):
        self.session_id = session_id
        self.bp = bp
        self.vocab = vocab
        self.design = design
        self.direction = direction
        self.k = k
        self.max_context = max_context
        self.design_at_start = design
        self.direction_at_start = direction
        self.committed: list[int] = []
        self.pending: str = ""
        self.actual = 0
        self.events: list[dict] = []
        self.lock = threading.Lock()

    # -- derived state ---------------------------------------------------

    @property
    def manual_equivalent(self) -> int:
        total = len(self.pending)
        for tid in self.committed:
            total += self.vocab.token_surface(tid)[1]
        return total

    @property
    def cursor_side(self) -> str:
        return "end" if self.direction == FORWARD else "begin"

    def ae_ratio(self) -> Optional[float]:
        me = self.manual_equivalent
        if me <= 0:
            return None
        return (me - self.actual) / me

    def suggestions(self) -> Prediction:
        context = self.committed[-self.max_context :] \
            if self.direction == FORWARD else self.committed[: self.max_context]
        return self.bp.predict(context, self.direction, self.k)

    def snapshot(self) -> dict:
        ratio = self.ae_ratio()
        manual_equivalent = self.manual_equivalent
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": self.session_id,
            "design": self.design.value,
            "k": self.k,
            "direction": self.direction,
            "cursor_side": self.cursor_side,
            "text": self.vocab.decode(self.committed),
            "pending": self.pending,
            "token_count": len(self.committed),
            "ledger": {
                "actual": self.actual,
                "manual_equivalent": manual_equivalent,
                # provided so clients can display savings without doing
                # their own keystroke arithmetic
                "saved": manual_equivalent - self.actual,
            },
            "ae_defined": ratio is not None,
            "ae_ratio": ratio,
        }

    # -- event handling ----------------------------------------------------

    def apply(self, event: dict) -> dict:
        """Apply one key event and return the updated snapshot."""
        etype = event.get("type")
        if etype == "digit":
            self._apply_digit(event.get("value"))
        elif etype == "char":
            self._apply_char(event.get("value"))
        elif etype == "toggle":
            self.direction = "backward" if self.direction == FORWARD else FORWARD
            self.pending = ""
        elif etype == "backspace":
            self.actual += 1
            self.pending = self.pending[:-1]
        else:
            raise ApiError(400, f"unknown event type {etype!r}")
        self.events.append(dict(event))
        return self.snapshot()

    def _apply_digit(self, value) -> None:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ApiError(400, "digit event needs an integer value")
        prediction = self.suggestions()
        if not 0 <= value < len(prediction.candidates):
            raise ApiError(
                400,
                f"digit {value} out of range: {len(prediction.candidates)} suggestions",
            )
        token_id = prediction.candidates[value][0]
        self._finalize_pending()
        self._commit(token_id)
        self.actual += selection_cost(self.design, value + 1, self.k)

    def _apply_char(self, value) -> None:
        if not isinstance(value, str) or len(value) != 1:
            raise ApiError(400, "char event needs a single-character value")
        self.actual += 1
        if value.isspace():
            self._finalize_pending()
        else:
            self.pending += value

    def _commit(self, token_id: int) -> None:
        if self.direction == FORWARD:
            self.committed.append(token_id)
        else:
            self.committed.insert(0, token_id)

    def _finalize_pending(self) -> None:
        """Encode the pending fragment into committed tokens (no keystrokes)."""
        if not self.pending:
            return
        fragment = self.pending
        self.pending = ""
        if self.direction == FORWARD:
            text = (" " + fragment) if self.committed else fragment
            self.committed.extend(self.vocab.encode(text))
            return
        ids = self.vocab.encode(fragment)
        if self.committed:
            # The old first token starts mid-text now; give it the leading
            # space the explicit word-break keystroke asked for.
            first_surface = self.vocab.token_surface(self.committed[0])[0]
            if not first_surface[0].isspace():
                respaced = self.vocab.encode(" " + first_surface)
                self.committed = ids + respaced + self.committed[1:]
                return
        self.committed = ids + self.committed

    def replay(self) -> "Session":
        """Rebuild an identical session from this session's event log."""
        twin = Session(
            session_id=self.session_id,
            bp=self.bp,
            vocab=self.vocab,
            design=self.design_at_start,
            direction=self.direction_at_start,
            k=self.k,
            max_context=self.max_context,
        )
        for event in self.events:
            twin.apply(event)
        return twin


class SessionEvent(BaseModel):
    type: str
    value: Optional[object] = None


class CreateSessionRequest(BaseModel):
    design: str = "digit"
    direction: str = FORWARD
    k: Optional[int] = None
    model_tag: str = "default"


class PredictRequest(BaseModel):
    context: list[int]
    direction: str = FORWARD
    k: int = 10
    model_tag: str = "default"


def create_app(
    models: dict[str, BidirectionalPredictor],
    vocab: Vocabulary,
    default_k: int = 10,
    max_context: int = 1024,
) -> FastAPI:
    app = FastAPI(title="aekit autocomplete server")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    ids = itertools.count(1)

    def _get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id!r}")
        return session

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"schema_version": SCHEMA_VERSION, "error": exc.message},
        )

    @app.exception_handler(AekitError)
    async def _aekit_error(_request, exc: AekitError):
        return JSONResponse(
            status_code=400,
            content={"schema_version": SCHEMA_VERSION, "error": str(exc)},
        )

    @app.get("/v1/health")
    def health():
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "ok",
            "models": sorted(models),
        }

    @app.post("/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        bp = models.get(req.model_tag)
        if bp is None:
            raise ApiError(404, f"unknown model_tag {req.model_tag!r}")
        if req.direction not in DIRECTIONS:
            raise ApiError(400, f"unknown direction {req.direction!r}")
        if not bp.supports(req.direction):
            raise ApiError(400, f"model cannot predict {req.direction}")
        try:
            design = UiDesign.from_label(req.design)
        except AekitError as exc:
            raise ApiError(400, str(exc)) from exc
        k = default_k if req.k is None else req.k
        if not 1 <= k <= min(MAX_SESSION_K, vocab.size):
            raise ApiError(
                400, f"k must be in [1, {min(MAX_SESSION_K, vocab.size)}], got {k}"
            )
        with registry_lock:
            session_id = f"s{next(ids):08d}"
            session = Session(
                session_id=session_id,
                bp=bp,
                vocab=vocab,
                design=design,
                direction=req.direction,
                k=k,
                max_context=max_context,
            )
            sessions[session_id] = session
        return session.snapshot()

    @app.get("/v1/sessions/{session_id}")
    def get_snapshot(session_id: str):
        session = _get_session(session_id)
        with session.lock:
            return session.snapshot()

    @app.post("/v1/sessions/{session_id}/events")
    def post_event(session_id: str, event: SessionEvent):
        session = _get_session(session_id)
        with session.lock:
            return session.apply({"type": event.type, "value": event.value})

    @app.get("/v1/sessions/{session_id}/suggestions")
    def get_suggestions(session_id: str):
        session = _get_session(session_id)
        with session.lock:
            prediction = session.suggestions()
            return {
                "schema_version": SCHEMA_VERSION,
                "session_id": session_id,
                "direction": session.direction,
                "suggestions": [
                    {
                        "label": i,
                        "id": tid,
                        "surface": vocab.token_surface(tid)[0],
                        "score": score,
                    }
                    for i, (tid, score) in enumerate(prediction.candidates)
                ],
            }

    @app.post("/v1/predict")
    def predict(req: PredictRequest):
        bp = models.get(req.model_tag)
        if bp is None:
            raise ApiError(404, f"unknown model_tag {req.model_tag!r}")
        if req.direction not in DIRECTIONS:
            raise ApiError(400, f"unknown direction {req.direction!r}")
        for tid in req.context:
            if not 0 <= tid < vocab.size:
                raise ApiError(400, f"context id {tid} out of range")
        prediction = bp.predict(req.context[-max_context:], req.direction, req.k)
        return {
            "schema_version": SCHEMA_VERSION,
            "candidates": [
                {"id": tid, "score": score} for tid, score in prediction.candidates
            ],
        }

    return app
