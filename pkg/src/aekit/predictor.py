"""Ranked top-k next-token prediction.

Three predictor flavors share one output contract (the Prediction type):
a count-based n-gram model with stupid-backoff scoring, a scripted replay
predictor for tests, and an HTTP client for external model servers.  The
BidirectionalPredictor wraps one or two models so callers can ask for the
next token (forward) or the previous token (backward, via reversed
contexts) through a single interface.
"""

from __future__ import annotations

import gzip
import json
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import requests

from .errors import DataError, PredictionInvariantError, PredictorError

FORWARD = "forward"
BACKWARD = "backward"
DIRECTIONS = (FORWARD, BACKWARD)

DEFAULT_DISCOUNT = 0.4


@dataclass(frozen=True)
class Prediction:
    """Ranked candidates: ids distinct, scores non-increasing, ties by id."""

    candidates: tuple[tuple[int, float], ...]
    direction: str = FORWARD

    def ids(self) -> tuple[int, ...]:
        return tuple(tid for tid, _ in self.candidates)

    def rank_of(self, token_id: int) -> Optional[int]:
        """1-based rank of token_id among the candidates, or None."""
        for rank, (tid, _) in enumerate(self.candidates, start=1):
            if tid == token_id:
                return rank
        return None


def validate_prediction(
    pred: Prediction, k: Optional[int] = None, vocab_size: Optional[int] = None
) -> Prediction:
    """Assert the Prediction contract; returns the prediction unchanged."""
    cands = pred.candidates
    if k is not None and len(cands) != k:
        raise PredictionInvariantError(
            f"expected exactly {k} candidates, got {len(cands)}"
        )
    seen: set[int] = set()
    prev_score: Optional[float] = None
    prev_id: Optional[int] = None
    for tid, score in cands:
        if tid < 0:
            raise PredictionInvariantError(f"negative token id {tid}")
        if vocab_size is not None and tid >= vocab_size:
            raise PredictionInvariantError(
                f"token id {tid} out of range for vocabulary of size {vocab_size}"
            )
        if tid in seen:
            raise PredictionInvariantError(f"duplicate token id {tid}")
        seen.add(tid)
        if score < 0 or math.isnan(score):
            raise PredictionInvariantError(f"invalid score {score} for id {tid}")
        if prev_score is not None:
            if score > prev_score:
                raise PredictionInvariantError("scores must be non-increasing")
            if score == prev_score and prev_id is not None and tid < prev_id:
                raise PredictionInvariantError("score ties must order by token id")
        prev_score, prev_id = score, tid
    if pred.direction not in DIRECTIONS:
        raise PredictionInvariantError(f"bad direction {pred.direction!r}")
    return pred


class NgramModel:
    """Count tables for every context length below `order`, plus metadata.

    counts maps context tuples (length 0..order-1) to successor count
    tables; the empty tuple holds the unigram counts used for ranking and
    padding sparse contexts.
    """

    def __init__(
        self,
        order: int,
        discount: float,
        vocab_size: int,
        counts: dict[tuple[int, ...], dict[int, int]],
    ):
        if order < 1:
            raise PredictorError(f"order must be >= 1, got {order}")
        if not 0 < discount < 1:
            raise PredictorError(f"discount must be in (0, 1), got {discount}")
        self.order = order
        self.discount = discount
        self.vocab_size = vocab_size
        self.counts = counts
        self.context_totals = {
            ctx: sum(table.values()) for ctx, table in counts.items()
        }
        unigrams = counts.get((), {})
        self.unigram_rank = sorted(unigrams, key=lambda tid: (-unigrams[tid], tid))
        self.total_tokens = self.context_totals.get((), 0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NgramModel)
            and self.order == other.order
            and self.discount == other.discount
            and self.vocab_size == other.vocab_size
            and self.counts == other.counts
        )


def train_ngram(
    sequences: Sequence[Sequence[int]],
    order: int,
    discount: float = DEFAULT_DISCOUNT,
    vocab_size: Optional[int] = None,
) -> NgramModel:
    """Exact windowed counts over the sequences for all orders up to `order`.

    vocab_size defaults to max-id+1 but should be passed explicitly so that
    padding can reach tokens the training data never produced.
    """
    if order < 1:
        raise PredictorError(f"order must be >= 1, got {order}")
    if not any(len(seq) > 0 for seq in sequences):
        raise PredictorError("training input has no non-empty sequence")
    counts: dict[tuple[int, ...], dict[int, int]] = {}
    max_id = 0
    for seq in sequences:
        for i, tid in enumerate(seq):
            if tid > max_id:
                max_id = tid
            for length in range(0, min(order - 1, i) + 1):
                ctx = tuple(seq[i - length : i])
                table = counts.get(ctx)
                if table is None:
                    table = counts[ctx] = {}
                table[tid] = table.get(tid, 0) + 1
    size = vocab_size if vocab_size is not None else max_id + 1
    if max_id >= size:
        raise DataError(
            f"sequence id {max_id} out of range for vocab_size {size}"
        )
    return NgramModel(order=order, discount=discount, vocab_size=size, counts=counts)


def predict_topk(model: NgramModel, context: Sequence[int], k: int) -> Prediction:
    """Stupid-backoff top-k: longest matching context suffix wins, shorter
    suffixes fall back with a fixed discount per level, unigram frequency
    order pads sparse contexts to exactly k candidates."""
    if k < 1:
        raise PredictorError(f"k must be >= 1, got {k}")
    if k > model.vocab_size:
        raise DataError(
            f"k={k} exceeds the vocabulary size {model.vocab_size}"
        )
    ctx = tuple(context[-(model.order - 1) :]) if model.order > 1 else ()
    scores: dict[int, float] = {}
    weight = 1.0
    for start in range(len(ctx)):
        table = model.counts.get(ctx[start:])
        if table:
            total = model.context_totals[ctx[start:]]
            for tid, cnt in table.items():
                if tid not in scores:
                    scores[tid] = weight * cnt / total
        weight *= model.discount
    # `weight` is now the discount for the unigram level.  Unigram-only
    # candidates keep their precomputed frequency order, so scanning the
    # first k unseen entries is enough to cover any possible top-k member.
    merged = list(scores.items())
    if model.total_tokens:
        added = 0
        for tid in model.unigram_rank:
            if added >= k:
                break
            if tid in scores:
                continue
            merged.append(
                (tid, weight * model.counts[()][tid] / model.total_tokens)
            )
            added += 1
    merged.sort(key=lambda kv: (-kv[1], kv[0]))
    top = merged[:k]
    if len(top) < k:
        present = {tid for tid, _ in top}
        filler = 0
        while len(top) < k:
            if filler not in present:
                top.append((filler, 0.0))
            filler += 1
    return validate_prediction(
        Prediction(candidates=tuple(top)), k=k, vocab_size=model.vocab_size
    )


MODE_DUAL = "dual"
MODE_MIXED = "mixed"


@dataclass
class BidirectionalPredictor:
    """Forward/backward prediction over one or two underlying models.

    dual mode holds separate models per direction; mixed mode holds a
    single model (in the forward slot) trained on both orientations and
    answers backward queries by reversing the context.   Contexts are
    always given in natural reading order.
    """

    mode: str
    forward: Optional[NgramModel] = None
    backward: Optional[NgramModel] = None

    def __post_init__(self):
        if self.mode not in (MODE_DUAL, MODE_MIXED):
            raise PredictorError(f"unknown predictor mode {self.mode!r}")
        if self.mode == MODE_MIXED and self.backward is not None:
            raise PredictorError("mixed mode uses a single model")
        if self.forward is None and self.backward is None:
            raise PredictorError("predictor has no model")

    def supports(self, direction: str) -> bool:
        if self.mode == MODE_MIXED:
            return self.forward is not None
        return (self.forward if direction == FORWARD else self.backward) is not None

    @property
    def vocab_size(self) -> int:
        model = self.forward if self.forward is not None else self.backward
        assert model is not None
        return model.vocab_size

    def predict(self, context: Sequence[int], direction: str, k: int) -> Prediction:
        if direction not in DIRECTIONS:
            raise PredictorError(f"unknown direction {direction!r}")
        if not self.supports(direction):
            raise PredictorError(
                f"{direction} prediction unsupported by this {self.mode} predictor"
            )
        if direction == FORWARD:
            base = predict_topk(self.forward, context, k)
        else:
            model = self.forward if self.mode == MODE_MIXED else self.backward
            base = predict_topk(model, list(reversed(context)), k)
        return Prediction(candidates=base.candidates, direction=direction)


class ScriptedPredictor:
    """Replays a fixed step->Prediction script; a test oracle.

    Steps count calls from 1, matching the position loop of the keystroke
    accounting algorithm.  Querying a step the script does not cover is an
    error.
    """

    def __init__(self, script: Mapping[int, Prediction]):
        self.script = dict(script)
        self._step = 0

    def reset(self) -> None:
        self._step = 0

    def __call__(self, context: Sequence[int]) -> Prediction:
        self._step += 1
        try:
            return self.script[self._step]
        except KeyError:
            raise PredictorError(
                f"no scripted prediction for step {self._step}"
            ) from None


def scripted_predictor(script: Mapping[int, Prediction]) -> ScriptedPredictor:
    return ScriptedPredictor(script)


def remote_predict(
    endpoint: str,
    context: Sequence[int],
    direction: str,
    k: int,
    timeout: float = 10.0,
) -> Prediction:
    """POST a prediction request to an external server and validate the reply.

    The response is truncated to k candidates when longer and padded with
    zero-score filler ids when shorter, then held to the full Prediction
    contract.
    """
    if direction not in DIRECTIONS:
        raise PredictorError(f"unknown direction {direction!r}")
    payload = {"context": list(context), "direction": direction, "k": k}
    try:
        resp = requests.post(endpoint, json=payload, timeout=timeout)
        resp.raise_for_status()
        body = resp.json()
    except requests.RequestException as exc:
        raise PredictorError(f"remote prediction via {endpoint} failed: {exc}") from exc
    except ValueError as exc:
        raise PredictorError(f"{endpoint} returned non-JSON body") from exc
    if not isinstance(body, dict) or "candidates" not in body:
        raise PredictorError(f"{endpoint} response missing 'candidates'")
    candidates: list[tuple[int, float]] = []
    for item in body["candidates"]:
        try:
            candidates.append((int(item["id"]), float(item["score"])))
        except (TypeError, KeyError, ValueError) as exc:
            raise PredictorError(
                f"{endpoint} returned a malformed candidate: {item!r}"
            ) from exc
    probe = Prediction(candidates=tuple(candidates), direction=direction)
    validate_prediction(probe)  # reject duplicates/mis-ordered before resizing
    candidates = candidates[:k]
    present = {tid for tid, _ in candidates}
    filler = 0
    while len(candidates) < k:
        if filler not in present:
            candidates.append((filler, 0.0))
        filler += 1
    return validate_prediction(
        Prediction(candidates=tuple(candidates), direction=direction), k=k
    )


def predictor_fn(
    bp: BidirectionalPredictor, direction: str, k: int
) -> Callable[[Sequence[int]], Prediction]:
    """Bind a direction and k into a plain prompt->Prediction callable."""

    def fn(context: Sequence[int]) -> Prediction:
        return bp.predict(context, direction, k)

    return fn


# ---------------------------------------------------------------------------
# Serialization: a "bundle" file stores the predictor mode plus one model
# per populated slot.  Ordinary JSON, gzipped when the path ends in .gz.
# ---------------------------------------------------------------------------


def _model_to_obj(model: Optional[NgramModel]) -> Optional[dict]:
    if model is None:
        return None
    contexts = []
    for ctx in sorted(model.counts):
        table = model.counts[ctx]
        contexts.append([list(ctx), sorted(table.items())])
    return {
        "order": model.order,
        "discount": model.discount,
        "vocab_size": model.vocab_size,
        "contexts": contexts,
    }


def _model_from_obj(obj: Optional[dict]) -> Optional[NgramModel]:
    if obj is None:
        return None
    counts: dict[tuple[int, ...], dict[int, int]] = {}
    for ctx_list, table in obj["contexts"]:
        counts[tuple(ctx_list)] = {int(tid): int(cnt) for tid, cnt in table}
    return NgramModel(
        order=int(obj["order"]),
        discount=float(obj["discount"]),
        vocab_size=int(obj["vocab_size"]),
        counts=counts,
    )


def save_predictor(bp: BidirectionalPredictor, path: str) -> None:
    obj = {
        "format": "aekit-predictor",
        "version": 1,
        "mode": bp.mode,
        "forward": _model_to_obj(bp.forward),
        "backward": _model_to_obj(bp.backward),
    }
    data = json.dumps(obj, separators=(",", ":"), sort_keys=True)
    if path.endswith(".gz"):
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            fh.write(data)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(data)


def load_predictor(path: str) -> BidirectionalPredictor:
    try:
        if path.endswith(".gz"):
            with gzip.open(path, "rt", encoding="utf-8") as fh:
                obj = json.load(fh)
        else:
            with open(path, "r", encoding="utf-8") as fh:
                obj = json.load(fh)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot load predictor from {path}: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("format") != "aekit-predictor":
        raise DataError(f"{path} is not a predictor bundle")
    return BidirectionalPredictor(
        mode=obj["mode"],
        forward=_model_from_obj(obj.get("forward")),
        backward=_model_from_obj(obj.get("backward")),
    )


def merge_predictors(parts: Sequence[BidirectionalPredictor]) -> BidirectionalPredictor:
    """Combine single-direction bundles into one predictor.

    Two dual bundles covering opposite directions merge into a full dual
    predictor; a single bundle passes through unchanged.
    """
    if not parts:
        raise PredictorError("no predictor bundles given")
    if len(parts) == 1:
        return parts[0]
    if any(p.mode == MODE_MIXED for p in parts):
        raise PredictorError("a mixed-mode bundle cannot be merged")
    forward = None
    backward = None
    for p in parts:
        if p.forward is not None:
            if forward is not None:
                raise PredictorError("two bundles both provide a forward model")
            forward = p.forward
        if p.backward is not None:
            if backward is not None:
                raise PredictorError("two bundles both provide a backward model")
            backward = p.backward
    return BidirectionalPredictor(mode=MODE_DUAL, forward=forward, backward=backward)
