"""Keystroke ledgers and AE ratios.

The accounting loop walks a token sequence from position 1: the predictor
sees the prefix, and the true token either gets selected from the top-k
(one digit keystroke, or rank keystrokes under the arrow+tab design) or is
typed out at its stripped surface length.  keys_manual accrues the stripped
length at every step regardless, and the AE ratio is the saved fraction
(keys_manual - keys_auto) / keys_manual.

Traversals may start anywhere: plain forward from the beginning, plain
backward from the end, or mid-start two-leg walks where the first leg runs
from the seed token to one end and the second leg covers the other side
with the entire first-leg span as context.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import AeUndefinedError, EngineError
from .predictor import BACKWARD, FORWARD, BidirectionalPredictor, Prediction
from .tokenizer import Vocabulary

DEFAULT_MAX_CONTEXT = 1024


class UiDesign(Enum):
    LEGACY_ARROW_TAB = "legacy"
    DIGIT_KEYS = "digit"

    @classmethod
    def from_label(cls, label: str) -> "UiDesign":
        for design in cls:
            if design.value == label:
                return design
        raise EngineError(f"unknown UI design {label!r}")


@dataclass
class KeystrokeLedger:
    keys_auto: int = 0
    keys_manual: int = 0
    tokens_counted: int = 0
    hits: int = 0

    def __add__(self, other: "KeystrokeLedger") -> "KeystrokeLedger":
        return KeystrokeLedger(
            keys_auto=self.keys_auto + other.keys_auto,
            keys_manual=self.keys_manual + other.keys_manual,
            tokens_counted=self.tokens_counted + other.tokens_counted,
            hits=self.hits + other.hits,
        )


@dataclass(frozen=True)
class TraversalPlan:
    """Where the walk starts (token index) and which way the first leg goes."""

    start_index: int
    first_leg: str = FORWARD

    @classmethod
    def forward_from_beginning(cls) -> "TraversalPlan":
        return cls(start_index=0, first_leg=FORWARD)

    @classmethod
    def backward_from_end(cls, token_count: int) -> "TraversalPlan":
        return cls(start_index=token_count - 1, first_leg=BACKWARD)


@dataclass
class AeResult:
    ledger: KeystrokeLedger
    ae_ratio: Fraction
    design: UiDesign
    plan: Optional[TraversalPlan]


@dataclass
class AggregateResult:
    """Corpus-level pooling of per-claim results."""

    ledger: KeystrokeLedger
    ae_ratio: Fraction
    design: UiDesign
    pooling: str
    n_results: int


def manual_cost(vocab: Vocabulary, token_id: int) -> int:
    """Keystrokes to type the token by hand: its stripped surface length."""
    _, stripped = vocab.token_surface(token_id)
    return stripped


def selection_cost(design: UiDesign, rank: int, k: Optional[int] = None) -> int:
    """Keystrokes to select the candidate at 1-based `rank`.

    Arrow+tab charges (rank-1) down arrows plus the tab; digit keys charge
    a single keystroke at any rank.
    """
    if rank < 1 or (k is not None and rank > k):
        raise EngineError(f"rank {rank} out of range for k={k}")
    if design is UiDesign.LEGACY_ARROW_TAB:
        return rank
    return 1


def evaluate_leg(
    predict: Callable[[Sequence[int]], Prediction],
    vocab: Vocabulary,
    seq: Sequence[int],
    design: UiDesign,
    k: int,
    count_from: int = 1,
    max_context: int = DEFAULT_MAX_CONTEXT,
    skip_empty_tokens: bool = False,
    legacy_cap_to_manual: bool = False,
) -> KeystrokeLedger:
    """Run the accounting loop over seq[count_from:], prompting with prefixes.

    The caller passes seq in walk order (pre-reversed for backward legs).
    Positions before count_from act as seed context only.  Prompts keep at
    most max_context of the most recent tokens.
    """
    if len(seq) < 1:
        raise EngineError("cannot evaluate an empty sequence")
    ledger = KeystrokeLedger()
    for i in range(count_from, len(seq)):
        prompt = seq[max(0, i - max_context) : i]
        try:
            prediction = predict(prompt)
        except Exception as exc:
            raise EngineError(f"prediction failed at step {i}: {exc}") from exc
        true_token = seq[i]
        typed = manual_cost(vocab, true_token)
        if skip_empty_tokens and typed == 0:
            continue
        rank = prediction.rank_of(true_token)
        if rank is not None:
            cost = selection_cost(design, rank, k)
            if legacy_cap_to_manual and design is UiDesign.LEGACY_ARROW_TAB:
                cost = min(cost, typed)
            ledger.keys_auto += cost
            ledger.hits += 1
        else:
            ledger.keys_auto += typed
        ledger.keys_manual += typed
        ledger.tokens_counted += 1
    return ledger


def ae_ratio(ledger: KeystrokeLedger) -> Fraction:
    """(keys_manual - keys_auto) / keys_manual, exact."""
    if ledger.keys_manual <= 0:
        raise AeUndefinedError(
            "AE ratio undefined: no manual keystrokes were counted"
        )
    return Fraction(ledger.keys_manual - ledger.keys_auto, ledger.keys_manual)


def evaluate(
    bp: BidirectionalPredictor,
    vocab: Vocabulary,
    tokens: Sequence[int],
    plan: TraversalPlan,
    design: UiDesign,
    k: int,
    max_context: int = DEFAULT_MAX_CONTEXT,
    skip_empty_tokens: bool = False,
    legacy_cap_to_manual: bool = False,
) -> AeResult:
    """Evaluate one claim under a traversal plan; always counts T-1 tokens.

    Forward-first from seed n: leg 1 walks t_n..t_end, then leg 2 walks the
    reversed text with everything down to the seed as context, counting the
    remaining t_{n-1}..t_0.  Backward-first mirrors this.  Plain begin/end
    plans degenerate to a single leg.
    """
    T = len(tokens)
    if T < 2:
        raise EngineError(f"need at least 2 tokens to evaluate, got {T}")
    n = plan.start_index
    if not 0 <= n < T:
        raise EngineError(f"start index {n} out of range for {T} tokens")
    if plan.first_leg not in (FORWARD, BACKWARD):
        raise EngineError(f"unknown first leg {plan.first_leg!r}")

    tokens = list(tokens)
    if plan.first_leg == FORWARD:
        legs = [
            (tokens[n:], FORWARD, 1),
            (list(reversed(tokens)), BACKWARD, T - n),
        ]
    else:
        legs = [
            (list(reversed(tokens[: n + 1])), BACKWARD, 1),
            (tokens, FORWARD, n + 1),
        ]

    total = KeystrokeLedger()
    for walk_seq, direction, count_from in legs:
        if count_from >= len(walk_seq):
            continue
        if direction == FORWARD:
            predict = lambda prompt: bp.predict(prompt, FORWARD, k)
        else:
            # Walk order is reversed reading order; the predictor contract
            # wants natural order and re-reverses internally.
            predict = lambda prompt: bp.predict(list(reversed(prompt)), BACKWARD, k)
        total = total + evaluate_leg(
            predict,
            vocab,
            walk_seq,
            design,
            k,
            count_from=count_from,
            max_context=max_context,
            skip_empty_tokens=skip_empty_tokens,
            legacy_cap_to_manual=legacy_cap_to_manual,
        )
    return AeResult(ledger=total, ae_ratio=ae_ratio(total), design=design, plan=plan)


def aggregate(results: Sequence[AeResult], pooling: str = "micro") -> AggregateResult:
    """Pool per-claim results: micro sums ledgers first, macro averages ratios."""
    if not results:
        raise EngineError("cannot aggregate an empty result list")
    if pooling not in ("micro", "macro"):
        raise EngineError(f"unknown pooling {pooling!r}")
    designs = {r.design for r in results}
    if len(designs) > 1:
        raise EngineError("cannot aggregate results from different designs")
    pooled = KeystrokeLedger()
    for r in results:
        pooled = pooled + r.ledger
    if pooling == "micro":
        ratio = ae_ratio(pooled)
    else:
        ratio = sum((r.ae_ratio for r in results), Fraction(0)) / len(results)
    return AggregateResult(
        ledger=pooled,
        ae_ratio=ratio,
        design=results[0].design,
        pooling=pooling,
        n_results=len(results),
    )
