"""Experiment runners and report emission.

Two experiment shapes: the design comparison (arrow+tab vs digit keys, with
the relative Increase column), and the starting-position sweep (Q1/Q2/Q3
seeds, forward- or backward-first legs).  Rows serialize to CSV or a
markdown pipe table; percentages print with one decimal (half-even).
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import corpus as corpus_mod
from .corpus import Corpus
from .engine import (
    AeResult,
    TraversalPlan,
    UiDesign,
    aggregate,
    evaluate,
)
from .errors import DataError, EngineError
from .predictor import BACKWARD, FORWARD, BidirectionalPredictor
from .tokenizer import Vocabulary

CSV_COLUMNS = [
    "model_tag",
    "direction",
    "design",
    "start",
    "previous_ratio",
    "new_ratio",
    "increase",
    "keys_manual",
    "keys_auto",
    "n_claims",
    "skipped",
]


@dataclass
class ExperimentRow:
    model_tag: str
    direction: str
    design: str
    start: str
    previous_ratio: Optional[Fraction]
    new_ratio: Optional[Fraction]
    increase: Optional[Fraction]
    keys_manual: int
    keys_auto: int
    n_claims: int
    skipped: int


@dataclass(frozen=True)
class StartPosition:
    """A named or fractional starting point within a tokenized claim."""

    kind: str  # begin | end | fraction
    fraction: Optional[Fraction] = None
    label: str = ""

    @classmethod
    def parse(cls, label: str) -> "StartPosition":
        named = {
            "begin": cls("begin", None, "begin"),
            "end": cls("end", None, "end"),
            "q1": cls("fraction", Fraction(1, 4), "q1"),
            "q2": cls("fraction", Fraction(1, 2), "q2"),
            "q3": cls("fraction", Fraction(3, 4), "q3"),
        }
        if label in named:
            return named[label]
        if label.startswith("frac:"):
            try:
                r = Fraction(label[5:])
            except (ValueError, ZeroDivisionError) as exc:
                raise DataError(f"bad fraction in start position {label!r}") from exc
            if not 0 < r < 1:
                raise DataError(f"start fraction must be in (0, 1), got {r}")
            return cls("fraction", r, label)
        raise DataError(f"unknown start position {label!r}")


BEGIN = StartPosition.parse("begin")
END = StartPosition.parse("end")
Q1 = StartPosition.parse("q1")
Q2 = StartPosition.parse("q2")
Q3 = StartPosition.parse("q3")


def position_index(pos: StartPosition, token_count: int) -> int:
    """Zero-based seed index for a starting position.

    A fraction r maps to the r-quantile token, 1-based ceil(r*T), so q1 of
    a 100-token claim seeds at the 25th token (index 24).  Fractional seeds
    clamp into the interior [1, T-2].
    """
    T = token_count
    if T < 2:
        raise EngineError(f"need at least 2 tokens, got {T}")
    if pos.kind == "begin":
        return 0
    if pos.kind == "end":
        return T - 1
    assert pos.fraction is not None
    scaled = pos.fraction * T
    one_based = -((-scaled.numerator) // scaled.denominator)  # ceil
    return min(max(one_based - 1, 1), T - 2)


def relative_increase(previous: Fraction, new: Fraction) -> Fraction:
    """(new - previous) / previous; the Increase column."""
    if previous <= 0:
        raise EngineError("relative increase needs a positive previous ratio")
    return (new - previous) / previous


def _claim_tokens(corpus: Corpus, vocab: Vocabulary) -> list[list[int]]:
    return [vocab.encode(text) for text in corpus_mod.expanded_texts(corpus)]


def _map_ordered(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def plan_for_direction(direction: str, token_count: int) -> TraversalPlan:
    if direction == FORWARD:
        return TraversalPlan.forward_from_beginning()
    if direction == BACKWARD:
        return TraversalPlan.backward_from_end(token_count)
    raise EngineError(f"unknown direction {direction!r}")


def run_design_comparison(
    bp: BidirectionalPredictor,
    vocab: Vocabulary,
    eval_corpus: Corpus,
    directions: Sequence[str],
    k: int,
    model_tag: str = "model",
    pooling: str = "micro",
    max_context: int = 1024,
    jobs: int = 1,
    skip_empty_tokens: bool = False,
    legacy_cap_to_manual: bool = False,
) -> list[ExperimentRow]:
    """Evaluate every claim under both designs with plain begin/end plans."""
    if not eval_corpus.records:
        raise DataError("evaluation corpus is empty")
    claims = _claim_tokens(eval_corpus, vocab)
    rows = []
    for direction in directions:
        usable = [t for t in claims if len(t) >= 2]
        skipped = len(claims) - len(usable)

        def _one(tokens: list[int], direction=direction) -> tuple[AeResult, AeResult]:
            plan = plan_for_direction(direction, len(tokens))
            legacy = evaluate(
                bp, vocab, tokens, plan, UiDesign.LEGACY_ARROW_TAB, k,
                max_context=max_context, skip_empty_tokens=skip_empty_tokens,
                legacy_cap_to_manual=legacy_cap_to_manual,
            )
            digit = evaluate(
                bp, vocab, tokens, plan, UiDesign.DIGIT_KEYS, k,
                max_context=max_context, skip_empty_tokens=skip_empty_tokens,
            )
            return legacy, digit

        pairs = _map_ordered(_one, usable, jobs)
        legacy_agg = aggregate([p[0] for p in pairs], pooling)
        digit_agg = aggregate([p[1] for p in pairs], pooling)
        rows.append(
            ExperimentRow(
                model_tag=model_tag,
                direction=direction,
                design="legacy+digit",
                start="begin" if direction == FORWARD else "end",
                previous_ratio=legacy_agg.ae_ratio,
                new_ratio=digit_agg.ae_ratio,
                increase=relative_increase(legacy_agg.ae_ratio, digit_agg.ae_ratio),
                keys_manual=digit_agg.ledger.keys_manual,
                keys_auto=digit_agg.ledger.keys_auto,
                n_claims=len(usable),
                skipped=skipped,
            )
        )
    return rows


MIN_SWEEP_TOKENS = 4


def run_position_sweep(
    bp: BidirectionalPredictor,
    vocab: Vocabulary,
    eval_corpus: Corpus,
    positions: Sequence[StartPosition],
    first_legs: Sequence[str],
    design: UiDesign,
    k: int,
    model_tag: str = "model",
    pooling: str = "micro",
    max_context: int = 1024,
    jobs: int = 1,
    skip_empty_tokens: bool = False,
    legacy_cap_to_manual: bool = False,
) -> list[ExperimentRow]:
    """One row per (position, first leg); claims under 4 tokens are skipped."""
    if not eval_corpus.records:
        raise DataError("evaluation corpus is empty")
    claims = _claim_tokens(eval_corpus, vocab)
    usable = [t for t in claims if len(t) >= MIN_SWEEP_TOKENS]
    skipped = len(claims) - len(usable)
    if not usable:
        raise DataError("no claim is long enough for a position sweep")
    rows = []
    for pos in positions:
        for first_leg in first_legs:

            def _one(tokens: list[int], pos=pos, first_leg=first_leg) -> AeResult:
                plan = TraversalPlan(position_index(pos, len(tokens)), first_leg)
                return evaluate(
                    bp, vocab, tokens, plan, design, k, max_context=max_context,
                    skip_empty_tokens=skip_empty_tokens,
                    legacy_cap_to_manual=legacy_cap_to_manual,
                )

            agg = aggregate(_map_ordered(_one, usable, jobs), pooling)
            rows.append(
                ExperimentRow(
                    model_tag=model_tag,
                    direction=first_leg,
                    design=design.value,
                    start=pos.label,
                    previous_ratio=None,
                    new_ratio=agg.ae_ratio,
                    increase=None,
                    keys_manual=agg.ledger.keys_manual,
                    keys_auto=agg.ledger.keys_auto,
                    n_claims=len(usable),
                    skipped=skipped,
                )
            )
    return rows


def format_percent(value: Optional[Fraction]) -> str:
    """Exact-rational percent with one decimal, ROUND_HALF_EVEN."""
    if value is None:
        return ""
    scaled = Decimal(value.numerator) * 100 / Decimal(value.denominator)
    return str(scaled.quantize(Decimal("0.1"), rounding=ROUND_HALF_EVEN))


def parse_percent(text: str) -> Optional[Fraction]:
    text = text.strip().rstrip("%")
    if not text:
        return None
    return Fraction(Decimal(text)) / 100


def emit_report(rows: Sequence[ExperimentRow], format: str = "csv") -> str:
    """Render rows deterministically as CSV or a markdown pipe table."""
    if not rows:
        raise DataError("no rows to report")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.model_tag,
                    row.direction,
                    row.design,
                    row.start,
                    format_percent(row.previous_ratio),
                    format_percent(row.new_ratio),
                    format_percent(row.increase),
                    row.keys_manual,
                    row.keys_auto,
                    row.n_claims,
                    row.skipped,
                ]
            )
        return buf.getvalue()
    if format == "markdown":
        lines = [
            "| " + " | ".join(CSV_COLUMNS) + " |",
            "|" + "|".join(" --- " for _ in CSV_COLUMNS) + "|",
        ]
        for row in rows:
            cells = [
                row.model_tag,
                row.direction,
                row.design,
                row.start,
                _md_pct(row.previous_ratio),
                _md_pct(row.new_ratio),
                _md_pct(row.increase),
                str(row.keys_manual),
                str(row.keys_auto),
                str(row.n_claims),
                str(row.skipped),
            ]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise DataError(f"unknown report format {format!r}")


def _md_pct(value: Optional[Fraction]) -> str:
    rendered = format_percent(value)
    return rendered + "%" if rendered else ""


def parse_report_csv(text: str) -> list[ExperimentRow]:
    """Read rows back from emit_report's CSV form (for format conversion)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty report") from None
    if header != CSV_COLUMNS:
        raise DataError(f"unexpected report header: {header}")
    rows = []
    for record in reader:
        if not record:
            continue
        if len(record) != len(CSV_COLUMNS):
            raise DataError(f"malformed report row: {record}")
        rows.append(
            ExperimentRow(
                model_tag=record[0],
                direction=record[1],
                design=record[2],
                start=record[3],
                previous_ratio=parse_percent(record[4]),
                new_ratio=parse_percent(record[5]),
                increase=parse_percent(record[6]),
                keys_manual=int(record[7]),
                keys_auto=int(record[8]),
                n_claims=int(record[9]),
                skipped=int(record[10]),
            )
        )
    if not rows:
        raise DataError("report has a header but no rows")
    return rows
