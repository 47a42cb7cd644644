"""Patent-claim ingestion, dependent-claim expansion, and sequence building.

Claims arrive as JSON Lines records.  Dependent claims are expanded by
prepending their ancestor chain (root first, single-space joined) so each
evaluation text is self-contained.  Token sequences can be built forward,
backward (element-wise reversed ids), or both.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import CorpusError
from .tokenizer import Vocabulary

MODE_FORWARD = "forward_only"
MODE_BACKWARD = "backward_only"
MODE_MIXED = "mixed"
DIRECTION_MODES = (MODE_FORWARD, MODE_BACKWARD, MODE_MIXED)


@dataclass(frozen=True)
class ClaimRecord:
    patent_id: str
    claim_no: int
    parent_claim_no: Optional[int] = None
    text: str = ""
    cpc: Optional[str] = None
    year: Optional[int] = None

    @property
    def key(self) -> tuple[str, int]:
        return (self.patent_id, self.claim_no)


@dataclass
class Corpus:
    records: list[ClaimRecord]
    split_seed: int = 0
    # Ancestor records kept for expansion after a split separates a
    # dependent claim from its parent; never part of `records`.
    lineage: dict[tuple[str, int], ClaimRecord] = field(default_factory=dict)
    _index: dict[tuple[str, int], ClaimRecord] = field(
        repr=False, default_factory=dict
    )

    def __post_init__(self):
        self._index = {rec.key: rec for rec in self.records}

    def __len__(self) -> int:
        return len(self.records)

    def lookup(self, patent_id: str, claim_no: int) -> ClaimRecord:
        key = (patent_id, claim_no)
        rec = self._index.get(key)
        if rec is None:
            rec = self.lineage.get(key)
        if rec is None:
            raise CorpusError(f"no claim {claim_no} for patent {patent_id}")
        return rec


def ingest(records: Iterable[ClaimRecord]) -> Corpus:
    """Validate a record stream: unique keys, resolvable non-cyclic parents."""
    seen: dict[tuple[str, int], ClaimRecord] = {}
    ordered: list[ClaimRecord] = []
    for rec in records:
        if rec.claim_no < 1:
            raise CorpusError(f"{rec.patent_id}: claim_no must be positive")
        if rec.key in seen:
            raise CorpusError(
                f"duplicate claim ({rec.patent_id}, {rec.claim_no})"
            )
        if rec.parent_claim_no is not None and rec.parent_claim_no >= rec.claim_no:
            raise CorpusError(
                f"({rec.patent_id}, {rec.claim_no}): parent claim "
                f"{rec.parent_claim_no} must precede the claim"
            )
        seen[rec.key] = rec
        ordered.append(rec)
    for rec in ordered:
        if rec.parent_claim_no is not None:
            if (rec.patent_id, rec.parent_claim_no) not in seen:
                raise CorpusError(
                    f"({rec.patent_id}, {rec.claim_no}): parent claim "
                    f"{rec.parent_claim_no} not found"
                )
    return Corpus(records=ordered)


def expand_claim(corpus: Corpus, patent_id: str, claim_no: int) -> str:
    """Expanded text: ancestor texts root-first, joined by single spaces."""
    chain: list[str] = []
    visited: set[int] = set()
    current: Optional[int] = claim_no
    while current is not None:
        if current in visited:
            raise CorpusError(
                f"({patent_id}, {claim_no}): cycle in parent chain at {current}"
            )
        visited.add(current)
        rec = corpus.lookup(patent_id, current)
        chain.append(rec.text)
        current = rec.parent_claim_no
    return " ".join(reversed(chain))


def expanded_texts(corpus: Corpus) -> list[str]:
    """Expanded text of every record, in record order."""
    return [expand_claim(corpus, r.patent_id, r.claim_no) for r in corpus.records]


def build_sequences(
    corpus: Corpus,
    vocab: Vocabulary,
    mode: str = MODE_FORWARD,
    backward_marker: Optional[int] = None,
) -> list[list[int]]:
    """Token-id sequences per claim: forward, reversed, or both (forward first).

    backward_marker, when given, is prepended to every reversed sequence;
    disabled by default.
    """
    if mode not in DIRECTION_MODES:
        raise CorpusError(f"unknown direction mode {mode!r}")
    if not corpus.records:
        raise CorpusError("cannot build sequences from an empty corpus")
    forward = [vocab.encode(text) for text in expanded_texts(corpus)]
    if mode == MODE_FORWARD:
        return forward
    backward = [list(reversed(seq)) for seq in forward]
    if backward_marker is not None:
        backward = [[backward_marker] + seq for seq in backward]
    if mode == MODE_BACKWARD:
        return backward
    return forward + backward


def split(
    corpus: Corpus, eval_fraction: float, seed: int
) -> tuple[Corpus, Corpus]:
    """Seeded random record split into (train, eval); disjoint and exhaustive.

    Both halves keep a lineage map of all records so dependent claims stay
    expandable even when a split separates them from their parents.
    """
    if not 0 < eval_fraction < 1:
        raise CorpusError(f"eval_fraction must be in (0, 1), got {eval_fraction}")
    n = len(corpus.records)
    if n < 2:
        raise CorpusError("need at least 2 records to split")
    n_eval = min(max(1, round(eval_fraction * n)), n - 1)
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    eval_idx = set(indices[:n_eval])
    lineage = {rec.key: rec for rec in corpus.records}
    lineage.update(corpus.lineage)
    train_recs = [r for i, r in enumerate(corpus.records) if i not in eval_idx]
    eval_recs = [r for i, r in enumerate(corpus.records) if i in eval_idx]
    return (
        Corpus(records=train_recs, split_seed=seed, lineage=lineage),
        Corpus(records=eval_recs, split_seed=seed, lineage=lineage),
    )


def expand_records(corpus: Corpus) -> Corpus:
    """Self-contained copy: texts expanded, parent references cleared.

    Used when persisting a held-out split whose parents may live in the
    other half; the written file then stands alone.
    """
    out = []
    for rec in corpus.records:
        out.append(
            ClaimRecord(
                patent_id=rec.patent_id,
                claim_no=rec.claim_no,
                parent_claim_no=None,
                text=expand_claim(corpus, rec.patent_id, rec.claim_no),
                cpc=rec.cpc,
                year=rec.year,
            )
        )
    return Corpus(records=out, split_seed=corpus.split_seed)


def filter_by_year(corpus: Corpus, cutoff: int) -> tuple[Corpus, Corpus]:
    """Year-based split: records dated strictly before cutoff go to train."""
    lineage = {rec.key: rec for rec in corpus.records}
    lineage.update(corpus.lineage)
    train = [r for r in corpus.records if r.year is not None and r.year < cutoff]
    held = [r for r in corpus.records if r.year is None or r.year >= cutoff]
    return (
        Corpus(records=train, lineage=lineage),
        Corpus(records=held, lineage=lineage),
    )


def read_jsonl(path: str) -> Corpus:
    """Load and validate a claim file (one JSON object per line)."""

    def records() -> Iterable[ClaimRecord]:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
                try:
                    yield ClaimRecord(
                        patent_id=str(obj["patent_id"]),
                        claim_no=int(obj["claim_no"]),
                        parent_claim_no=(
                            None
                            if obj.get("parent_claim_no") is None
                            else int(obj["parent_claim_no"])
                        ),
                        text=str(obj["text"]),
                        cpc=obj.get("cpc"),
                        year=(None if obj.get("year") is None else int(obj["year"])),
                    )
                except KeyError as exc:
                    raise CorpusError(
                        f"{path}:{lineno}: missing required key {exc}"
                    ) from exc

    return ingest(records())


def write_jsonl(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in corpus.records:
            obj: dict = {
                "patent_id": rec.patent_id,
                "claim_no": rec.claim_no,
                "parent_claim_no": rec.parent_claim_no,
                "text": rec.text,
            }
            if rec.cpc is not None:
                obj["cpc"] = rec.cpc
            if rec.year is not None:
                obj["year"] = rec.year
            fh.write(json.dumps(obj, ensure_ascii=False))
            fh.write("\n")
