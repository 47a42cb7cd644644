"""Trainable text<->token mapping with a leading-space surface convention.

Two schemes are provided:

* ``bpe`` -- character-pair merges learned from the corpus on top of a base
  alphabet (all Latin-1 code points plus every character seen in training).
  Encoding is greedy longest-match against the learned surfaces, restricted
  to pre-token chunk boundaries.
* ``whitespace`` -- every distinct word/punctuation chunk becomes one token.

A token that starts a new word carries one leading space in its surface, so
decoding is plain concatenation and the "strip before counting keystrokes"
rule downstream has a literal meaning.  Characters outside the vocabulary
map to a reserved unknown token (id 0); round trips are exact for any text
whose characters were covered at training time.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import TokenizerError

SCHEME_BPE = "bpe"
SCHEME_WHITESPACE = "whitespace"
SCHEMES = (SCHEME_BPE, SCHEME_WHITESPACE)

UNKNOWN_SURFACE = "\ufffd"
BPE_MIN_VOCAB = 260  # byte-ish base alphabet + unknown + room for merges

# A chunk is an optionally space-prefixed word, an optionally space-prefixed
# punctuation run, or a whitespace run.  The three branches partition any
# string, which is what makes decode-by-concatenation exact.
_CHUNK_RE = re.compile(r" ?\w+| ?[^\w\s]+|\s+")


def split_chunks(text: str) -> list[str]:
    """Split text into word/punctuation/whitespace chunks (lossless)."""
    return _CHUNK_RE.findall(text)


@dataclass
class Vocabulary:
    """Immutable token inventory: dense ids 0..size-1, unique surfaces."""

    scheme: str
    surfaces: list[str]
    unknown_id: int = 0
    _surface_to_id: dict[str, int] = field(repr=False, default_factory=dict)
    _stripped_len: list[int] = field(repr=False, default_factory=list)
    _max_surface_len: int = field(repr=False, default=1)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise TokenizerError(f"unknown scheme {self.scheme!r}")
        if not self.surfaces:
            raise TokenizerError("vocabulary has no entries")
        self._surface_to_id = {}
        for i, s in enumerate(self.surfaces):
            if not s:
                raise TokenizerError(f"empty surface at id {i}")
            if s in self._surface_to_id:
                raise TokenizerError(f"duplicate surface {s!r}")
            self._surface_to_id[s] = i
        self._stripped_len = [len(s.strip()) for s in self.surfaces]
        self._max_surface_len = max(len(s) for s in self.surfaces)

    @property
    def size(self) -> int:
        return len(self.surfaces)

    def _check_id(self, token_id: int) -> None:
        if not 0 <= token_id < self.size:
            raise TokenizerError(
                f"token id {token_id} out of range for vocabulary of size {self.size}"
            )

    def token_surface(self, token_id: int) -> tuple[str, int]:
        """Return (surface, stripped length) for one token id."""
        self._check_id(token_id)
        return self.surfaces[token_id], self._stripped_len[token_id]

    def encode(self, text: str) -> list[int]:
        """Map text to token ids; unknown characters become the unknown id."""
        ids: list[int] = []
        lookup = self._surface_to_id.get
        if self.scheme == SCHEME_WHITESPACE:
            for chunk in split_chunks(text):
                tid = lookup(chunk)
                ids.append(self.unknown_id if tid is None else tid)
            return ids
        for chunk in split_chunks(text):
            i = 0
            n = len(chunk)
            while i < n:
                matched = False
                for length in range(min(self._max_surface_len, n - i), 0, -1):
                    tid = lookup(chunk[i : i + length])
                    if tid is not None and tid != self.unknown_id:
                        ids.append(tid)
                        i += length
                        matched = True
                        break
                if not matched:
                    ids.append(self.unknown_id)
                    i += 1
        return ids

    def decode(self, token_ids: Sequence[int]) -> str:
        """Concatenate surfaces in order; leading spaces are preserved."""
        parts = []
        for tid in token_ids:
            self._check_id(tid)
            parts.append(self.surfaces[tid])
        return "".join(parts)


def train_tokenizer(
    corpus_texts: Iterable[str], vocab_size: int = 8192, scheme: str = SCHEME_BPE
) -> Vocabulary:
    """Learn a Vocabulary from a stream of texts.

    The whitespace scheme ignores vocab_size and enumerates chunk types.
    The bpe scheme requires vocab_size >= 260 and may stop short of the
    target when no mergeable pairs remain.
    """
    if scheme not in SCHEMES:
        raise TokenizerError(f"unknown scheme {scheme!r}")
    chunk_freqs: Counter[str] = Counter()
    saw_text = False
    for text in corpus_texts:
        saw_text = True
        chunk_freqs.update(split_chunks(text))
    if not saw_text or not chunk_freqs:
        raise TokenizerError("training corpus is empty")

    if scheme == SCHEME_WHITESPACE:
        surfaces = [UNKNOWN_SURFACE]
        surfaces.extend(
            s for s in sorted(chunk_freqs) if s != UNKNOWN_SURFACE
        )
        return Vocabulary(scheme=scheme, surfaces=surfaces)

    if vocab_size < BPE_MIN_VOCAB:
        raise TokenizerError(
            f"bpe vocab_size must be >= {BPE_MIN_VOCAB}, got {vocab_size}"
        )
    alphabet = {chr(cp) for cp in range(256)}
    for chunk in chunk_freqs:
        alphabet.update(chunk)
    alphabet.discard(UNKNOWN_SURFACE)
    surfaces = [UNKNOWN_SURFACE] + sorted(alphabet)
    merged = _learn_bpe_merges(chunk_freqs, vocab_size - len(surfaces), set(surfaces))
    surfaces.extend(merged)
    return Vocabulary(scheme=scheme, surfaces=surfaces)


def _learn_bpe_merges(
    chunk_freqs: Counter[str], budget: int, existing: set[str]
) -> list[str]:
    """Greedy pair merging over chunk types; returns new surfaces in merge order.

    Ties on pair frequency break lexicographically, making training a pure
    function of the chunk frequency table.
    """
    if budget <= 0:
        return []
    words: list[list[str]] = []
    freqs: list[int] = []
    for chunk, freq in sorted(chunk_freqs.items()):
        if len(chunk) < 2:
            continue
        words.append([c for c in chunk if c != UNKNOWN_SURFACE])
        freqs.append(freq)

    pair_counts: Counter[tuple[str, str]] = Counter()
    pair_words: dict[tuple[str, str], set[int]] = {}
    for w, (symbols, freq) in enumerate(zip(words, freqs)):
        for pair in zip(symbols, symbols[1:]):
            pair_counts[pair] += freq
            pair_words.setdefault(pair, set()).add(w)

    new_surfaces: list[str] = []
    while len(new_surfaces) < budget and pair_counts:
        best = min(pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        merged_surface = best[0] + best[1]
        if merged_surface not in existing:
            existing.add(merged_surface)
            new_surfaces.append(merged_surface)
        affected = sorted(pair_words.get(best, ()))
        for w in affected:
            symbols = words[w]
            freq = freqs[w]
            for pair in zip(symbols, symbols[1:]):
                pair_counts[pair] -= freq
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
                links = pair_words.get(pair)
                if links is not None:
                    links.discard(w)
                    if not links:
                        del pair_words[pair]
            symbols = _apply_merge(symbols, best, merged_surface)
            words[w] = symbols
            for pair in zip(symbols, symbols[1:]):
                pair_counts[pair] += freq
                pair_words.setdefault(pair, set()).add(w)
    return new_surfaces


def _apply_merge(symbols: list[str], pair: tuple[str, str], joined: str) -> list[str]:
    out: list[str] = []
    i = 0
    n = len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(joined)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def _escape(surface: str) -> str:
    return (
        surface.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")
    )


def _unescape(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        c = raw[i]
        if c == "\\" and i + 1 < len(raw):
            nxt = raw[i + 1]
            if nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            elif nxt == "\\":
                out.append("\\")
            else:
                raise TokenizerError(f"bad escape sequence \\{nxt!r}")
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def save_vocabulary(vocab: Vocabulary, path: str) -> None:
    """Write the line-oriented vocabulary file (header + id<TAB>surface)."""
    lines = [f"scheme={vocab.scheme} size={vocab.size}"]
    for i, surface in enumerate(vocab.surfaces):
        lines.append(f"{i}\t{_escape(surface)}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def load_vocabulary(path: str) -> Vocabulary:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        content = fh.read()
    lines = content.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TokenizerError(f"{path}: empty vocabulary file")
    header = re.fullmatch(r"scheme=(\w+) size=(\d+)", lines[0])
    if header is None:
        raise TokenizerError(f"{path}: bad header line {lines[0]!r}")
    scheme, size = header.group(1), int(header.group(2))
    surfaces: list[str] = []
    for lineno, line in enumerate(lines[1:], start=2):
        tid_raw, sep, raw_surface = line.partition("\t")
        if not sep:
            raise TokenizerError(f"{path}:{lineno}: missing tab separator")
        if int(tid_raw) != len(surfaces):
            raise TokenizerError(f"{path}:{lineno}: ids must be dense and ordered")
        surfaces.append(_unescape(raw_surface))
    if len(surfaces) != size:
        raise TokenizerError(
            f"{path}: header declares {size} entries, found {len(surfaces)}"
        )
    return Vocabulary(scheme=scheme, surfaces=surfaces)
