"""Sentence perplexity scoring.

Perplexity follows the exponentiated per-word entropy convention

    PP = P(w_1, ..., w_N) ** (-1/N) = exp(-ln P(w_1, ..., w_N) / N)

where N is the number of words scored; begin-of-sentence context is
implicit and no end-of-sentence factor enters PP.  All arithmetic is in
the natural-log domain; perplexity is materialized only at the boundary.

The built-in backend is an add-k smoothed n-gram model (default
trigram, k = 0.01) over a closed vocabulary plus an unknown-word class,
so the whole pipeline runs deterministically offline.  A neural model
can be plugged in behind the same contract via
:class:`visemedecode.external.ExternalScorer`.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence

from .errors import EmptyInputError
from .lexicon import normalize_sentence

BEGIN = "<s>"
END = "</s>"
UNK = "<unk>"

_SENTENCE_BREAK = re.compile(r"[.!?\n]+")


class SentenceScorer(Protocol):
    """What the decoder needs from any scoring backend."""

    def perplexity(self, words: Sequence[str]) -> float: ...

    def batch_perplexity(self, sentences: Sequence[Sequence[str]]) -> list[float]: ...


@dataclass(frozen=True)
class ScoredText:
    """A word sequence with its joint log probability, entropy and PP."""

    words: tuple[str, ...]
    log_prob: float
    entropy: float
    perplexity: float

    @classmethod
    def from_log_prob(cls, words, log_prob: float) -> "ScoredText":
        words = tuple(words)
        if not words:
            raise EmptyInputError("cannot score an empty word sequence")
        entropy = -log_prob / len(words)
        return cls(words=words, log_prob=log_prob, entropy=entropy, perplexity=math.exp(entropy))


def corpus_sentences(text: str) -> list[list[str]]:
    """Split corpus text into normalized word lists, one per sentence."""
    out = []
    for chunk in _SENTENCE_BREAK.split(text):
        words = normalize_sentence(chunk)
        if words:
            out.append(words)
    return out


class NgramModel:
    """Order-N Markov model with add-k smoothing over vocab + UNK.

    Sentences are padded with N-1 begin markers and one end marker during
    training; the end marker is part of the vocabulary (it is a predictable
    token) but the begin marker is not.
    """

    def __init__(self, order: int, k: float, counts, context_totals, vocab):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if k <= 0:
            raise ValueError(f"smoothing constant must be > 0, got {k}")
        self.order = order
        self.k = k
        self.counts: dict[tuple[str, ...], Counter] = counts
        self.context_totals: dict[tuple[str, ...], int] = context_totals
        self.vocab: set[str] = vocab

    @classmethod
    def train(cls, corpus: str, order: int = 3, k: float = 0.01) -> "NgramModel":
        sentences = corpus_sentences(corpus)
        if not sentences:
            raise EmptyInputError("training corpus contains no sentences")
        counts: dict[tuple[str, ...], Counter] = {}
        context_totals: dict[tuple[str, ...], int] = {}
        vocab: set[str] = {END}
        for words in sentences:
            vocab.update(words)
            padded = [BEGIN] * (order - 1) + words + [END]
            for i in range(order - 1, len(padded)):
                context = tuple(padded[i - order + 1 : i])
                counts.setdefault(context, Counter())[padded[i]] += 1
                context_totals[context] = context_totals.get(context, 0) + 1
        return cls(order=order, k=k, counts=counts, context_totals=context_totals, vocab=vocab)

    def _classes(self) -> int:
        # predictable outcomes: vocabulary (END included) plus UNK
        return len(self.vocab) + 1

    def _as_known(self, word: str) -> str:
        return word if word in self.vocab else UNK

    def prob(self, word: str, context: Sequence[str]) -> float:
        """Add-k probability of ``word`` after ``context`` (order-1 tokens)."""
        context = tuple(self._as_known(w) if w != BEGIN else w for w in context)
        word = self._as_known(word)
        ctx_count = self.context_totals.get(context, 0)
        word_count = self.counts.get(context, {}).get(word, 0)
        return (word_count + self.k) / (ctx_count + self.k * self._classes())

    def context_before(self, words: Sequence[str], i: int) -> tuple[str, ...]:
        padded = [BEGIN] * (self.order - 1) + list(words[:i])
        return tuple(padded[len(padded) - (self.order - 1) :])

    def log_prob(self, words: Sequence[str]) -> float:
        """ln P(w_1, ..., w_N); left-to-right accumulation."""
        total = 0.0
        for i, w in enumerate(words):
            total += math.log(self.prob(w, self.context_before(words, i)))
        return total

    # -- persistence -------------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "format": "viseme-ngram-model",
            "version": 1,
            "order": self.order,
            "k": self.k,
            "vocab": sorted(self.vocab),
            "counts": {
                " ".join(ctx): dict(sorted(counter.items()))
                for ctx, counter in self.counts.items()
            },
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_payload(), f, sort_keys=True, separators=(",", ":"))

    @classmethod
    def load(cls, path) -> "NgramModel":
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
        if payload.get("format") != "viseme-ngram-model":
            raise ValueError(f"{path}: not a serialized n-gram model")
        counts = {
            tuple(ctx.split(" ")) if ctx else (): Counter(words)
            for ctx, words in payload["counts"].items()
        }
        context_totals = {ctx: sum(counter.values()) for ctx, counter in counts.items()}
        return cls(
            order=payload["order"],
            k=payload["k"],
            counts=counts,
            context_totals=context_totals,
            vocab=set(payload["vocab"]),
        )


def train_ngram(corpus: str, order: int = 3, k: float = 0.01) -> NgramModel:
    """Train the built-in add-k n-gram model on raw corpus text."""
    return NgramModel.train(corpus, order=order, k=k)


class NgramScorer:
    """Perplexity backend over a trained :class:`NgramModel`.

    Prefix log probabilities are cached so that beam-search rescans of a
    growing sentence stay cheap; the cached accumulation is term-for-term
    identical to a full left-to-right rescan.
    """

    def __init__(self, model: NgramModel, cache_size: int = 200_000):
        self.model = model

        @lru_cache(maxsize=cache_size)
        def prefix_log_prob(words: tuple[str, ...]) -> float:
            if not words:
                return 0.0
            head, last = words[:-1], words[-1]
            context = self.model.context_before(words, len(words) - 1)
            return prefix_log_prob(head) + math.log(self.model.prob(last, context))

        self._prefix_log_prob = prefix_log_prob

    def score(self, words: Sequence[str]) -> ScoredText:
        words = tuple(words)
        if not words:
            raise EmptyInputError("cannot score an empty word sequence")
        return ScoredText.from_log_prob(words, self._prefix_log_prob(words))

    def perplexity(self, words: Sequence[str]) -> float:
        return self.score(words).perplexity

    def batch_perplexity(self, sentences: Sequence[Sequence[str]]) -> list[float]:
        if not sentences:
            raise EmptyInputError("batch contains no sentences")
        return [self.perplexity(words) for words in sentences]


def perplexity(scorer: SentenceScorer, words: Sequence[str]) -> float:
    """PP of one word sequence under any backend."""
    if not words:
        raise EmptyInputError("cannot score an empty word sequence")
    return scorer.perplexity(words)


def batch_perplexity(scorer: SentenceScorer, sentences: Sequence[Sequence[str]]) -> list[float]:
    """Element-wise perplexities, order preserved, atomic on failure."""
    if not sentences:
        raise EmptyInputError("batch contains no sentences")
    for words in sentences:
        if not words:
            raise EmptyInputError("batch contains an empty word sequence")
    return list(scorer.batch_perplexity(sentences))
