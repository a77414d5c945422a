"""Beam-search conversion of viseme clusters into the most probable sentence.

Two decoding modes mirror the two boundary scenarios:

* known word boundaries: the cluster sequence is given and every cluster
  is looked up directly (``decode_scenario1``);
* unknown boundaries: a flat viseme stream is first turned into a
  segmentation lattice, and hypotheses advance along lattice edges at
  their own pace (``decode_scenario2``).

Selection rules for known boundaries: a single cluster matching one word
returns that word; a single cluster matching several words returns the
best frequency-ranked one; two or more clusters run the beam, seeded
with every word pair for the first two clusters scored jointly, then
extended one cluster at a time keeping the ``beam_width`` lowest
perplexities.  Each iteration rescores the whole prefix sentence; prefix
caching inside a scorer must not change results.

Hypotheses that already cover the entire stream are kept in the beam
unextended; the search stops when every surviving hypothesis is
complete and the minimum-perplexity one wins.  Ties break by perplexity,
then fewer words, then alphabetical order, so decoding is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .chunker import (
    DEFAULT_MAX_SEGMENTATIONS,
    DEFAULT_MAX_SEQUENCE_LENGTH,
    SegmentationLattice,
    segment_lattice,
)
from .errors import CapExceededError, EmptyClusterError, EmptyInputError, NoSegmentationError
from .lexicon import InverseIndex, Lexicon
from .scorer import SentenceScorer, batch_perplexity

Cluster = tuple[str, ...]


@dataclass(frozen=True)
class Hypothesis:
    """A candidate word sequence with the lattice position it has consumed."""

    words: tuple[str, ...]
    perplexity: float
    cursor: int
    complete: bool

    def order_key(self):
        return (self.perplexity, len(self.words), self.words, self.cursor)


@dataclass(frozen=True)
class Beam:
    """At most ``capacity`` hypotheses, sorted by ascending perplexity."""

    capacity: int
    members: tuple[Hypothesis, ...]

    @classmethod
    def from_candidates(cls, candidates, capacity: int) -> "Beam":
        kept = tuple(sorted(candidates, key=Hypothesis.order_key)[:capacity])
        return cls(capacity=capacity, members=kept)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


@dataclass
class DecodeStats:
    """Search effort counters; ``cap_flags`` records cap diagnostics
    (empty while all configured caps were respected)."""

    clusters_processed: int = 0
    hypotheses_scored: int = 0
    cap_flags: tuple[str, ...] = ()


@dataclass
class DecodeResult:
    sentence: tuple[str, ...]
    perplexity: float
    alternates: tuple[Hypothesis, ...]
    stats: DecodeStats = field(default_factory=DecodeStats)

    @property
    def text(self) -> str:
        return " ".join(self.sentence)


def extend_and_prune(
    beam: Beam,
    continuations: Sequence[tuple[Hypothesis, Sequence[tuple[str, int, bool]]]],
    scorer: SentenceScorer,
    beam_width: int,
    stats: DecodeStats | None = None,
) -> Beam:
    """One beam iteration: score all extensions in a single batch, merge
    with the beam's complete hypotheses, keep the ``beam_width`` best.

    ``continuations`` pairs each hypothesis to extend with its candidate
    ``(word, new_cursor, completes_stream)`` triples.
    """
    if not beam.members:
        raise EmptyInputError("cannot extend an empty beam")
    extended: list[Hypothesis] = []
    sentences: list[tuple[str, ...]] = []
    for hypothesis, options in continuations:
        for word, cursor, complete in options:
            words = hypothesis.words + (word,)
            extended.append(Hypothesis(words, 0.0, cursor, complete))
            sentences.append(words)
    protected = [h for h in beam if h.complete]
    if not sentences:
        return Beam.from_candidates(protected, beam_width)
    scores = batch_perplexity(scorer, sentences)
    if stats is not None:
        stats.hypotheses_scored += len(sentences)
    rescored = [
        Hypothesis(h.words, pp, h.cursor, h.complete) for h, pp in zip(extended, scores)
    ]
    return Beam.from_candidates(protected + rescored, beam_width)


def _score_single(word: str, scorer: SentenceScorer, stats: DecodeStats) -> float:
    stats.hypotheses_scored += 1
    return batch_perplexity(scorer, [(word,)])[0]


def _result_from_beam(beam: Beam, stats: DecodeStats) -> DecodeResult:
    winner = beam.members[0]
    return DecodeResult(
        sentence=winner.words,
        perplexity=winner.perplexity,
        alternates=beam.members[1:],
        stats=stats,
    )


def decode_scenario1(
    clusters: Sequence[Cluster],
    index: InverseIndex,
    scorer: SentenceScorer,
    lexicon: Lexicon | None = None,
    beam_width: int = 50,
) -> DecodeResult:
    """Decode a sequence of viseme clusters with known word boundaries."""
    clusters = [tuple(c) for c in clusters]
    if not clusters:
        raise EmptyInputError("no viseme clusters to decode")
    word_sets = []
    for cluster in clusters:
        words = index.words_for(cluster)
        if not words:
            raise EmptyClusterError(cluster)
        word_sets.append(words)

    stats = DecodeStats(clusters_processed=len(clusters))

    if len(clusters) == 1:
        # one matching word, or the best frequency-ranked of several
        best = word_sets[0][0]
        pp = _score_single(best, scorer, stats)
        return DecodeResult(sentence=(best,), perplexity=pp, alternates=(), stats=stats)

    pairs = [(w1, w2) for w1 in word_sets[0] for w2 in word_sets[1]]
    scores = batch_perplexity(scorer, pairs)
    stats.hypotheses_scored += len(pairs)
    done = len(clusters) == 2
    beam = Beam.from_candidates(
        (Hypothesis(pair, pp, 2, done) for pair, pp in zip(pairs, scores)),
        beam_width,
    )
    for i in range(2, len(clusters)):
        final = i + 1 == len(clusters)
        continuations = [
            (h, [(w, i + 1, final) for w in word_sets[i]]) for h in beam if not h.complete
        ]
        beam = extend_and_prune(beam, continuations, scorer, beam_width, stats)
    return _result_from_beam(beam, stats)


def decode_scenario2(
    seq: Sequence[str],
    index: InverseIndex,
    scorer: SentenceScorer,
    lexicon: Lexicon | None = None,
    beam_width: int = 50,
    max_segmentations: int = DEFAULT_MAX_SEGMENTATIONS,
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH,
    eager_single_word: bool = False,
) -> DecodeResult:
    """Decode a flat viseme stream with unknown word boundaries.

    The stream is turned into a segmentation lattice and the beam runs
    over it.  When the lattice admits exactly one segmentation consisting
    of one cluster, the most frequent matching word is returned outright.
    ``eager_single_word`` widens that shortcut: any whole-stream cluster
    match short-circuits the search even when multi-word segmentations
    exist (the flowchart-literal behavior, for comparison runs).
    """
    seq = tuple(seq)
    if not seq:
        raise EmptyInputError("no visemes to decode")
    lattice = segment_lattice(seq, index, max_sequence_length=max_sequence_length)
    if lattice.is_empty():
        raise NoSegmentationError(f"stream has no dictionary-consistent segmentation: {' '.join(seq)}")
    if max_segmentations is not None and lattice.path_count > max_segmentations:
        raise CapExceededError(
            f"{lattice.path_count} segmentations exceed cap {max_segmentations}",
            limit=max_segmentations,
            actual=lattice.path_count,
        )

    stats = DecodeStats(
        clusters_processed=sum(len(ends) for ends in lattice.edges.values())
    )
    whole = lattice.sequence
    single_shot = lattice.path_count == 1 and lattice.sink in lattice.edges.get(0, ())
    if single_shot or (eager_single_word and whole in index):
        word = index.words_for(whole)[0]
        pp = _score_single(word, scorer, stats)
        return DecodeResult(sentence=(word,), perplexity=pp, alternates=(), stats=stats)

    # Seed: every word combination over the first two lattice edges; a
    # first edge that already spans the stream seeds complete one-word
    # hypotheses instead.
    seeds: list[Hypothesis] = []
    sentences: list[tuple[str, ...]] = []
    for first_cluster, after_first in lattice.continuations(0):
        first_words = index.words_for(first_cluster)
        if after_first == lattice.sink:
            for w in first_words:
                seeds.append(Hypothesis((w,), 0.0, after_first, True))
                sentences.append((w,))
            continue
        for second_cluster, after_second in lattice.continuations(after_first):
            second_words = index.words_for(second_cluster)
            done = after_second == lattice.sink
            for w1 in first_words:
                for w2 in second_words:
                    seeds.append(Hypothesis((w1, w2), 0.0, after_second, done))
                    sentences.append((w1, w2))
    scores = batch_perplexity(scorer, sentences)
    stats.hypotheses_scored += len(sentences)
    beam = Beam.from_candidates(
        (Hypothesis(h.words, pp, h.cursor, h.complete) for h, pp in zip(seeds, scores)),
        beam_width,
    )

    while any(not h.complete for h in beam):
        continuations = []
        for h in beam:
            if h.complete:
                continue
            options = [
                (word, end, end == lattice.sink)
                for cluster, end in lattice.continuations(h.cursor)
                for word in index.words_for(cluster)
            ]
            continuations.append((h, options))
        beam = extend_and_prune(beam, continuations, scorer, beam_width, stats)

    return _result_from_beam(beam, stats)
