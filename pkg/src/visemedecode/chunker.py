"""Segmentation of viseme streams into dictionary-backed clusters.

A stream with unknown word boundaries is split every way such that each
piece (cluster) is a key of the inverse index, i.e. maps to at least one
dictionary word.  Two equivalent engines are provided: the literal
recursive procedure (probing ever longer prefixes and recursing on the
remainder) and a memoized lattice over cut positions, which shares common
prefixes and is the default.

The silent viseme ``s`` never occurs inside a word, so it acts as an
unbreakable boundary: each maximal silence-free sub-sequence is segmented
independently and silences are dropped from the output clusters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import CapExceededError, UnknownVisemeError
from .visemes import SILENCE, VISEMES

Cluster = tuple[str, ...]
Segmentation = tuple[Cluster, ...]

DEFAULT_MAX_SEGMENTATIONS = 10_000
DEFAULT_MAX_SEQUENCE_LENGTH = 128


def _canonical_key(segmentation: Segmentation):
    return (len(segmentation), tuple(len(c) for c in segmentation), segmentation)


@dataclass(frozen=True)
class SegmentationSet:
    """Deduplicated segmentations in canonical order (fewest clusters first,
    then lexicographically by cluster lengths)."""

    segmentations: tuple[Segmentation, ...]

    def __iter__(self):
        return iter(self.segmentations)

    def __len__(self):
        return len(self.segmentations)

    def __contains__(self, segmentation):
        return tuple(tuple(c) for c in segmentation) in self.segmentations

    @classmethod
    def from_iterable(cls, segmentations) -> "SegmentationSet":
        unique = {tuple(tuple(c) for c in s) for s in segmentations}
        return cls(tuple(sorted(unique, key=_canonical_key)))


def _check_symbols(seq) -> tuple[str, ...]:
    seq = tuple(seq)
    for v in seq:
        if v not in VISEMES:
            raise UnknownVisemeError(v)
    return seq


def _silence_free_parts(seq: tuple[str, ...]) -> list[tuple[str, ...]]:
    parts = []
    for is_sil, run in itertools.groupby(seq, key=lambda v: v == SILENCE):
        if not is_sil:
            parts.append(tuple(run))
    return parts


def find_shortest_prefix(seq, min_length: int, keys) -> int:
    """Length of the shortest index-key prefix of ``seq`` longer than
    ``min_length``; 0 when no prefix up to the full length is a key."""
    visemes = tuple(seq)
    if min_length >= len(visemes):
        return 0
    buffer = visemes[0 : min_length + 1]
    while buffer not in keys:
        if len(buffer) < len(visemes):
            buffer = visemes[0 : len(buffer) + 1]
        else:
            return 0
    return len(buffer)


def _chunks_recursive(visemes: list, keys, current: list) -> list:
    # Literal transcription of the published recursion: successive viable
    # prefixes are probed in strictly increasing length; a prefix covering
    # the whole remainder closes the branch.
    successes: list = []
    n = 0
    while n < len(visemes):
        n = find_shortest_prefix(visemes, n, keys)
        if n == 0:
            break
        if n == len(visemes):
            return successes + [current + [tuple(visemes[0:n])]]
        successes += _chunks_recursive(visemes[n:], keys, current + [tuple(visemes[:n])])
    return successes


class SegmentationLattice:
    """Prefix-shared DAG over cut positions of a (de-silenced) stream.

    Nodes are cut positions; an edge ``start -> end`` exists when
    ``seq[start:end]`` is an index key and does not cross a silence
    boundary.  Only nodes on some source-to-sink path are kept, so every
    partial path can be completed.
    """

    def __init__(self, seq, keys, max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH):
        source = _check_symbols(seq)
        parts = _silence_free_parts(source)
        self.sequence: tuple[str, ...] = tuple(v for p in parts for v in p)
        n = len(self.sequence)
        if n > max_sequence_length:
            raise CapExceededError(
                f"viseme sequence length {n} exceeds cap {max_sequence_length}",
                limit=max_sequence_length,
                actual=n,
            )

        # End of the silence-free part containing each position: edges may
        # not extend past it.
        part_end = {}
        offset = 0
        for part in parts:
            for i in range(len(part)):
                part_end[offset + i] = offset + len(part)
            offset += len(part)

        max_len = getattr(keys, "max_key_len", None) or n
        edges: dict[int, list[int]] = {}
        for start in range(n):
            limit = min(part_end[start], start + max_len)
            ends = [
                end
                for end in range(start + 1, limit + 1)
                if self.sequence[start:end] in keys
            ]
            if ends:
                edges[start] = ends

        # keep only nodes that lie on a full source-to-sink path
        forward = {0}
        for start in range(n):
            if start in forward:
                forward.update(edges.get(start, ()))
        backward = {n}
        for start in range(n - 1, -1, -1):
            if any(end in backward for end in edges.get(start, ())):
                backward.add(start)
        alive = forward & backward
        if n == 0 or 0 not in alive or n not in alive:
            self.edges: dict[int, tuple[int, ...]] = {}
            self.nodes: tuple[int, ...] = ()
        else:
            self.edges = {
                start: tuple(end for end in ends if end in alive)
                for start, ends in edges.items()
                if start in alive and any(end in alive for end in ends)
            }
            self.nodes = tuple(sorted(alive))

        self._path_count: int | None = None

    @property
    def sink(self) -> int:
        return len(self.sequence)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def is_empty(self) -> bool:
        return not self.nodes

    @property
    def path_count(self) -> int:
        if self._path_count is None:
            counts = {self.sink: 1} if self.nodes else {}
            for start in sorted(self.edges, reverse=True):
                counts[start] = sum(counts[end] for end in self.edges[start])
            self._path_count = counts.get(0, 0)
        return self._path_count

    def cluster(self, start: int, end: int) -> Cluster:
        return self.sequence[start:end]

    def continuations(self, position: int) -> list[tuple[Cluster, int]]:
        """Distinct next clusters from ``position`` with their end nodes."""
        return [(self.cluster(position, end), end) for end in self.edges.get(position, ())]

    def segmentations(self, max_segmentations: int | None = None) -> list[Segmentation]:
        if self.is_empty():
            return []
        if max_segmentations is not None and self.path_count > max_segmentations:
            raise CapExceededError(
                f"{self.path_count} segmentations exceed cap {max_segmentations}",
                limit=max_segmentations,
                actual=self.path_count,
            )
        out: list[Segmentation] = []
        stack: list[tuple[int, tuple[Cluster, ...]]] = [(0, ())]
        while stack:
            position, prefix = stack.pop()
            if position == self.sink:
                out.append(prefix)
                continue
            for end in self.edges.get(position, ()):
                stack.append((end, prefix + (self.cluster(position, end),)))
        return out


def segment_lattice(
    seq,
    keys,
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH,
) -> SegmentationLattice:
    """Build the segmentation lattice; empty lattice when nothing segments."""
    return SegmentationLattice(seq, keys, max_sequence_length=max_sequence_length)


def find_possible_chunks(
    seq,
    keys,
    max_segmentations: int = DEFAULT_MAX_SEGMENTATIONS,
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH,
    literal_recursion: bool = False,
) -> SegmentationSet:
    """Every segmentation of ``seq`` whose clusters are all index keys.

    ``literal_recursion`` switches from the memoized lattice to the
    step-for-step recursive procedure for differential testing; the two
    produce the same set.  Exceeding ``max_segmentations`` raises
    :class:`CapExceededError` rather than truncating.
    """
    source = _check_symbols(seq)
    parts = _silence_free_parts(source)
    if not parts:
        return SegmentationSet(())

    if literal_recursion:
        total_len = sum(len(p) for p in parts)
        if total_len > max_sequence_length:
            raise CapExceededError(
                f"viseme sequence length {total_len} exceeds cap {max_sequence_length}",
                limit=max_sequence_length,
                actual=total_len,
            )
        per_part = [
            [tuple(seg) for seg in _chunks_recursive(list(part), keys, [])]
            for part in parts
        ]
        total = 1
        for segs in per_part:
            total *= len(segs)
        if total > max_segmentations:
            raise CapExceededError(
                f"{total} segmentations exceed cap {max_segmentations}",
                limit=max_segmentations,
                actual=total,
            )
        combined = [
            tuple(c for seg in combo for c in seg)
            for combo in itertools.product(*per_part)
        ]
        return SegmentationSet.from_iterable(combined)

    lattice = segment_lattice(source, keys, max_sequence_length=max_sequence_length)
    return SegmentationSet.from_iterable(lattice.segmentations(max_segmentations))
