"""Pronouncing-dictionary lexicon and the viseme-cluster inverse index.

Dictionary file format (the de facto CMU format):

    HEADWORD  PH1 PH2 ...

one entry per line, comment lines starting with ``;;;``, alternate
pronunciations written ``HEADWORD(1)``, ``HEADWORD(2)`` and so on.
Lexical stress digits (``AH0`` -> ``AH``) are stripped on parse and
alternates are merged under the base headword.

Frequency-ranking file format: ``rank<TAB>WORD``, one per line, rank 1
being the most frequent word.

The inverse index maps each viseme cluster (the image of one
pronunciation under a :class:`~visemedecode.visemes.VisemeMap`) to every
word with such a pronunciation.  Matching words are kept ordered by
frequency rank, unranked words after ranked ones, ties broken
alphabetically.
"""

from __future__ import annotations

import gzip
import hashlib
import json
import logging
import re
from dataclasses import dataclass, field

from .errors import DictionaryParseError, OutOfVocabularyError, RankFileError
from .visemes import BUILTIN_MAPS, PHONEMES, VisemeMap

log = logging.getLogger(__name__)

Pronunciation = tuple[str, ...]
Cluster = tuple[str, ...]

_ALTERNATE = re.compile(r"^(?P<head>.+)\((?P<n>\d+)\)$")
_STRESS = re.compile(r"\d+$")
# Uppercase there, keep apostrophes (the dictionary has WHAT'S), drop
# every other punctuation mark.
_NON_WORD = re.compile(r"[^A-Z']+")


@dataclass
class Lexicon:
    """Word -> pronunciations, plus optional frequency ranks."""

    entries: dict[str, list[Pronunciation]] = field(default_factory=dict)
    ranks: dict[str, int] = field(default_factory=dict)
    unmatched_rank_count: int = 0

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def pronunciations(self, word: str) -> list[Pronunciation]:
        try:
            return self.entries[word]
        except KeyError:
            raise OutOfVocabularyError(word) from None

    def rank_key(self, word: str):
        """Sort key: ranked words first (ascending rank), then alphabetical."""
        rank = self.ranks.get(word)
        return (0, rank, word) if rank is not None else (1, 0, word)


def parse_pronouncing_dict(text: str) -> Lexicon:
    """Parse dictionary file content into a :class:`Lexicon` (ranks empty)."""
    entries: dict[str, list[Pronunciation]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if line.startswith(";;;"):
            continue
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise DictionaryParseError(f"entry has no phonemes: {line!r}", line_no)
        head = parts[0].upper()
        m = _ALTERNATE.match(head)
        if m:
            head = m.group("head")
        phones = []
        for raw in parts[1:]:
            p = _STRESS.sub("", raw.upper())
            if p not in PHONEMES:
                raise DictionaryParseError(f"unknown phoneme symbol {raw!r}", line_no)
            phones.append(p)
        pron = tuple(phones)
        prons = entries.setdefault(head, [])
        if pron not in prons:  # alternates differing only in stress collapse
            prons.append(pron)
    return Lexicon(entries=entries)


def load_frequency_ranks(text: str, lexicon: Lexicon) -> Lexicon:
    """Attach ``rank<TAB>WORD`` ranks to matching lexicon entries.

    Words absent from the lexicon are skipped; the number skipped is kept
    on ``lexicon.unmatched_rank_count`` and logged once.
    """
    ranks: dict[str, int] = {}
    skipped = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise RankFileError(f"expected 'rank<TAB>word', got {line!r}", line_no)
        try:
            rank = int(parts[0])
        except ValueError:
            raise RankFileError(f"non-integer rank {parts[0]!r}", line_no) from None
        if rank <= 0:
            raise RankFileError(f"rank must be positive, got {rank}", line_no)
        word = parts[1].upper()
        if word in ranks:
            raise RankFileError(f"duplicate rank entry for {word!r}", line_no)
        if word not in lexicon:
            skipped += 1
            continue
        ranks[word] = rank
    if skipped:
        log.warning("frequency ranking: %d words not in the lexicon were ignored", skipped)
    lexicon.ranks = ranks
    lexicon.unmatched_rank_count = skipped
    return lexicon


def word_to_clusters(word: str, lexicon: Lexicon, viseme_map: VisemeMap) -> list[Cluster]:
    """All distinct viseme clusters for ``word``, one per pronunciation."""
    clusters: list[Cluster] = []
    for pron in lexicon.pronunciations(word.upper()):
        cluster = viseme_map.word(pron)
        if cluster not in clusters:
            clusters.append(cluster)
    return clusters


def normalize_sentence(text: str) -> list[str]:
    """Uppercase tokens with apostrophes kept and other punctuation stripped."""
    cleaned = _NON_WORD.sub(" ", text.upper())
    return [tok for tok in cleaned.split() if tok.strip("'")]


def sentence_to_visemes(
    text: str,
    lexicon: Lexicon,
    viseme_map: VisemeMap,
    keep_boundaries: bool = False,
):
    """Convert a sentence to visemes via each word's first pronunciation.

    With ``keep_boundaries`` the per-word clusters are returned; without,
    their concatenation as one flat tuple.  Unknown words raise
    :class:`OutOfVocabularyError` naming the token.
    """
    clusters: list[Cluster] = []
    for token in normalize_sentence(text):
        prons = lexicon.pronunciations(token)
        clusters.append(viseme_map.word(prons[0]))
    if keep_boundaries:
        return clusters
    return tuple(v for cluster in clusters for v in cluster)


class InverseIndex:
    """Viseme cluster -> ordered tuple of matching words."""

    MAGIC = "viseme-inverse-index"
    VERSION = 1

    def __init__(
        self,
        index: dict[Cluster, tuple[str, ...]],
        lexicon: Lexicon,
        viseme_map: VisemeMap,
        checksums: dict[str, str] | None = None,
    ):
        self._index = index
        self.lexicon = lexicon
        self.viseme_map = viseme_map
        self.checksums = checksums or {}
        self.max_key_len = max((len(k) for k in index), default=0)

    def __contains__(self, cluster) -> bool:
        return tuple(cluster) in self._index

    def __len__(self) -> int:
        return len(self._index)

    def keys(self):
        return self._index.keys()

    def words_for(self, cluster) -> tuple[str, ...]:
        """Matching words, best frequency rank first; empty tuple if none."""
        return self._index.get(tuple(cluster), ())

    # -- serialization ----------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "format": self.MAGIC,
            "version": self.VERSION,
            "checksums": self.checksums,
            "viseme_map": {"name": self.viseme_map.name, "table": dict(self.viseme_map.items())},
            "lexicon": {
                "entries": {w: [" ".join(p) for p in prons] for w, prons in self.lexicon.entries.items()},
                "ranks": self.lexicon.ranks,
            },
            "index": {" ".join(k): list(v) for k, v in self._index.items()},
        }

    def save(self, path) -> None:
        """Write the deterministic gzip-compressed JSON artifact."""
        data = json.dumps(self.to_payload(), sort_keys=True, separators=(",", ":")).encode()
        with open(path, "wb") as f:
            # filename and mtime pinned so identical inputs give
            # byte-identical files
            with gzip.GzipFile(filename="", fileobj=f, mode="wb", mtime=0) as gz:
                gz.write(data)

    @classmethod
    def load(cls, path) -> "InverseIndex":
        with gzip.open(path, "rb") as f:
            payload = json.loads(f.read())
        if payload.get("format") != cls.MAGIC:
            raise DictionaryParseError(f"{path}: not a serialized inverse index")
        if payload.get("version") != cls.VERSION:
            raise DictionaryParseError(
                f"{path}: unsupported index version {payload.get('version')}"
            )
        lexicon = Lexicon(
            entries={
                w: [tuple(p.split()) for p in prons]
                for w, prons in payload["lexicon"]["entries"].items()
            },
            ranks={w: int(r) for w, r in payload["lexicon"]["ranks"].items()},
        )
        vm = payload["viseme_map"]
        viseme_map = VisemeMap(vm["table"], name=vm["name"])
        index = {tuple(k.split()): tuple(words) for k, words in payload["index"].items()}
        return cls(index, lexicon, viseme_map, checksums=payload.get("checksums"))


def build_inverse_index(
    lexicon: Lexicon,
    viseme_map: VisemeMap,
    checksums: dict[str, str] | None = None,
) -> InverseIndex:
    """Index every pronunciation of every word under its viseme cluster."""
    collecting: dict[Cluster, set[str]] = {}
    for word, prons in lexicon.entries.items():
        for pron in prons:
            collecting.setdefault(viseme_map.word(pron), set()).add(word)
    index = {
        cluster: tuple(sorted(words, key=lexicon.rank_key))
        for cluster, words in collecting.items()
    }
    return InverseIndex(index, lexicon, viseme_map, checksums=checksums)


def source_checksums(
    dictionary_text: str,
    ranks_text: str | None = None,
    map_name_or_text: str | None = None,
) -> dict[str, str]:
    """SHA-256 checksums of the build inputs, recorded in the artifact."""

    def sha(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8", "surrogateescape")).hexdigest()

    sums = {"dictionary": sha(dictionary_text)}
    if ranks_text is not None:
        sums["ranks"] = sha(ranks_text)
    if map_name_or_text is not None:
        if map_name_or_text in BUILTIN_MAPS:
            sums["viseme_map"] = f"builtin:{map_name_or_text}"
        else:
            sums["viseme_map"] = sha(map_name_or_text)
    return sums
