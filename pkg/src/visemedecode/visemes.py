"""Viseme classes and the phoneme-to-viseme mapping.

Fourteen viseme classes are used: six consonant classes, seven vowel
classes and one silent class, following Lee and Yook's grouping of the
39 ARPABET phonemes of the CMU Pronouncing Dictionary.  Phoneme symbols
are uppercase and carry no lexical stress digits; viseme symbols are
lowercase.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownPhonemeError, UnknownVisemeError

CONSONANT = "consonant"
VOWEL = "vowel"
SILENT = "silent"

SILENCE = "s"


@dataclass(frozen=True)
class Viseme:
    symbol: str
    kind: str


VISEMES: dict[str, Viseme] = {
    symbol: Viseme(symbol, kind)
    for symbol, kind in [
        ("p", CONSONANT),
        ("t", CONSONANT),
        ("k", CONSONANT),
        ("ch", CONSONANT),
        ("f", CONSONANT),
        ("w", CONSONANT),
        ("iy", VOWEL),
        ("ey", VOWEL),
        ("aa", VOWEL),
        ("ah", VOWEL),
        ("ao", VOWEL),
        ("uh", VOWEL),
        ("er", VOWEL),
        (SILENCE, SILENT),
    ]
}

# The 39 stress-stripped ARPABET phoneme symbols of the CMU dictionary.
PHONEMES: frozenset[str] = frozenset(
    "AA AE AH AO AW AY B CH D DH EH ER EY F G HH IH IY JH K L M N NG "
    "OW OY P R S SH T TH UH UW V W Y Z ZH".split()
)

# Default grouping.  The published table lists AH under both the "aa" and
# the "ah" class; here AH keeps its dedicated class so the mapping stays
# single-valued, and "aa" takes the remaining open vowels.
_DEFAULT_GROUPS: dict[str, str] = {
    "p": "B P M",
    "t": "D T S Z TH DH",
    "k": "G K N NG L Y HH",
    "ch": "JH CH SH ZH",
    "f": "F V",
    "w": "R W",
    "iy": "IY IH",
    "ey": "EH EY AE",
    "aa": "AA AW AY",
    "ah": "AH",
    "ao": "AO OY OW",
    "uh": "UH UW",
    "er": "ER",
}

# Variant grouping that reproduces the worked examples published with
# this mapping (e.g. TIME -> t ah p, RIDES -> w ah t t): AY is grouped
# with AH rather than with AA/AW.  Selectable by name; required to match
# the published word-lookup tables verbatim.
_AY_AH_GROUPS: dict[str, str] = dict(_DEFAULT_GROUPS, aa="AA AW", ah="AH AY")


def _invert(groups: dict[str, str]) -> dict[str, str]:
    table: dict[str, str] = {}
    for viseme, phonemes in groups.items():
        for p in phonemes.split():
            table[p] = viseme
    return table


class VisemeMap:
    """Total function from the 39 phonemes to viseme classes."""

    def __init__(self, table: dict[str, str], name: str = "custom"):
        missing = PHONEMES - table.keys()
        if missing:
            raise UnknownPhonemeError(f"map does not cover: {sorted(missing)}")
        for p, v in table.items():
            if p not in PHONEMES:
                raise UnknownPhonemeError(p)
            if v not in VISEMES:
                raise UnknownVisemeError(v)
        self.name = name
        self._table = dict(table)

    def symbol(self, phoneme: str) -> str:
        try:
            return self._table[phoneme]
        except KeyError:
            raise UnknownPhonemeError(phoneme) from None

    def viseme(self, phoneme: str) -> Viseme:
        return VISEMES[self.symbol(phoneme)]

    def word(self, phonemes) -> tuple[str, ...]:
        """Map a pronunciation (sequence of phonemes) to its viseme cluster."""
        return tuple(self.symbol(p) for p in phonemes)

    def items(self):
        return self._table.items()

    def __eq__(self, other):
        return isinstance(other, VisemeMap) and self._table == other._table

    def __repr__(self):
        return f"VisemeMap({self.name!r})"


DEFAULT_MAP = VisemeMap(_invert(_DEFAULT_GROUPS), name="lee-yook")
AY_AH_MAP = VisemeMap(_invert(_AY_AH_GROUPS), name="lee-yook-ay-ah")

BUILTIN_MAPS = {DEFAULT_MAP.name: DEFAULT_MAP, AY_AH_MAP.name: AY_AH_MAP}


def phoneme_to_viseme(phoneme: str, viseme_map: VisemeMap = DEFAULT_MAP) -> Viseme:
    """Return the viseme class containing ``phoneme``; error if unknown."""
    return viseme_map.viseme(phoneme)


def load_viseme_map(text: str, name: str = "custom") -> VisemeMap:
    """Parse an override map: one ``PHONEME<TAB>viseme_class`` pair per line.

    Blank lines and lines starting with ``#`` are skipped.  The result must
    still cover all 39 phonemes.
    """
    table: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UnknownPhonemeError(f"line {line_no}: expected 'PHONEME viseme', got {line!r}")
        phoneme, viseme = parts[0].upper(), parts[1].lower()
        table[phoneme] = viseme
    return VisemeMap(table, name=name)
