"""Viseme-to-word decoding engine.

Converts sequences of visual speech units (visemes) into the most
probable English sentence: a pronouncing-dictionary lexicon maps words
to viseme clusters, an inverse index recovers the homopheme word set of
each cluster, a chunker enumerates every dictionary-consistent
segmentation of an unsegmented stream, and a beam search picks the word
combination with the lowest language-model perplexity.  An evaluation
harness reports CER/WER/VER and sentence accuracy over reference
corpora.
"""

from .chunker import (
    SegmentationLattice,
    SegmentationSet,
    find_possible_chunks,
    find_shortest_prefix,
    segment_lattice,
)
from .decoder import (
    Beam,
    DecodeResult,
    Hypothesis,
    decode_scenario1,
    decode_scenario2,
    extend_and_prune,
)
from .errors import (
    CapExceededError,
    DictionaryParseError,
    EmptyClusterError,
    EmptyInputError,
    NoSegmentationError,
    OutOfVocabularyError,
    RankFileError,
    ScorerProtocolError,
    ScorerTransportError,
    UndefinedRateError,
    UnknownPhonemeError,
    UnknownVisemeError,
    VisemeDecodeError,
)
from .external import ExternalScorer, score_remote
from .lexicon import (
    InverseIndex,
    Lexicon,
    build_inverse_index,
    load_frequency_ranks,
    normalize_sentence,
    parse_pronouncing_dict,
    sentence_to_visemes,
    word_to_clusters,
)
from .metrics import (
    EditCounts,
    MetricsReport,
    SentenceRow,
    aggregate,
    cer,
    edit_counts,
    error_rate,
    sar,
    ver,
    wer,
)
from .scorer import (
    NgramModel,
    NgramScorer,
    ScoredText,
    batch_perplexity,
    perplexity,
    train_ngram,
)
from .visemes import (
    BUILTIN_MAPS,
    DEFAULT_MAP,
    AY_AH_MAP,
    PHONEMES,
    VISEMES,
    Viseme,
    VisemeMap,
    load_viseme_map,
    phoneme_to_viseme,
)

__version__ = "0.1.0"
