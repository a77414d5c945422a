"""Shared fixtures: the full-dictionary indexes (built once per session),
toy index construction, deterministic mock scorers, and a summary hook
that prints one PASS/FAIL line per acceptance criterion."""

import hashlib
import math

import pytest

_acceptance_results = []


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        _acceptance_results.append((name, "PASS" if report.passed else "FAIL"))
    elif report.when == "setup" and (report.failed or report.skipped):
        _acceptance_results.append((name, "SKIP" if report.skipped else "FAIL"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, verdict in _acceptance_results:
        terminalreporter.write_line(f"  {verdict}  {name}")

from visemedecode import (
    DEFAULT_MAP,
    AY_AH_MAP,
    InverseIndex,
    Lexicon,
    NgramModel,
    NgramScorer,
    build_inverse_index,
    load_frequency_ranks,
    parse_pronouncing_dict,
)
from visemedecode.cli import data_path


def read_data(name: str, encoding: str = "utf-8") -> str:
    with open(data_path(name), encoding=encoding) as f:
        return f.read()


@pytest.fixture(scope="session")
def full_lexicon() -> Lexicon:
    lexicon = parse_pronouncing_dict(read_data("cmudict.dict", encoding="latin-1"))
    return load_frequency_ranks(read_data("word_ranks.tsv"), lexicon)


@pytest.fixture(scope="session")
def full_index(full_lexicon) -> InverseIndex:
    return build_inverse_index(full_lexicon, DEFAULT_MAP)


@pytest.fixture(scope="session")
def ay_ah_index(full_lexicon) -> InverseIndex:
    """Index under the variant map that reproduces the published tables."""
    return build_inverse_index(full_lexicon, AY_AH_MAP)


@pytest.fixture(scope="session")
def trained_scorer() -> NgramScorer:
    corpus = read_data("corpus_small.txt") + "\n" + read_data("ouluvs_phrases.txt")
    return NgramScorer(NgramModel.train(corpus))


def make_toy_index(cluster_words: dict) -> InverseIndex:
    """InverseIndex straight from {cluster tuple: (words...)} for toy tests."""
    index = {tuple(k): tuple(v) for k, v in cluster_words.items()}
    return InverseIndex(index, Lexicon(), DEFAULT_MAP)


class TableScorer:
    """Mock backend with explicit sentence -> perplexity assignments."""

    def __init__(self, table: dict, default: float = 1000.0):
        self.table = {tuple(k): v for k, v in table.items()}
        self.default = default

    def perplexity(self, words):
        return self.table.get(tuple(words), self.default)

    def batch_perplexity(self, sentences):
        return [self.perplexity(w) for w in sentences]


class HashScorer:
    """Deterministic pseudo-random perplexities keyed on sentence content."""

    def __init__(self, salt: str = ""):
        self.salt = salt

    def perplexity(self, words):
        digest = hashlib.md5((self.salt + "\x1f".join(words)).encode()).hexdigest()
        return 1.0 + int(digest[:12], 16) / 2**40

    def batch_perplexity(self, sentences):
        return [self.perplexity(w) for w in sentences]


class UniformScorer:
    """Every word has probability 1/V: PP computed per the entropy formula."""

    def __init__(self, vocab_size: int):
        self.vocab_size = vocab_size

    def perplexity(self, words):
        log_prob = sum(math.log(1.0 / self.vocab_size) for _ in words)
        return math.exp(-log_prob / len(words))

    def batch_perplexity(self, sentences):
        return [self.perplexity(w) for w in sentences]
