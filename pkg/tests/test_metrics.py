import json
import random
from functools import lru_cache

import pytest

from visemedecode import (
    DEFAULT_MAP,
    EditCounts,
    UndefinedRateError,
    aggregate,
    cer,
    edit_counts,
    error_rate,
    parse_pronouncing_dict,
    sar,
    ver,
    wer,
)
from visemedecode.metrics import SentenceRow, char_counts, word_counts


def naive_edit_distance(reference, hypothesis):
    """Independent oracle: plain recursive minimal edit count (memoized)."""
    reference, hypothesis = tuple(reference), tuple(hypothesis)

    @lru_cache(maxsize=None)
    def rec(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        sub = rec(i - 1, j - 1) + (0 if reference[i - 1] == hypothesis[j - 1] else 1)
        return min(sub, rec(i - 1, j) + 1, rec(i, j - 1) + 1)

    return rec(len(reference), len(hypothesis))


def test_identity():
    counts = edit_counts(list("abc"), list("abc"))
    assert (counts.S, counts.D, counts.I, counts.N) == (0, 0, 0, 3)


def test_kitten_sitting():
    counts = edit_counts(list("kitten"), list("sitting"))
    assert counts.total == 3
    assert counts.N == 6


def test_published_word_pair():
    ref = "STICK TO WHAT YOU'RE GOOD AT".split()
    hyp = "STILL DO WHAT YOU'RE GOOD AT".split()
    counts = edit_counts(ref, hyp)
    assert (counts.S, counts.D, counts.I, counts.N) == (2, 0, 0, 6)
    assert error_rate(counts) == pytest.approx(2 / 6)


def test_empty_cases():
    assert edit_counts([], []) == EditCounts(0, 0, 0, 0)
    only_deletions = edit_counts(list("abcd"), [])
    assert (only_deletions.S, only_deletions.D, only_deletions.I) == (0, 4, 0)
    assert error_rate(only_deletions) == 1.0
    only_insertions = edit_counts([], list("ab"))
    assert (only_insertions.S, only_insertions.D, only_insertions.I) == (0, 0, 2)
    with pytest.raises(UndefinedRateError):
        error_rate(only_insertions)


def test_oracle_equivalence_random_pairs():
    rng = random.Random(2024)
    for _ in range(300):
        ref = [rng.choice("abcd") for _ in range(rng.randint(0, 8))]
        hyp = [rng.choice("abcd") for _ in range(rng.randint(0, 8))]
        counts = edit_counts(ref, hyp)
        assert counts.total == naive_edit_distance(ref, hyp)
        assert counts.S + counts.D <= counts.N
        # the total is symmetric; only the sum is mathematically determined,
        # the S/D/I split depends on the fixed tie-break
        flipped = edit_counts(hyp, ref)
        assert flipped.total == counts.total
        repeat = edit_counts(ref, hyp)
        assert (repeat.S, repeat.D, repeat.I) == (counts.S, counts.D, counts.I)


def test_error_rate_can_exceed_one():
    counts = edit_counts(list("a"), list("abcde"))
    assert error_rate(counts) > 1.0


def test_sub_over_del_over_ins_tie_break():
    # "ab" -> "b" admits {del a} and no equal-cost substitution path;
    # "a" -> "b" must be a substitution, not del+ins
    counts = edit_counts(list("a"), list("b"))
    assert (counts.S, counts.D, counts.I) == (1, 0, 0)
    counts = edit_counts(list("ab"), list("ba"))
    assert (counts.S, counts.D, counts.I) == (2, 0, 0)


def test_cer_includes_spaces_and_case():
    assert cer("AB CD", "ab cd") == 0.0
    assert cer("AB CD", "ABCD") == pytest.approx(1 / 5)
    assert cer("AB CD", "ABCD", include_spaces=False) == 0.0
    assert char_counts("A B", "A B").N == 3


def test_wer_and_sar():
    assert wer("EXCUSE ME", "EXCUSE ME") == 0.0
    assert sar("EXCUSE ME", "EXCUSE ME") == 1
    assert sar("PRETTY ON THE OUTSIDE", "BREEZY ON THE OUTSIDE") == 0
    assert sar("", "") == 1
    assert sar("A.", "a") == 1  # token-normalized comparison


def test_ver_over_viseme_tokens():
    lexicon = parse_pronouncing_dict("ME  M IY1\nBE  B IY1\nTO  T UW1\n")
    assert ver("ME", "BE", lexicon, DEFAULT_MAP) == 0.0  # homophemes share visemes
    assert ver("ME", "TO", lexicon, DEFAULT_MAP) == 1.0


def test_sar_implies_zero_rates():
    rng = random.Random(5)
    vocab = ["AA", "BB", "CC"]
    for _ in range(100):
        ref = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 5)))
        hyp = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 5)))
        if sar(ref, hyp):
            assert wer(ref, hyp) == 0.0 and cer(ref, hyp) == 0.0
        if cer(ref, hyp) == 0.0:
            assert sar(ref, hyp) == 1


def test_aggregate_pools_counts():
    rows = [
        SentenceRow.evaluate("1", "A B C D", "A B C E"),
        SentenceRow.evaluate("2", "A B C D E F", "A B C D E F"),
    ]
    report = aggregate(rows)
    assert report.wer == pytest.approx(1 / 10)  # pooled, not mean of per-row rates
    assert report.sar_percent == 50.0
    record = report.aggregate_record()
    assert record["sentences"] == 2
    assert record["wer_percent"] == pytest.approx(10.0)


def test_aggregate_perfect_corpus():
    rows = [SentenceRow.evaluate(str(i), "GOOD DAY", "GOOD DAY") for i in range(10)]
    report = aggregate(rows)
    assert report.cer == 0.0 and report.wer == 0.0 and report.sar_percent == 100.0


def test_aggregate_singleton_and_empty():
    row = SentenceRow.evaluate("1", "A B", "A C")
    report = aggregate([row])
    assert report.wer == error_rate(row.words)
    with pytest.raises(UndefinedRateError):
        aggregate([])


def test_records_output_shape():
    rows = [SentenceRow.evaluate("1", "A B", "A B", reference_perplexity=3.0, hypothesis_perplexity=3.0)]
    skipped = [SentenceRow("2", "X Y", "", EditCounts(), EditCounts(), error="boom")]
    text = aggregate(rows, skipped).to_records()
    records = [json.loads(line) for line in text.splitlines()]
    assert [r["type"] for r in records] == ["sentence", "sentence", "aggregate"]
    assert records[1]["error"] == "boom"
    assert records[-1]["sentences"] == 1 and records[-1]["skipped"] == 1


def test_table_output_mentions_aggregate():
    rows = [SentenceRow.evaluate("1", "A B", "A B")]
    table = aggregate(rows).to_table()
    assert "SAR=100.0%" in table
