"""Edit-distance evaluation: CER, WER, VER and sentence accuracy.

Error rate is (S + D + I) / N over a minimal-cost alignment between the
reference and the hypothesis, with N the reference length; it can exceed
1.0 when the hypothesis inserts enough extra tokens.  Deletions are
reference tokens the hypothesis dropped, insertions are extra hypothesis
tokens.  Among equal-cost alignments the backtrace prefers substitution
over deletion over insertion so the individual S, D, I counts are
deterministic, not only their sum.

Corpus aggregates pool the raw counts across sentences (sum of edits
over sum of reference lengths) rather than averaging per-sentence rates;
sentence accuracy is the percentage of exactly-matching sentences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .errors import UndefinedRateError
from .lexicon import Lexicon, normalize_sentence, sentence_to_visemes
from .visemes import VisemeMap

_SUB, _DEL, _INS = 0, 1, 2


@dataclass(frozen=True)
class EditCounts:
    S: int = 0
    D: int = 0
    I: int = 0
    N: int = 0

    @property
    def total(self) -> int:
        return self.S + self.D + self.I

    def __add__(self, other: "EditCounts") -> "EditCounts":
        return EditCounts(self.S + other.S, self.D + other.D, self.I + other.I, self.N + other.N)


def edit_counts(reference: Sequence, hypothesis: Sequence) -> EditCounts:
    """Minimal unit-cost alignment counts between two token lists."""
    m, n = len(reference), len(hypothesis)
    # dp[i][j] = cost of aligning reference[:i] with hypothesis[:j]
    cost = [[0] * (n + 1) for _ in range(m + 1)]
    op = [[_SUB] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        cost[i][0] = i
        op[i][0] = _DEL
    for j in range(1, n + 1):
        cost[0][j] = j
        op[0][j] = _INS
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            diag = cost[i - 1][j - 1] + (0 if reference[i - 1] == hypothesis[j - 1] else 1)
            dele = cost[i - 1][j] + 1
            ins = cost[i][j - 1] + 1
            # substitution preferred over deletion over insertion on ties
            best, chosen = diag, _SUB
            if dele < best:
                best, chosen = dele, _DEL
            if ins < best:
                best, chosen = ins, _INS
            cost[i][j] = best
            op[i][j] = chosen

    s = d = ins_count = 0
    i, j = m, n
    while i > 0 or j > 0:
        chosen = op[i][j]
        if chosen == _SUB:
            if reference[i - 1] != hypothesis[j - 1]:
                s += 1
            i -= 1
            j -= 1
        elif chosen == _DEL:
            d += 1
            i -= 1
        else:
            ins_count += 1
            j -= 1
    return EditCounts(S=s, D=d, I=ins_count, N=m)


def error_rate(counts: EditCounts) -> float:
    """(S + D + I) / N; undefined for an empty reference."""
    if counts.N == 0:
        raise UndefinedRateError("error rate undefined for empty reference (N = 0)")
    return counts.total / counts.N


def _normalized_text(sentence: str) -> str:
    return " ".join(normalize_sentence(sentence))


def char_counts(reference: str, hypothesis: str, include_spaces: bool = True) -> EditCounts:
    ref, hyp = _normalized_text(reference), _normalized_text(hypothesis)
    if not include_spaces:
        ref, hyp = ref.replace(" ", ""), hyp.replace(" ", "")
    return edit_counts(list(ref), list(hyp))


def word_counts(reference: str, hypothesis: str) -> EditCounts:
    return edit_counts(normalize_sentence(reference), normalize_sentence(hypothesis))


def viseme_counts(
    reference: str, hypothesis: str, lexicon: Lexicon, viseme_map: VisemeMap
) -> EditCounts:
    ref = sentence_to_visemes(reference, lexicon, viseme_map)
    hyp = sentence_to_visemes(hypothesis, lexicon, viseme_map)
    return edit_counts(list(ref), list(hyp))


def cer(reference: str, hypothesis: str, include_spaces: bool = True) -> float:
    return error_rate(char_counts(reference, hypothesis, include_spaces))


def wer(reference: str, hypothesis: str) -> float:
    return error_rate(word_counts(reference, hypothesis))


def ver(reference: str, hypothesis: str, lexicon: Lexicon, viseme_map: VisemeMap) -> float:
    return error_rate(viseme_counts(reference, hypothesis, lexicon, viseme_map))


def sar(reference: str, hypothesis: str) -> int:
    """1 iff the token-normalized sentences are identical, else 0."""
    return int(normalize_sentence(reference) == normalize_sentence(hypothesis))


@dataclass
class SentenceRow:
    """Per-sentence evaluation record."""

    id: str
    reference: str
    hypothesis: str
    chars: EditCounts
    words: EditCounts
    visemes: EditCounts | None = None
    sar: int = 0
    reference_perplexity: float | None = None
    hypothesis_perplexity: float | None = None
    error: str | None = None

    @classmethod
    def evaluate(
        cls,
        id: str,
        reference: str,
        hypothesis: str,
        lexicon: Lexicon | None = None,
        viseme_map: VisemeMap | None = None,
        include_spaces: bool = True,
        reference_perplexity: float | None = None,
        hypothesis_perplexity: float | None = None,
    ) -> "SentenceRow":
        visemes = None
        if lexicon is not None and viseme_map is not None:
            visemes = viseme_counts(reference, hypothesis, lexicon, viseme_map)
        return cls(
            id=id,
            reference=reference,
            hypothesis=hypothesis,
            chars=char_counts(reference, hypothesis, include_spaces),
            words=word_counts(reference, hypothesis),
            visemes=visemes,
            sar=sar(reference, hypothesis),
            reference_perplexity=reference_perplexity,
            hypothesis_perplexity=hypothesis_perplexity,
        )


@dataclass
class MetricsReport:
    """Rows plus pooled corpus-level error rates and mean sentence accuracy."""

    rows: list[SentenceRow]
    skipped: list[SentenceRow] = field(default_factory=list)

    def pooled(self, kind: str) -> EditCounts:
        total = EditCounts()
        for row in self.rows:
            counts = getattr(row, kind)
            if counts is not None:
                total = total + counts
        return total

    @property
    def cer(self) -> float:
        return error_rate(self.pooled("chars"))

    @property
    def wer(self) -> float:
        return error_rate(self.pooled("words"))

    @property
    def ver(self) -> float | None:
        pooled = self.pooled("visemes")
        return error_rate(pooled) if pooled.N else None

    @property
    def sar_percent(self) -> float:
        return 100.0 * sum(r.sar for r in self.rows) / len(self.rows)

    def aggregate_record(self) -> dict:
        record = {
            "type": "aggregate",
            "sentences": len(self.rows),
            "skipped": len(self.skipped),
            "cer_percent": round(100.0 * self.cer, 4),
            "wer_percent": round(100.0 * self.wer, 4),
            "sar_percent": round(self.sar_percent, 4),
        }
        v = self.ver
        if v is not None:
            record["ver_percent"] = round(100.0 * v, 4)
        return record

    def to_records(self) -> str:
        """One JSON object per row plus one aggregate object, newline-delimited."""
        lines = []
        for row in self.rows + self.skipped:
            record = {
                "type": "sentence",
                "id": row.id,
                "reference": row.reference,
                "hypothesis": row.hypothesis,
            }
            if row.error is not None:
                record["error"] = row.error
            else:
                record.update(
                    cer=round(error_rate(row.chars), 6) if row.chars.N else None,
                    wer=round(error_rate(row.words), 6) if row.words.N else None,
                    sar=row.sar,
                )
                if row.visemes is not None and row.visemes.N:
                    record["ver"] = round(error_rate(row.visemes), 6)
                if row.reference_perplexity is not None:
                    record["reference_perplexity"] = round(row.reference_perplexity, 4)
                if row.hypothesis_perplexity is not None:
                    record["hypothesis_perplexity"] = round(row.hypothesis_perplexity, 4)
            lines.append(json.dumps(record, sort_keys=True))
        lines.append(json.dumps(self.aggregate_record(), sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        """Aligned text table: per-sentence rows and the corpus aggregate."""
        header = ["id", "SAR", "CER%", "WER%", "PP(ref)", "PP(hyp)", "reference -> hypothesis"]
        body = []
        for row in self.rows:
            body.append(
                [
                    row.id,
                    str(row.sar),
                    f"{100.0 * error_rate(row.chars):.1f}" if row.chars.N else "-",
                    f"{100.0 * error_rate(row.words):.1f}" if row.words.N else "-",
                    f"{row.reference_perplexity:.1f}" if row.reference_perplexity is not None else "-",
                    f"{row.hypothesis_perplexity:.1f}" if row.hypothesis_perplexity is not None else "-",
                    f"{row.reference} -> {row.hypothesis}",
                ]
            )
        for row in self.skipped:
            body.append([row.id, "-", "-", "-", "-", "-", f"{row.reference} !! {row.error}"])
        widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
        lines = [
            "  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
            for r in [header] + body
        ]
        agg = self.aggregate_record()
        summary = (
            f"sentences={agg['sentences']} skipped={agg['skipped']} "
            f"CER={agg['cer_percent']:.1f}% WER={agg['wer_percent']:.1f}% "
        )
        if "ver_percent" in agg:
            summary += f"VER={agg['ver_percent']:.1f}% "
        summary += f"SAR={agg['sar_percent']:.1f}%"
        lines.append(summary)
        return "\n".join(lines) + "\n"


def aggregate(rows: Sequence[SentenceRow], skipped: Sequence[SentenceRow] = ()) -> MetricsReport:
    """Pool per-sentence rows into a corpus report."""
    rows = list(rows)
    if not rows:
        raise UndefinedRateError("cannot aggregate zero evaluated sentences")
    return MetricsReport(rows=rows, skipped=list(skipped))
