"""Score decoded sentences against references: CER, WER, VER and SAR.

Error rates divide the minimal edit count (substitutions + deletions +
insertions) by the reference length; sentence accuracy is exact match.
Corpus figures pool the counts across sentences.

    python demos/04_evaluation.py
"""

from visemedecode import DEFAULT_MAP, aggregate, parse_pronouncing_dict, sar
from visemedecode.cli import data_path
from visemedecode.metrics import SentenceRow, word_counts

with open(data_path("cmudict.dict"), encoding="latin-1") as f:
    lexicon = parse_pronouncing_dict(f.read())

pairs = [
    ("EXCUSE ME", "EXCUSE ME"),
    ("I AM SORRY", "I AM SORRY"),
    ("PRETTY ON THE OUTSIDE", "BREEZY ON THE OUTSIDE"),
    ("STICK TO WHAT YOU'RE GOOD AT", "STILL DO WHAT YOU'RE GOOD AT"),
    ("BUT NOW WE HAVE THESE VIRUSES", "BUT NOW WE HAVE THIS VIRUS"),
]

print("Per-sentence metrics (reference vs hypothesis):\n")
rows = []
for i, (ref, hyp) in enumerate(pairs, start=1):
    row = SentenceRow.evaluate(str(i), ref, hyp, lexicon=lexicon, viseme_map=DEFAULT_MAP)
    rows.append(row)
    w = word_counts(ref, hyp)
    print(f"  {ref!r} -> {hyp!r}")
    print(
        f"    words: S={w.S} D={w.D} I={w.I} N={w.N}"
        f"  WER={w.total / w.N:.3f}  SAR={sar(ref, hyp)}"
    )

report = aggregate(rows)
print("\nPooled corpus metrics (sums of counts, not averaged rates):")
print(f"  CER {100 * report.cer:5.1f}%   WER {100 * report.wer:5.1f}%", end="")
print(f"   VER {100 * report.ver:5.1f}%   SAR {report.sar_percent:5.1f}%")

print("\nVER compares viseme streams, so homopheme substitutions are free:")
print("  PRETTY -> BREEZY keeps the visemes identical, hence low VER while")
print("  WER counts every substituted word.")

print("\nMachine-readable line records (what `viseme-decode eval` emits):")
print(report.to_records())
