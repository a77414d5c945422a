"""Segment an unsegmented viseme stream into dictionary-backed clusters.

With word boundaries unknown, the stream is split every way such that
each piece matches at least one word.  This demo reproduces the worked
"what time is it" example, including the two clusterings published with
the method (which require the map variant that groups AY with AH).

    python demos/02_segmentation.py
"""

from visemedecode import (
    AY_AH_MAP,
    build_inverse_index,
    find_possible_chunks,
    parse_pronouncing_dict,
    segment_lattice,
    sentence_to_visemes,
)
from visemedecode.cli import data_path

with open(data_path("cmudict.dict"), encoding="latin-1") as f:
    lexicon = parse_pronouncing_dict(f.read())
index = build_inverse_index(lexicon, AY_AH_MAP)

stream = sentence_to_visemes("what time is it", lexicon, AY_AH_MAP)
print("stream:", " ".join(stream), "\n")

segmentations = find_possible_chunks(stream, index)
print(f"{len(segmentations)} dictionary-consistent segmentations; the published two:")
for seg in segmentations:
    tag = ""
    if seg == (("w", "ah", "t", "t"), ("ah", "p", "iy", "t"), ("iy", "t")):
        tag = "   <- known-boundary variant A"
    if seg == (("w", "ah", "t", "t"), ("ah", "p", "iy"), ("t", "iy", "t")):
        tag = "   <- variant B (second cluster shortened)"
    print("  " + " | ".join(" ".join(c) for c in seg) + tag)

print("\nWord matches per cluster of variant B:")
for cluster in [("w", "ah", "t", "t"), ("ah", "p", "iy"), ("t", "iy", "t")]:
    words = index.words_for(cluster)
    shown = ", ".join(words[:12]) + (", ..." if len(words) > 12 else "")
    print(f"  ({', '.join(cluster)}): {len(words)} words: {shown}")

print("\nThe memoized lattice shares common prefixes between segmentations:")
lattice = segment_lattice(stream, index)
print(f"  {lattice.node_count} cut positions, {lattice.path_count} paths")
print("  first clusters:", [" ".join(c) for c, _ in lattice.continuations(0)])

print("\nA toy example of the exponential blowup the cap guards against:")
toy_keys = {("p",), ("p", "p"), ("p", "p", "p")}
for n in (6, 9, 12):
    count = segment_lattice(("p",) * n, toy_keys).path_count
    print(f"  {n} identical visemes -> {count} segmentations")
