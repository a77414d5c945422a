"""Build the lexicon, map words to visemes, and explore the inverse index.

Run from the repository root after `pip install -e .`:

    python demos/01_lexicon_and_index.py
"""

from visemedecode import (
    DEFAULT_MAP,
    build_inverse_index,
    load_frequency_ranks,
    parse_pronouncing_dict,
    sentence_to_visemes,
    word_to_clusters,
)
from visemedecode.cli import data_path

print("Parsing the bundled pronouncing dictionary (this takes a moment)...")
with open(data_path("cmudict.dict"), encoding="latin-1") as f:
    lexicon = parse_pronouncing_dict(f.read())
with open(data_path("word_ranks.tsv")) as f:
    load_frequency_ranks(f.read(), lexicon)
print(f"  {len(lexicon)} headwords, {len(lexicon.ranks)} with frequency ranks\n")

print("Words map to viseme clusters through their pronunciations:")
for word in ["WHAT", "TIME", "IS", "IT", "ME", "EXCUSE"]:
    prons = lexicon.pronunciations(word)
    clusters = word_to_clusters(word, lexicon, DEFAULT_MAP)
    print(f"  {word:8} {' '.join(prons[0]):22} -> {' '.join(clusters[0])}")

print("\nA sentence becomes per-word clusters, or one flat stream:")
clusters = sentence_to_visemes("what time is it", lexicon, DEFAULT_MAP, keep_boundaries=True)
print("  clusters:", " | ".join(" ".join(c) for c in clusters))
stream = sentence_to_visemes("what time is it", lexicon, DEFAULT_MAP)
print("  stream:  ", " ".join(stream))

print("\nThe inverse index answers: which words look like this cluster?")
index = build_inverse_index(lexicon, DEFAULT_MAP)
print(f"  {len(index)} distinct clusters")
for cluster in [("p", "iy"), ("iy", "t"), ("w", "ah", "t")]:
    words = index.words_for(cluster)
    shown = ", ".join(words[:10]) + (", ..." if len(words) > 10 else "")
    print(f"  ({', '.join(cluster)}): {len(words):3} words: {shown}")

print("\nHomophemes are why decoding needs a language model: many words")
print("share identical lip movements, e.g. ME and BE both map to (p, iy).")
