"""Decode viseme streams back into sentences with the beam search.

Scenario 1 knows where words start and stop (the cluster sequence is
given); scenario 2 sees only the flat stream and must segment it while
decoding.  Both pick the candidate sentence with the lowest perplexity
under the built-in trigram model.

    python demos/03_decoding.py
"""

from visemedecode import (
    DEFAULT_MAP,
    NgramModel,
    NgramScorer,
    build_inverse_index,
    decode_scenario1,
    decode_scenario2,
    load_frequency_ranks,
    parse_pronouncing_dict,
    sentence_to_visemes,
)
from visemedecode.cli import data_path

with open(data_path("cmudict.dict"), encoding="latin-1") as f:
    lexicon = parse_pronouncing_dict(f.read())
with open(data_path("word_ranks.tsv")) as f:
    load_frequency_ranks(f.read(), lexicon)
index = build_inverse_index(lexicon, DEFAULT_MAP)

with open(data_path("corpus_small.txt")) as f:
    corpus = f.read()
with open(data_path("ouluvs_phrases.txt")) as f:
    phrases = [line.strip() for line in f if line.strip()]
scorer = NgramScorer(NgramModel.train(corpus + "\n" + "\n".join(phrases)))

print("Ten short phrases, decoded in both scenarios (beam width 50):\n")
print(f"{'phrase':20} {'scenario 1':>26} {'scenario 2':>26}")
for phrase in phrases:
    clusters = sentence_to_visemes(phrase, lexicon, DEFAULT_MAP, keep_boundaries=True)
    r1 = decode_scenario1(clusters, index, scorer, lexicon, 50)
    stream = sentence_to_visemes(phrase, lexicon, DEFAULT_MAP)
    r2 = decode_scenario2(stream, index, scorer, lexicon, beam_width=50)
    print(f"{phrase:20} {r1.text:>20} {r1.perplexity:5.1f} {r2.text:>20} {r2.perplexity:5.1f}")

print("\nWhy the language model matters: the runner-up hypotheses for")
print("'EXCUSE ME' are other word pairs with the same lip movements:")
clusters = sentence_to_visemes("EXCUSE ME", lexicon, DEFAULT_MAP, keep_boundaries=True)
result = decode_scenario1(clusters, index, scorer, lexicon, 50)
for hypothesis in result.alternates[:5]:
    print(f"  {' '.join(hypothesis.words):24} PP {hypothesis.perplexity:.1f}")

print("\nA narrow beam gets stuck in a local optimum; widening it recovers")
print("the sentence ('THE CAT SLEEPS ON THE WARM FLOOR', unknown boundaries):")
stream = sentence_to_visemes("THE CAT SLEEPS ON THE WARM FLOOR", lexicon, DEFAULT_MAP)
for beam in (1, 5, 50):
    result = decode_scenario2(stream, index, scorer, lexicon, beam_width=beam)
    print(f"  beam {beam:3}: {result.text}  (PP {result.perplexity:.1f})")
