import itertools
import random

import pytest

from visemedecode import (
    CapExceededError,
    SegmentationSet,
    UnknownVisemeError,
    find_possible_chunks,
    find_shortest_prefix,
    segment_lattice,
)

ALPHABET = ["p", "t", "k", "iy", "ah"]


def brute_force_segmentations(seq, keys):
    """Oracle: all 2^(len-1) cut patterns, filtered by key membership."""
    seq = tuple(seq)
    n = len(seq)
    out = set()
    for pattern in itertools.product((0, 1), repeat=max(n - 1, 0)):
        cuts = [0] + [i + 1 for i, bit in enumerate(pattern) if bit] + [n]
        parts = tuple(seq[a:b] for a, b in zip(cuts, cuts[1:]))
        if all(part in keys for part in parts):
            out.add(parts)
    return out


def random_instance(rng):
    n_keys = rng.randint(1, 12)
    keys = set()
    while len(keys) < n_keys:
        length = rng.randint(1, 4)
        keys.add(tuple(rng.choice(ALPHABET) for _ in range(length)))
    seq_len = rng.randint(1, 10)
    if rng.random() < 0.5 and keys:
        # build the sequence out of keys so some segmentation usually exists
        seq = []
        while len(seq) < seq_len:
            seq.extend(rng.choice(sorted(keys)))
        seq = tuple(seq[:seq_len])
    else:
        seq = tuple(rng.choice(ALPHABET) for _ in range(seq_len))
    return seq, keys


def test_find_shortest_prefix_traces():
    keys = {("w", "ah", "t"), ("w", "ah", "t", "t")}
    seq = ("w", "ah", "t", "t", "ah")
    assert find_shortest_prefix(seq, 0, keys) == 3
    assert find_shortest_prefix(seq, 3, keys) == 4
    assert find_shortest_prefix(("t", "t"), 0, {("p", "iy")}) == 0
    assert find_shortest_prefix(seq, 4, keys) == 0  # nothing longer matches


def test_two_symbol_toy():
    keys = {("p",), ("t",), ("p", "t")}
    found = find_possible_chunks(("p", "t"), keys)
    assert set(found) == {(("p",), ("t",)), (("p", "t"),)}


def test_no_segmentation_is_empty_set():
    found = find_possible_chunks(("t", "t"), {("p", "iy")})
    assert len(found) == 0


def test_oracle_equivalence_memoized_and_literal():
    rng = random.Random(1234)
    for _ in range(120):
        seq, keys = random_instance(rng)
        expected = brute_force_segmentations(seq, keys)
        assert set(find_possible_chunks(seq, keys)) == expected
        assert set(find_possible_chunks(seq, keys, literal_recursion=True)) == expected


def test_lattice_matches_chunks():
    rng = random.Random(99)
    for _ in range(80):
        seq, keys = random_instance(rng)
        lattice = segment_lattice(seq, keys)
        paths = set(lattice.segmentations())
        assert paths == set(find_possible_chunks(seq, keys))
        assert lattice.path_count == len(paths)


def test_lattice_toy_shape():
    keys = {("p",), ("t",), ("p", "t")}
    lattice = segment_lattice(("p", "t"), keys)
    assert set(lattice.segmentations()) == {(("p",), ("t",)), (("p", "t"),)}
    assert lattice.node_count == 3
    assert lattice.path_count == 2

    unique = segment_lattice(("p", "iy"), {("p", "iy")})
    assert unique.path_count == 1

    nothing = segment_lattice(("iy", "iy"), {("p",)})
    assert nothing.path_count == 0
    assert nothing.is_empty()


def test_lattice_continuations_share_prefixes():
    keys = {("p",), ("t",), ("p", "t"), ("t", "t")}
    lattice = segment_lattice(("p", "t", "t"), keys)
    starts = dict(lattice.continuations(0))
    assert set(starts) == {("p",), ("p", "t")}
    after_p = dict(lattice.continuations(1))
    assert set(after_p) == {("t",), ("t", "t")}


def test_concatenation_and_key_validity():
    rng = random.Random(5)
    for _ in range(60):
        seq, keys = random_instance(rng)
        for seg in find_possible_chunks(seq, keys):
            assert tuple(v for c in seg for v in c) == tuple(seq)
            assert all(c in keys for c in seg)


def test_segmentation_cap_is_a_distinct_outcome():
    keys = {("p",), ("p", "p"), ("p", "p", "p")}
    seq = ("p",) * 12  # hundreds of segmentations
    with pytest.raises(CapExceededError) as err:
        find_possible_chunks(seq, keys, max_segmentations=10)
    assert err.value.limit == 10
    assert err.value.actual > 10
    with pytest.raises(CapExceededError):
        find_possible_chunks(seq, keys, max_sequence_length=5)
    with pytest.raises(CapExceededError):
        find_possible_chunks(seq, keys, max_segmentations=10, literal_recursion=True)


def test_silence_is_an_unbreakable_boundary():
    keys = {("p",), ("t",), ("p", "t")}
    # silence between p and t forbids the (p,t) cluster
    found = find_possible_chunks(("p", "s", "t"), keys)
    assert set(found) == {(("p",), ("t",))}
    # leading/trailing/repeated silences are ignored
    assert set(find_possible_chunks(("s", "p", "t", "s", "s"), keys)) == {
        (("p",), ("t",)),
        (("p", "t"),),
    }
    assert len(find_possible_chunks(("s", "s"), keys)) == 0


def test_silence_boundary_in_lattice():
    keys = {("p",), ("t",), ("p", "t")}
    lattice = segment_lattice(("p", "s", "t"), keys)
    assert set(lattice.segmentations()) == {(("p",), ("t",))}


def test_unknown_symbols_rejected():
    with pytest.raises(UnknownVisemeError):
        find_possible_chunks(("p", "qq"), {("p",)})


def test_canonical_order_and_no_duplicates():
    keys = {("p",), ("t",), ("p", "t"), ("p", "t", "p")}
    found = find_possible_chunks(("p", "t", "p"), keys)
    assert len(set(found)) == len(found.segmentations)
    sizes = [len(s) for s in found]
    assert sizes == sorted(sizes)
    rebuilt = SegmentationSet.from_iterable(list(found))
    assert rebuilt.segmentations == found.segmentations
