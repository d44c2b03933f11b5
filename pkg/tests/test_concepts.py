import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cls
from teachlab.concepts import (
    Concept,
    Domain,
    DomainPoint,
    Restriction,
    build_class,
    build_class_from_rows,
    count_consistent,
    flip_label,
    is_shattered,
    is_teaching_set,
    patterns_on,
    restrict,
)
from teachlab.errors import DomainMismatchError, PreconditionError


def test_concept_runs_and_bits():
    c = Concept.from_bits("0110011")
    assert c.runs == ((1, 3), (5, 7))
    assert c.bitstring() == "0110011"
    assert c.count() == 4
    assert [c[i] for i in range(7)] == [0, 1, 1, 0, 0, 1, 1]


def test_concept_hex_is_little_endian():
    # point 0 is bit 0 of byte 0; point 8 is bit 0 of byte 1
    assert Concept.from_bits("100000001").to_hex() == "0101"
    assert Concept.from_bits("01").to_hex() == "02"
    assert Concept.from_int(0b101, 3).bitstring() == "101"


def test_concept_flip():
    assert Concept.from_bits("010").flipped(0).bitstring() == "110"


def test_restriction_validation():
    with pytest.raises(ValueError):
        Restriction((), ())
    with pytest.raises(ValueError):
        Restriction((2, 1), (0, 0))
    with pytest.raises(ValueError):
        Restriction((1,), (2,))
    r = Restriction.from_pairs([(3, 1), (0, 0)])
    assert r.points == (0, 3) and r.bits == "01"
    with pytest.raises(ValueError):
        Restriction.from_pairs([(0, 0), (0, 1)])


def test_domain_ids_must_be_contiguous():
    with pytest.raises(ValueError):
        Domain([DomainPoint(1)])
    with pytest.raises(ValueError):
        Domain([])


def test_build_class_dedups_keep_first():
    C = build_class(Domain.plain(2), ["00", "01", "00"], ["a", "b", "c"])
    assert [c.bitstring() for c in C] == ["00", "01"]
    assert C.origins(0) == ("a", "c")


def test_build_class_length_mismatch():
    with pytest.raises(ValueError):
        build_class(Domain.plain(2), ["001"])


def test_restrict_examples():
    C = cls("00", "01", "10", "11")
    assert [c.bitstring() for c in restrict(C, Restriction((0,), (1,)))] == ["10", "11"]
    assert count_consistent(C, Restriction((0, 1), (1, 1))) == 1
    assert count_consistent(cls("00", "01"), Restriction((0,), (1,))) == 0
    with pytest.raises(DomainMismatchError):
        restrict(C, Restriction((5,), (0,)))


def test_full_restriction_isolates():
    C = cls("0011", "0101", "1110")
    for i, c in enumerate(C):
        got = restrict(C, Restriction((0, 1, 2, 3), tuple(c.labels())))
        assert len(got) == 1 and got.concept(0) == C.concept(i)


def test_patterns_on_examples():
    C = cls("00", "11")
    assert patterns_on(C, [0, 1]) == {"00", "11"}
    assert patterns_on(C, [0]) == {"0", "1"}
    assert patterns_on(C, []) == {""}
    with pytest.raises(PreconditionError):
        patterns_on(C, [0, 0])


def test_is_shattered_examples():
    assert is_shattered(cls("00", "01", "10", "11"), [0, 1])
    assert not is_shattered(cls("00", "11"), [0, 1])


def test_is_teaching_set_examples():
    assert is_teaching_set(cls("0101"), 0, [])
    assert is_teaching_set(cls("00", "01"), 1, [1])
    assert not is_teaching_set(cls("00", "01"), 1, [0])


def test_flip_label_merges_duplicates():
    C = cls("00", "01")
    D = flip_label(C, 1, 1)
    assert len(D) == 1 and D.origins(0) == ()


def test_take_and_columns(rect2):
    sub = rect2.take([3, 1])
    assert sub.concept(0) == rect2.concept(3)
    assert np.array_equal(sub.column(0), rect2.column(0)[[3, 1]])


def test_dense_words_match_labels(ht1):
    words = ht1.dense_words()
    for x in range(ht1.n_points):
        bits = np.unpackbits(words[x].view(np.uint8), bitorder="little")[: len(ht1)].astype(bool)
        assert np.array_equal(bits, ht1.column(x))


# -- properties ----------------------------------------------------------------

classes = st.integers(1, 8).flatmap(
    lambda n: st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=1, max_size=24)
)


def _build(rows):
    return build_class_from_rows(Domain.plain(len(rows[0])), np.array(rows, dtype=bool))


@settings(max_examples=150, deadline=None)
@given(classes, st.data())
def test_restrict_composes(rows, data):
    C = _build(rows)
    n = C.n_points
    pts = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    cut = data.draw(st.integers(0, len(pts)))
    bits = data.draw(st.lists(st.integers(0, 1), min_size=len(pts), max_size=len(pts)))
    pairs = list(zip(pts, bits))
    whole = Restriction.from_pairs(pairs)
    if 0 < cut < len(pts):
        r1, r2 = Restriction.from_pairs(pairs[:cut]), Restriction.from_pairs(pairs[cut:])
        twice = restrict(restrict(C, r1), r2)
        once = restrict(C, r1.union(r2))
        assert [c.bitstring() for c in twice] == [c.bitstring() for c in once]
    # pairwise oracle for counts
    assert count_consistent(C, whole) == sum(all(c[x] == b for x, b in pairs) for c in C)


@settings(max_examples=150, deadline=None)
@given(classes, st.data())
def test_single_point_counts_partition(rows, data):
    C = _build(rows)
    x = data.draw(st.integers(0, C.n_points - 1))
    assert count_consistent(C, Restriction((x,), (0,))) + count_consistent(C, Restriction((x,), (1,))) == len(C)


@settings(max_examples=150, deadline=None)
@given(classes, st.data())
def test_patterns_and_shattering(rows, data):
    C = _build(rows)
    S = sorted(data.draw(st.lists(st.integers(0, C.n_points - 1), max_size=C.n_points, unique=True)))
    naive = set()
    for c in C:
        naive.add("".join(str(c[x]) for x in S))
    assert patterns_on(C, S) == naive
    shattered = is_shattered(C, S)
    assert shattered == (len(naive) == 2 ** len(S))
    if shattered and S:
        assert is_shattered(C, S[1:])


@settings(max_examples=100, deadline=None)
@given(classes)
def test_full_domain_teaches_every_concept(rows):
    C = _build(rows)
    for i in range(len(C)):
        assert is_teaching_set(C, i, range(C.n_points))
