import numpy as np
import pytest

from conftest import cls
from teachlab.concepts import Restriction, is_teaching_set
from teachlab.errors import PreconditionError
from teachlab.greedy import GreedyConfig, best_restriction, greedy_teach
from teachlab.oracles import oracle_best_restriction, random_class
from teachlab.rectangles import build_rectangles


def test_two_concepts_one_point_tie_goes_to_zero():
    assert best_restriction(cls("0", "1"), 1) == (Restriction((0,), (0,)), 1)


def test_needs_two_concepts():
    with pytest.raises(PreconditionError):
        best_restriction(cls("01"), 1)


def test_config_validation():
    with pytest.raises(PreconditionError):
        GreedyConfig(0)
    with pytest.raises(PreconditionError):
        GreedyConfig(1, tie_break="random")
    with pytest.raises(PreconditionError):
        greedy_teach(cls("00", "01"), 3)


def test_singleton_class():
    cert, trace = greedy_teach(cls("0110"), 1)
    assert cert.teaching_set == () and trace.steps == ()
    assert trace.to_csv("06").splitlines()[-1] == "final,0,06,1,1,0"


def test_smaller_sets_win_ties():
    # {0} with label 1 and {0,1} with 11 both leave one concept
    C = cls("11", "00", "01")
    r, count = best_restriction(C, 2)
    assert (r.points, count) == ((0,), 1)


def test_rectangles_first_choice_is_top_center(rect2):
    # level 1 of this class has 2*4+1 = 9 distinct concepts (see widened-family dedup)
    r, count = best_restriction(rect2, 1)
    assert r == Restriction((9,), (0,)) and count == 9
    assert rect2.domain[9].role == "center" and rect2.domain[9].level == 2


def test_headtail_first_choice_is_top_heads(ht2, backend):
    r, count = best_restriction(ht2, 2, backend)
    assert r == Restriction((10, 11), (0, 0)) and count == 162


def test_rectangles_three_levels_dynamics():
    C = build_rectangles(3, (8, 64, 512))
    cert, trace = greedy_teach(C, 1)
    centers = [C.domain.ids(level=j, role="center")[0] for j in (1, 2, 3)]
    assert [s.restriction for s in trace.steps[:2]] == [
        Restriction((centers[2],), (0,)),
        Restriction((centers[1],), (0,)),
    ]
    assert trace.size >= 3
    assert is_teaching_set(C, cert.concept_index, cert.teaching_set)


def test_trace_invariants_and_oracle_steps():
    rng = np.random.default_rng(11)
    for _ in range(15):
        C = random_class(rng, 12, 60)
        for k in (1, 2):
            cert, trace = greedy_teach(C, k)
            assert is_teaching_set(C, cert.concept_index, cert.teaching_set)
            current = C
            for s in trace.steps:
                assert s.size_after < s.size_before
                assert (s.restriction, s.size_after) == oracle_best_restriction(current, k)
                current = current.take(np.flatnonzero(
                    np.all(current.labels_on(s.restriction.points) == np.array(s.restriction.pattern, bool), axis=1)
                ))
            assert trace.steps == () or trace.steps[-1].size_after == 1


def test_k_monotone():
    rng = np.random.default_rng(3)
    for _ in range(20):
        C = random_class(rng, 10, 50)
        counts = [best_restriction(C, k)[1] for k in (1, 2, 3)]
        assert counts == sorted(counts, reverse=True)


def test_backends_same_trace(ht1):
    traces = {greedy_teach(ht1, 2, b)[1].to_csv("") for b in ("python", "cython") if _has(b)}
    assert len(traces) == 1


def _has(name):
    from teachlab import kernels
    return name in kernels.available_backends()


def test_trace_csv_format(rect2):
    cert, trace = greedy_teach(rect2, 1)
    lines = trace.to_csv(rect2.concept(cert.concept_index).to_hex()).splitlines()
    assert lines[0] == "iter,points,pattern,size_before,size_after,cum_teaching_set_size"
    assert lines[1] == "0,9,0,75,9,1"
    assert lines[-1].startswith(f"final,{cert.concept_index},")
