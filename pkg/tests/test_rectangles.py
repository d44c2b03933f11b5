import pytest

from teachlab.concepts import Restriction, count_consistent, is_teaching_set
from teachlab.errors import BudgetExceeded, PreconditionError
from teachlab.rectangles import (
    NotRealizable,
    Rectangle,
    build_rectangles,
    default_rect_widths,
    family_rectangle,
    realize_rectangle,
    rect_analytic_sizes,
    rect_geometry,
    rect_tsmin_witness,
    rect_widths_from_domain,
    validate_rect_widths,
)
from teachlab.concepts import Concept


def test_default_widths():
    assert default_rect_widths(3) == (1024, 2**20, 2**30)


def test_validator():
    assert validate_rect_widths((4, 16))
    assert validate_rect_widths(tuple(8**i for i in range(1, 6)))
    bad = validate_rect_widths((4, 4))
    assert not bad and bad.level == 2 and (bad.lhs, bad.rhs) == (18, 9)
    assert all(validate_rect_widths(default_rect_widths(n)) for n in range(1, 9))


def test_geometry_nests_lower_levels():
    g = rect_geometry((4, 16, 64))
    assert g.scales == (1, 5, 81)
    # all of level i-1 fits strictly between center i and its first arm point
    for i in (2, 3):
        assert g.extent(i - 1) < g.scales[i - 1]


def test_sizes_small():
    C = build_rectangles(1, (2,))
    assert (C.n_points, len(C)) == (5, 5)
    C2 = build_rectangles(2, (4, 16))
    assert (C2.n_points, len(C2)) == (42, 75)
    assert rect_analytic_sizes(2, (4, 16)).level_concepts == (9, 66)
    assert rect_analytic_sizes(2, (4, 16)).formula_level_concepts == (18, 66)


def test_level_two_counts(rect2):
    z2 = rect2.domain.ids(level=2, role="center")[0]
    assert count_consistent(rect2, Restriction((z2,), (1,))) == 66
    assert count_consistent(rect2, Restriction((z2,), (0,))) == 9


def test_every_concept_is_its_rectangle(rect2):
    g = rect_geometry((4, 16))
    for i in range(len(rect2)):
        c = rect2.concept(i)
        box = realize_rectangle(c, rect2.domain)
        assert isinstance(box, Rectangle)
        for tag in rect2.origins(i):
            level, family, m = tag.split("/")
            r = family_rectangle(g, int(level[1:]), family, int(m))
            assert [int(r.contains(p.x, p.y)) for p in rect2.domain] == c.labels()


def test_not_realizable():
    C = build_rectangles(1, (2,))
    # center and the top point, skipping the point between them
    c = Concept.from_bits("10100")
    out = realize_rectangle(c, C.domain)
    assert isinstance(out, NotRealizable) and not out and out.point == 1


def test_ts_min_witness(rect2):
    cert = rect_tsmin_witness(rect2)
    assert cert.teaching_set == (0, 1)
    assert rect2.concept(cert.concept_index).labels() == [1] + [0] * 4 + [1] * 4 + [0] * 33
    assert is_teaching_set(rect2, cert.concept_index, cert.teaching_set)


def test_params_roundtrip(rect2):
    assert rect_widths_from_domain(rect2.domain) == (4, 16)


def test_force_and_budget(monkeypatch):
    with pytest.raises(PreconditionError):
        build_rectangles(2, (4, 4))
    assert len(build_rectangles(2, (4, 4), force=True)) == 9 + 18
    monkeypatch.setenv("TEACHLAB_MAX_CONCEPTS", "100")
    with pytest.raises(BudgetExceeded) as info:
        build_rectangles(3, (8, 64, 512))
    assert info.value.analytic.class_size == 17 + 258 + 2050


def test_default_scale_sandwich():
    for n in range(1, 9):
        a = rect_analytic_sizes(n)
        exact_lower = a.checks.pop("class_lower")
        assert all(a.checks.values()), (n, a.checks)
        # with one level the widened families add nothing: 2049 < 2^12
        assert exact_lower == (n >= 2)
        assert a.domain_size == sum(2 * 2 ** (10 * i) + 1 for i in range(1, n + 1))


def test_lower_points_in_half_the_level(rect2):
    lv2 = [i for i in range(len(rect2)) if rect2.origins(i)[0].startswith("C2/")]
    for x in range(9):
        assert sum(rect2.concept(i)[x] for i in lv2) * 2 == len(lv2)
