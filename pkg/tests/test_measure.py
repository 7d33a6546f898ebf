"""Measure engine: eigen-solves, finiteness tags, evaluation, profiles."""

from fractions import Fraction

import pytest

from bratteli._infinity import INF, is_infinite
from bratteli.diagram import ClopenSet, StationaryDiagram, cylinders_at_level
from bratteli.exact import QQ
from bratteli.measure import (
    DefectiveProfile,
    MeasureSum,
    UnsupportedSpectrumError,
    defective_profile,
    degenerate_classes,
    ergodic_measures,
    infinite_cylinder_counts,
    restricted_mass_at_level,
    total_mass,
)

from conftest import full_measure


def test_example1_measures(example1_n3, mu3):
    measures = ergodic_measures(example1_n3)
    assert [m.finite for m in measures] == [True, False, False]
    assert mu3.lam.as_fraction() == 4
    assert [v + 1 for v in mu3.b_f] == [2, 3, 4]
    assert [v + 1 for v in mu3.b_inf] == [1]
    assert {v + 1: mu3.x[v].as_fraction() for v in mu3.b_f} == {2: 1, 3: 1, 4: 1}
    assert total_mass(mu3).as_fraction() == 3


def test_example1_n4_eigenvector(mu4):
    assert mu4.lam.as_fraction() == 5
    assert mu4.x[1].as_fraction() == Fraction(2, 3)


def test_example1_excluded_head_would_solve_negative(example1_n3, mu3):
    """The head entry x_1 = x_2 / (lambda - M) is negative, which is why the
    head vertex is excluded from the finite subdiagram."""
    lam = mu3.lam.as_fraction()
    m_head = example1_n3.F[0][0]
    forced = mu3.x[1].as_fraction() / (lam - m_head)
    assert forced < 0


def test_example2_tags_and_masses(example2):
    m1, m2, m3 = ergodic_measures(example2)
    assert m1.finite and not m2.finite and not m3.finite
    assert [v + 1 for v in m1.support] == [1, 2]
    assert [v + 1 for v in m2.support] == [1, 2, 3, 4]
    assert m3.full
    assert m1.lam.as_fraction() == 4
    assert m2.lam.as_fraction() == 3
    assert m3.lam.as_fraction() == 2

    nu12 = MeasureSum([(m1, 1), (m2, 1)])
    nu123 = MeasureSum([(m1, 1), (m2, 1), (m3, 1)])
    assert defective_profile(m2).mass_class == DefectiveProfile.ZERO
    assert defective_profile(m3).mass_class == DefectiveProfile.ZERO
    assert defective_profile(nu12).mass_class == DefectiveProfile.FINITE_POSITIVE
    assert defective_profile(nu123).mass_class == DefectiveProfile.INFINITE


def test_dyadic_unique_finite(dyadic):
    measures = ergodic_measures(dyadic)
    assert len(measures) == 1 and measures[0].finite
    mu = measures[0]
    assert total_mass(mu).as_fraction() == 1
    for c in cylinders_at_level(dyadic, 3):
        assert mu.cylinder_measure(c).as_fraction() == Fraction(1, 8)


def test_single_vertex_three_edges_mass_one():
    mu = ergodic_measures(StationaryDiagram([[3]]))[0]
    assert total_mass(mu).as_fraction() == 1


def test_mass_constant_across_levels(corpus_measures):
    for mu in corpus_measures:
        for level in range(1, 6):
            assert restricted_mass_at_level(mu, level) == mu.mass


def test_eigen_consistency(corpus_measures):
    for mu in corpus_measures:
        a = mu.diagram.A()
        for v in mu.b_f:
            total = mu.field.zero()
            for w in mu.b_f:
                if a[v][w]:
                    total = total + a[v][w] * mu.x[w]
            assert total == mu.lam * mu.x[v]


def test_cylinder_values_example1(mu3):
    assert mu3.vertex_value(2, 2).as_fraction() == Fraction(1, 16)
    assert mu3.vertex_value(2, 2, normalized=True).as_fraction() == Fraction(1, 48)
    assert is_infinite(mu3.vertex_value(0, 2))


def test_additivity_refinement_identity(corpus_measures):
    """mu(C) equals the sum over the children of C, exhaustively to level 5."""
    for mu in corpus_measures:
        top = 4 if sum(mu.diagram.path_counts(4)) <= 5000 else 3
        for level in range(1, top + 1):
            for c in cylinders_at_level(mu.diagram, level):
                v = mu.cylinder_measure(c)
                kids = c.children()
                if is_infinite(v):
                    assert any(is_infinite(mu.cylinder_measure(k)) for k in kids)
                    continue
                total = mu.field.zero()
                finite = True
                for k in kids:
                    kv = mu.cylinder_measure(k)
                    if is_infinite(kv):
                        finite = False
                        break
                    total = total + kv
                assert finite and total == v


def test_full_space_dichotomy(corpus_measures):
    for mu in corpus_measures:
        space, _ = mu.support_diagram()
        whole = ClopenSet(space, cylinders_at_level(space, 1), normalized=True)
        from bratteli.oracle import as_space

        value = as_space(mu).clopen_value(whole)
        if mu.finite:
            assert not is_infinite(value)
        else:
            assert is_infinite(value)
            # but every cylinder inside the finite subdiagram is finite
            for v in mu.b_f:
                assert not is_infinite(mu.vertex_value(v, 1))


def test_infinite_cylinder_counts_example1(mu3):
    counts = infinite_cylinder_counts(mu3, 2)
    # no edge from the head into vertex 3, so nothing passes through it
    assert counts[2] == 0 and counts[3] == 0
    assert counts[1] == 7  # seven head-first paths end at vertex 2
    assert counts[0] == 42  # everything at the head is outside X_{B_f}


def test_infinite_counts_zero_for_finite(dyadic):
    mu = ergodic_measures(dyadic)[0]
    assert infinite_cylinder_counts(mu, 3) == {0: 0}


def test_infinite_counts_example2_level1(example2):
    m2 = ergodic_measures(example2)[1]
    counts = infinite_cylinder_counts(m2, 1)
    sup, index = m2.support_diagram()
    for v in m2.b_inf:
        assert counts[v] == sup.root_edges()[index[v]]
    for v in m2.b_f:
        assert counts[v] == 0


def test_profile_kinds(mu3, corpus_measures):
    p = defective_profile(mu3)
    assert p.kind == DefectiveProfile.CANTOR
    assert p.mass_class == DefectiveProfile.ZERO
    for mu in corpus_measures:
        prof = defective_profile(mu)
        if mu.finite:
            assert prof.kind == DefectiveProfile.EMPTY
        else:
            # stationary diagrams only produce Cantor defective sets
            assert prof.kind == DefectiveProfile.CANTOR


def test_degenerate_classes_are_skipped():
    # vertex 2 is a bare one-cycle: no ergodic measure lives on it
    d = StationaryDiagram([[2, 0], [1, 1]])
    measures = ergodic_measures(d)
    assert [m.alpha for m in measures] == [0]
    degen = degenerate_classes(d)
    assert [i for i, _ in degen] == [1]


def test_measure_sum_validation(example2, dyadic):
    m1, m2, _ = ergodic_measures(example2)
    with pytest.raises(ValueError):
        MeasureSum([])
    with pytest.raises(ValueError):
        MeasureSum([(m1, 0)])
    other = ergodic_measures(dyadic)[0]
    with pytest.raises(ValueError):
        MeasureSum([(m1, 1), (other, 1)])
    nu = MeasureSum([(m1, Fraction(1, 2)), (m2, 2)])
    c = cylinders_at_level(example2, 1)[0]
    assert nu.cylinder_measure(c) is not None


def test_rescaled(mu3):
    doubled = mu3.rescaled(2)
    assert doubled.vertex_value(2, 1) == mu3.vertex_value(2, 1) * 2
    assert doubled.mass == mu3.mass * 2
    with pytest.raises(ValueError):
        mu3.rescaled(0)
