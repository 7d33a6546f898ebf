"""Diagram model: validation, classes, telescoping, cylinders, serialization."""

import json

import pytest

from bratteli.diagram import (
    ClopenSet,
    CylinderSet,
    DiagramError,
    EnumerationTooLargeError,
    FiniteRankDiagram,
    StationaryDiagram,
    class_decomposition,
    clopen_normalize,
    condensation_dot,
    cylinders_at_level,
    diagram_from_json_dict,
    whole_space,
)
from bratteli.measure import ergodic_measures

from conftest import example1_matrix, full_measure


def test_validation_rejects_bad_matrices():
    with pytest.raises(DiagramError):
        StationaryDiagram([[1, 0], [0, 0]])  # zero row
    with pytest.raises(DiagramError):
        StationaryDiagram([[0, 1], [0, 1]])  # zero column
    with pytest.raises(DiagramError):
        StationaryDiagram([[1, 2], [3, -1]])
    with pytest.raises(DiagramError):
        StationaryDiagram([[1, 2, 3], [4, 5, 6]])


def test_class_decomposition_example1(example1_n3):
    dec = class_decomposition(example1_n3)
    assert dec.classes == ((0,), (1,), (2, 3))
    # the head feeds down into the measure class
    assert dec.precedes(0, 2) and dec.precedes(1, 2)
    assert not dec.precedes(2, 1)
    assert dec.minimal_components() == (0,)


def test_class_decomposition_positive_matrix():
    d = StationaryDiagram([[1, 2], [3, 4]])
    assert class_decomposition(d).classes == ((0, 1),)


def test_class_decomposition_example2(example2):
    dec = class_decomposition(example2)
    assert dec.classes == ((0, 1), (2, 3), (4,))
    assert dec.precedes(0, 1) and dec.precedes(1, 2) and dec.precedes(0, 2)
    assert not dec.precedes(2, 0)


def test_telescope(dyadic, example1_n3):
    assert dyadic.telescope(3).F == ((8,),)
    assert dyadic.telescope(1) is dyadic
    f = example1_matrix(3)
    square = [
        [sum(f[i][t] * f[t][j] for t in range(4)) for j in range(4)]
        for i in range(4)
    ]
    assert example1_n3.telescope(2).F == tuple(tuple(r) for r in square)


def test_telescope_preserves_classes_on_primitive_corpus(corpus):
    for d in corpus:
        dec = class_decomposition(d)
        for k in (2, 3):
            dec_k = class_decomposition(d.telescope(k))
            assert dec_k.classes == dec.classes
            assert dec_k.reach == dec.reach


def test_telescope_measure_compatibility(example1_n3):
    mu = full_measure(example1_n3)
    mu2 = [m for m in ergodic_measures(example1_n3.telescope(2)) if m.alpha == mu.alpha][0]
    for v in mu.b_f:
        for level in (1, 2, 3):
            assert mu2.vertex_value(v, level) == mu.vertex_value(v, 2 * level)


def test_path_counts_match_enumeration(corpus):
    for d in corpus:
        for level in range(1, 5):
            counts = d.path_counts(level)
            if sum(counts) > 20000:
                continue
            cells = cylinders_at_level(d, level)
            per_vertex = [0] * d.vertex_count
            for c in cells:
                per_vertex[c.terminal_vertex] += 1
            assert tuple(per_vertex) == counts


def test_path_count_recursion(example1_n3):
    f = example1_n3.F
    for level in range(1, 6):
        h = example1_n3.path_counts(level)
        h_next = example1_n3.path_counts(level + 1)
        assert h_next == tuple(
            sum(f[v][w] * h[w] for w in range(4)) for v in range(4)
        )


def test_dyadic_cylinder_counts(dyadic):
    assert len(cylinders_at_level(dyadic, 3)) == 8


def test_example1_level1_counts_are_column_sums(example1_n3):
    cells = cylinders_at_level(example1_n3, 1)
    per_vertex = [0, 0, 0, 0]
    for c in cells:
        per_vertex[c.terminal_vertex] += 1
    cols = [sum(example1_n3.F[v][w] for v in range(4)) for w in range(4)]
    assert per_vertex == cols == [7, 4, 4, 4]


def test_enumeration_cap(dyadic):
    with pytest.raises(EnumerationTooLargeError):
        cylinders_at_level(dyadic, 25, cap=1000)


def test_clopen_normalize_idempotent_and_containment(example1_n3):
    cells = cylinders_at_level(example1_n3, 1)
    kid = cells[0].children()[0]
    u = ClopenSet(example1_n3, [cells[0], kid])
    assert clopen_normalize(u) == u
    assert u == ClopenSet(example1_n3, [cells[0]])
    assert all(c.level == 2 for c in u.cylinders)


def test_clopen_normalize_preserves_measure(example1_n3):
    mu = full_measure(example1_n3)
    cells = cylinders_at_level(example1_n3, 1)
    finite = [c for c in cells if c.terminal_vertex in set(mu.b_f)]
    u = ClopenSet(example1_n3, finite[:5])
    deep = u.refined_to(3)
    assert mu.clopen_measure(u) == mu.clopen_measure(deep)


def test_clopen_set_operations(dyadic):
    whole = whole_space(dyadic, 2)
    first = ClopenSet(dyadic, [whole.cylinders[0]])
    rest = whole.difference(first)
    assert len(rest) == 3
    assert rest.disjoint_from(first)
    assert whole.contains_clopen(first)
    assert first.union(rest) == whole


def test_cylinder_validation(dyadic):
    with pytest.raises(ValueError):
        CylinderSet(dyadic, (0,), (5,))
    c = CylinderSet(dyadic, (0,), (1,))
    assert c.level == 1 and c.terminal_vertex == 0
    assert len(c.children()) == 2
    assert c.contains(c.children()[0])


def test_json_round_trip(corpus, z6_constructed):
    for d in list(corpus) + [z6_constructed.diagram]:
        doc = d.to_json_dict()
        text = json.dumps(doc, sort_keys=True, indent=2)
        d2 = diagram_from_json_dict(json.loads(text))
        assert d2 == d
        assert json.dumps(d2.to_json_dict(), sort_keys=True, indent=2) == text


def test_json_errors():
    with pytest.raises(DiagramError):
        diagram_from_json_dict({"schema_version": 2, "kind": "stationary", "matrix": [[1]]})
    with pytest.raises(DiagramError):
        diagram_from_json_dict({"schema_version": 1, "kind": "mystery"})


def test_finite_rank_structure(z6_constructed):
    d = z6_constructed.diagram
    assert isinstance(d, FiniteRankDiagram)
    assert d.matrix_at(1) == ((2, 0), (2, 2))
    assert d.matrix_at(2) == ((3, 0), (3, 3))
    assert d.matrix_at(3) == ((2, 0), (2, 2))
    assert d.rank == 2
    with pytest.raises(DiagramError):
        FiniteRankDiagram([], [])
    with pytest.raises(DiagramError):
        # a 1x2 level matrix followed by another 1x2: 1 vertex above, 2 expected
        FiniteRankDiagram([[[1, 1]]], [[[1, 1]]])


def test_condensation_dot(example1_n3):
    text = condensation_dot(example1_n3)
    assert text.startswith("digraph")
    assert '"{3,4}"' in text and "c1 -> c2" in text
