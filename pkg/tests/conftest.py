"""Shared corpus of diagrams and measures used across the suite."""

import pytest

from bratteli.construct import odometer_from_grouplike
from bratteli.diagram import StationaryDiagram
from bratteli.exact import QQ, group_from_generators
from bratteli.measure import ergodic_measures
from bratteli.svalues import ClopenValuesSet


def example1_matrix(n, m=None):
    """The published four-vertex family: parameter n >= 3 and a heavy head m > n."""
    m = (n + 3) if m is None else m
    return [
        [m, 0, 0, 0],
        [1, 2, 0, 0],
        [0, 1, n, 1],
        [0, 1, 1, n],
    ]


EXAMPLE2_A = [
    [3, 1, 1, 0, 0],
    [1, 3, 0, 0, 1],
    [0, 0, 2, 1, 1],
    [0, 0, 1, 2, 0],
    [0, 0, 0, 0, 2],
]

# generated once with random.Random(7), then frozen: three classes with
# distinct spectral radii 4 > 3 > 2
RANDOM3_F = [
    [4, 0, 0],
    [1, 3, 0],
    [0, 2, 2],
]


def transpose(a):
    return [[a[j][i] for j in range(len(a))] for i in range(len(a[0]))]


@pytest.fixture(scope="session")
def dyadic():
    return StationaryDiagram([[2]], name="dyadic")


@pytest.fixture(scope="session")
def triadic():
    return StationaryDiagram([[3]], name="triadic")


@pytest.fixture(scope="session")
def six_odometer():
    return StationaryDiagram([[6]], name="six_odometer")


@pytest.fixture(scope="session")
def example1_n3():
    return StationaryDiagram(example1_matrix(3), name="example1_N3")


@pytest.fixture(scope="session")
def example1_n4():
    return StationaryDiagram(example1_matrix(4), name="example1_N4")


@pytest.fixture(scope="session")
def example2():
    return StationaryDiagram(transpose(EXAMPLE2_A), name="example2")


@pytest.fixture(scope="session")
def random3():
    return StationaryDiagram(RANDOM3_F, name="random3")


@pytest.fixture(scope="session")
def golden():
    return StationaryDiagram([[1, 1], [1, 0]], name="golden")


@pytest.fixture(scope="session")
def z6_carrier():
    return StationaryDiagram([[7, 0], [6, 6]], name="z6_carrier")


def full_measure(diagram):
    """The unique measure whose support is the whole diagram."""
    full = [m for m in ergodic_measures(diagram) if m.full]
    assert len(full) == 1
    return full[0]


@pytest.fixture(scope="session")
def mu3(example1_n3):
    return full_measure(example1_n3)


@pytest.fixture(scope="session")
def mu4(example1_n4):
    return full_measure(example1_n4)


@pytest.fixture(scope="session")
def z6_set():
    group = group_from_generators(QQ, [1])
    return ClopenValuesSet(QQ, group, lam=QQ.from_rational(6))


@pytest.fixture(scope="session")
def z6_constructed(z6_set):
    _, measure = odometer_from_grouplike(z6_set, name="z6_constructed")
    return measure


def corpus_diagrams(request):
    names = [
        "dyadic",
        "example1_n3",
        "example1_n4",
        "example2",
        "random3",
        "golden",
        "z6_carrier",
    ]
    return [request.getfixturevalue(n) for n in names]


@pytest.fixture(scope="session")
def corpus(request):
    return corpus_diagrams(request)


@pytest.fixture(scope="session")
def corpus_measures(corpus):
    """One designated measure per corpus diagram, plus all three of the
    block-triangular example."""
    out = []
    for d in corpus:
        if d.name == "example2":
            out.extend(ergodic_measures(d))
        else:
            out.append(full_measure(d))
    return out
