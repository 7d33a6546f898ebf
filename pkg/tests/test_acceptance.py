"""Acceptance suite: one test per criterion, exact tolerances, timed.

Each test prints a single PASS line (visible with -s, and in the captured
output otherwise).  All arithmetic is exact; the time limits are the stated
budgets.
"""

import random
import time
from fractions import Fraction

import pytest

from bratteli._infinity import INF, is_infinite
from bratteli.classify import (
    BAD,
    GOOD,
    back_and_forth,
    homeomorphic,
    is_good,
)
from bratteli.construct import (
    counting_product,
    odometer_from_grouplike,
    one_point_compactification,
    vershik_successor,
)
from bratteli.diagram import ClopenSet, StationaryDiagram, cylinders_at_level
from bratteli.exact import QQ, group_from_generators
from bratteli.measure import (
    DefectiveProfile,
    MeasureSum,
    defective_profile,
    ergodic_measures,
)
from bratteli.oracle import (
    EnumerationBudget,
    as_space,
    enumerate_clopen_values,
    refinability_check,
    verify_invariance,
)
from bratteli.svalues import (
    ClopenValuesSet,
    GroupLikeFinite,
    clopen_values,
    find_svalues_scale,
    is_group_like_truncated,
    product_svalues,
    svalues_equal,
    svalues_member,
)

from conftest import full_measure


class Timer:
    def __init__(self, limit, label):
        self.limit = limit
        self.label = label

    def __enter__(self):
        self.start = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.monotonic() - self.start
        if exc_type is None:
            print(f"PASS {self.label} ({elapsed:.2f} s, limit {self.limit} s)")
            assert elapsed < self.limit, f"{self.label} exceeded {self.limit} s"
        else:
            print(f"FAIL {self.label} ({elapsed:.2f} s)")
        return False


def test_criterion_01_example1_reproduction(example1_n3, example1_n4, mu3, mu4):
    with Timer(1.0, "criterion 1: four-vertex family, goodness verdicts and gcd cross-check"):
        # M(N) = N + 3 per the fixtures
        assert example1_n3.F[0][0] == 6 and example1_n4.F[0][0] == 7
        g3, g4 = is_good(mu3), is_good(mu4)
        assert g3.status == GOOD
        assert g4.status == BAD and g4.witness is not None
        assert g4.witness.certificate.status == "no"
        # printed criterion: (N+1)^R / N lies in ((N-1)/(2N)) Z
        for n, expected in ((3, True), (4, False)):
            step = Fraction(n - 1, 2 * n)
            holds_all = all(
                (Fraction((n + 1) ** r, n) / step).denominator == 1
                for r in range(17)
            )
            holds_any = any(
                (Fraction((n + 1) ** r, n) / step).denominator == 1
                for r in range(17)
            )
            assert holds_all == expected and holds_any == expected
        # the printed criterion agrees with the verdicts
        assert (g3.status == GOOD) is True and (g4.status == GOOD) is False


def test_criterion_02_example2_reproduction(example2):
    with Timer(1.0, "criterion 2: block-triangular family, tags and defective masses"):
        m1, m2, m3 = ergodic_measures(example2)
        # spectral radii 4 > 3 > 2 by construction
        assert m1.lam.as_fraction() == 4
        assert m2.lam.as_fraction() == 3
        assert m3.lam.as_fraction() == 2
        assert (m1.finite, m2.finite, m3.finite) == (True, False, False)
        assert defective_profile(m2).mass_class == DefectiveProfile.ZERO
        assert defective_profile(m3).mass_class == DefectiveProfile.ZERO
        nu12 = MeasureSum([(m1, 1), (m2, 1)])
        nu123 = MeasureSum([(m1, 1), (m2, 1), (m3, 1)])
        assert defective_profile(nu12).mass_class == DefectiveProfile.FINITE_POSITIVE
        assert defective_profile(nu123).mass_class == DefectiveProfile.INFINITE


def _rational_candidates(svals, exponent, bound):
    """Members of a rational presentation with lambda exponent <= `exponent`
    and value strictly below `bound` (and the set's own bound)."""
    g = svals.group.cyclic_generator()
    lam = int(svals.lam.as_fraction()) if svals.lam is not None else 1
    unit = g / lam**exponent
    cap = bound
    if svals.is_bounded:
        cap = min(cap, svals.bound.as_fraction())
    out = []
    k = 0
    while True:
        v = unit * k
        if v >= cap:
            break
        out.append(v)
        k += 1
    return out


def _realizable_sums(mu, level, bound):
    """Exact set of level-`level` clopen values up to `bound`, as a bitmask
    over the common denominator (a bounded-knapsack closure)."""
    from math import lcm

    space = as_space(mu)
    units, _ = space.level_units(level)
    fracs = [(u.as_fraction(), c) for _, u, c in units]
    den = lcm(*(f.denominator for f, _ in fracs))
    limit = int(bound * den)
    window = (1 << (limit + 1)) - 1
    mask = 1
    for f, count in fracs:
        p = int(f * den)
        if p == 0:
            continue
        useful = min(count, limit // p)  # extra copies cannot stay under the bound
        chunk = 1
        while useful > 0:
            take = min(chunk, useful)
            mask = (mask | (mask << (p * take))) & window
            useful -= take
            chunk <<= 1
    return mask, den


def test_criterion_03_formula_vs_brute_force(corpus_measures):
    with Timer(30.0, "criterion 3: values-set formula against exhaustive enumeration"):
        rational = [mu for mu in corpus_measures if mu.field is QQ]
        assert len({mu.diagram.name for mu in rational}) >= 6
        for mu in corpus_measures:
            svals = clopen_values(mu)
            enum = enumerate_clopen_values(
                mu, EnumerationBudget(max_level=4, value_bound=2)
            )
            assert enum.values
            for v in enum.values:
                assert svalues_member(svals, v).status == "yes", (mu.name, v)
        for mu in rational:
            svals = clopen_values(mu)
            candidates = _rational_candidates(svals, exponent=3, bound=Fraction(2))
            mask, den = _realizable_sums(mu, 6, Fraction(2))
            for v in candidates:
                assert svalues_member(svals, v).status == "yes"
                t = v * den
                assert t.denominator == 1 and (mask >> int(t)) & 1, (mu.name, v)


def test_criterion_04_group_like_lemma():
    with Timer(5.0, "criterion 4: truncated group-likeness, two conditions agree on 200 draws"):
        rng = random.Random(97)
        checked = 0
        for _ in range(200):
            g = Fraction(1, rng.randint(1, 8))
            steps = rng.randint(2, 14)
            values = [g * k for k in range(steps + 1)]
            if rng.random() < 0.5 and len(values) > 3:
                del values[rng.randrange(1, len(values) - 1)]
            verdict = is_group_like_truncated(
                GroupLikeFinite(tuple(values), values[-1])
            )
            assert verdict.difference_closed == verdict.subgroup_mod_gamma
            checked += 1
        assert checked == 200
        assert is_group_like_truncated(
            GroupLikeFinite((0, Fraction(1, 2), 1, Fraction(3, 2), 2), 2)
        ).ok
        assert not is_group_like_truncated(
            GroupLikeFinite((0, 1, Fraction(5, 2)), Fraction(5, 2))
        ).ok


def test_criterion_05_product_theorem(dyadic, triadic):
    with Timer(10.0, "criterion 5: product formula against rectangle unions"):
        mu = full_measure(dyadic)
        nu = full_measure(triadic)
        prod = product_svalues(clopen_values(mu), clopen_values(nu))
        # depth-2 grid: every union of rectangles has value k/36
        x_cells = cylinders_at_level(dyadic, 2)
        y_cells = cylinders_at_level(triadic, 2)
        assert len(x_cells) == 4 and len(y_cells) == 9
        atoms = [
            mu.cylinder_measure(a).as_fraction() * nu.cylinder_measure(b).as_fraction()
            for a in x_cells
            for b in y_cells
        ]
        values = {Fraction(0)}
        for v in atoms:
            values |= {w + v for w in values}
        assert values == {Fraction(k, 36) for k in range(37)}
        for v in sorted(values):
            assert svalues_member(prod, v).status == "yes", v
        # a sampled member with exponent <= 2 is realized by an explicit union
        sample = Fraction(7, 36)
        chosen = [
            (a, b) for a in x_cells[:1] for b in y_cells[:7]
        ]
        total = sum(
            mu.cylinder_measure(a).as_fraction() * nu.cylinder_measure(b).as_fraction()
            for a, b in chosen
        )
        assert total == sample
        assert svalues_member(prod, sample).status == "yes"


def _alpha_region(mu):
    """A cylinder region ending in the measure class, in the support space."""
    space = as_space(mu)
    a = mu.alpha_vertices()[0]
    sub, index = mu.support_diagram()
    from bratteli.diagram import CylinderSet

    return ClopenSet(sub, [CylinderSet(sub, (index[a],), (0,))], normalized=True)


def _sampled_part_lists(mu, rng, count):
    """Part lists over regions of finite measure: allocation-derived lists
    (realizable by construction) and class-vertex adversarial pairs."""
    space = as_space(mu)
    lists = []
    region = _alpha_region(mu)
    region_value = space.clopen_value(region)
    # adversarial pairs x_i / lambda^m inside a class cylinder
    svals = clopen_values(mu)
    for v in mu.b_f:
        for m in (1, 2, 3):
            w = mu.x[v] / mu.lam**m
            rest = region_value - w
            if rest.sign() <= 0:
                continue
            if svalues_member(svals, rest).status != "yes":
                continue
            lists.append((region, [w, rest]))
    # allocation-derived lists on the finite level-1 region
    finite_cyls = [
        c
        for c in space.whole().cylinders
        if not is_infinite(space.cylinder_value(c))
    ]
    base = ClopenSet(space.diagram, finite_cyls, normalized=True)
    level = base.level + 2
    refined = base.refined_to(level)
    values = [space.cylinder_value(c) for c in refined.cylinders]
    while len(lists) < count:
        parts = [space.field.zero() for _ in range(rng.randint(2, 3))]
        for v in values:
            parts[rng.randrange(len(parts))] += v
        parts = [p for p in parts if not p.is_zero()]
        if len(parts) >= 2:
            lists.append((base, parts))
    return lists[:count]


def test_criterion_06_goodness_refinability_equivalence(corpus_measures):
    with Timer(60.0, "criterion 6: goodness equals refinability on sampled partitions"):
        rng = random.Random(4242)
        budget = EnumerationBudget(max_level=5)
        for mu in corpus_measures:
            verdict = is_good(mu)
            assert verdict.status in (GOOD, BAD)
            failures = []
            for region, parts in _sampled_part_lists(mu, rng, 20):
                res = refinability_check(mu, region, parts, budget)
                if res.partition is None:
                    assert res.conclusive, (mu.name, parts)
                    failures.append(parts)
            if verdict.status == GOOD:
                assert not failures, (mu.name, failures[:1])
            else:
                assert failures, mu.name


def test_criterion_07_homeomorphism_criteria(mu3, mu4, dyadic, z6_carrier, z6_constructed):
    with Timer(30.0, "criterion 7: homeomorphism verdicts and a verified certificate"):
        v = homeomorphic(mu3, mu4)
        assert v.verdict == "not_homeomorphic" and v.reason == "goodness_mismatch"

        base = full_measure(dyadic)
        prod = counting_product(base)
        point = one_point_compactification(base)
        assert svalues_equal(prod.svalues, point.svalues) is True
        v2 = homeomorphic(prod, point)
        assert v2.verdict == "not_homeomorphic"
        assert v2.reason == "defective_profile_mismatch"

        carrier = full_measure(z6_carrier)
        assert svalues_equal(clopen_values(carrier), z6_constructed.svalues) is True
        assert defective_profile(carrier).kind == z6_constructed.profile.kind == "cantor"
        cert = back_and_forth(carrier, z6_constructed, 3)
        assert cert.depth == 3
        assert cert.verify()


def test_criterion_08_construction_fidelity(z6_set, z6_constructed):
    with Timer(10.0, "criterion 8: odometer realization probes, divergence, invariance"):
        mu = z6_constructed
        yes = []
        for a in range(5):
            for b in range(5):
                n = 2**a * 3**b
                if n > 1:
                    yes.append(Fraction(1, n))
        yes = yes[:20] + [Fraction(k, 36) for k in (1, 5, 7, 35, 91)]
        assert len(yes) == 25
        for v in yes:
            assert svalues_member(mu.svalues, v).status == "yes", v
        no = [Fraction(1, p) for p in (5, 7, 11, 13, 17, 19, 23, 29, 31, 37)]
        no += [Fraction(1, 2 * p) for p in (5, 7, 11, 13, 17)]
        no += [Fraction(1, 3 * p) for p in (5, 7, 11, 13, 17)]
        no += [Fraction(1, 36 * p) for p in (5, 7, 11, 13, 17)]
        assert len(no) == 25
        for v in no:
            assert svalues_member(mu.svalues, v).status == "no", v
        # the extension ratio is identically one, so its series diverges
        terms = mu.extension_ratio_terms(32)
        assert all(t == Fraction(1) for t in terms)
        for depth in range(1, 6):
            assert verify_invariance(
                mu, lambda d: vershik_successor(mu, d), depth
            )


def test_criterion_09_normalization_invariance(corpus_measures):
    with Timer(10.0, "criterion 9: verdicts invariant under eigenvector rescaling"):
        rng = random.Random(31)
        scales = [Fraction(rng.randint(1, 12), rng.randint(1, 12)) for _ in range(3)]
        base_good = [is_good(mu).status for mu in corpus_measures]
        for c in scales:
            for mu, expected in zip(corpus_measures, base_good):
                assert is_good(mu.rescaled(c)).status == expected
        pairs = [
            (corpus_measures[i], corpus_measures[j])
            for i in range(len(corpus_measures))
            for j in range(i, len(corpus_measures))
        ]
        rng.shuffle(pairs)
        for a, b in pairs[:12]:
            base = homeomorphic(a, b).verdict
            for c in scales[:2]:
                assert homeomorphic(a.rescaled(c), b.rescaled(c)).verdict == base


def test_criterion_10_unverified_by_design(mu3, mu4, capsys):
    with Timer(5.0, "criterion 10: companion-normalization claims recorded as excluded"):
        # The suite asserts only normalization-independent consequences for
        # the four-vertex family: the goodness split and the verdict.
        assert is_good(mu3).status == GOOD
        assert is_good(mu4).status == BAD
        assert homeomorphic(mu3, mu4).verdict == "not_homeomorphic"
        # Under this artifact's presentations the two values sets differ and
        # no rational rescaling reconciles them; the companion-paper equality
        # claim is therefore excluded rather than asserted, and the analyze
        # report says so.
        s3, s4 = clopen_values(mu3), clopen_values(mu4)
        assert svalues_equal(s3, s4) is False
        res = find_svalues_scale(s3, s4)
        assert res.definite and res.scale is None
        from bratteli.cli import main

        import json, tempfile, os

        doc = mu3.diagram.to_json_dict()
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "d.json")
            with open(path, "w") as fh:
                json.dump(doc, fh)
            assert main(["analyze", path]) == 0
        out = capsys.readouterr().out
        assert "not asserted" in out
        # orbit-equivalence statements are construction metadata only
        from bratteli import construct

        assert "orbit" not in " ".join(dir(construct)).lower()
