import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irscales.errors import DegenerateScaleError, UnachievableScoreError, UndefinedRatioError
from irscales.measures import Kind, Measure
from irscales.scales import (
    AffineTransform,
    MeasurementScale,
    ScaleType,
    achievable_points,
    check_affine_equivalent,
    check_equispaced,
    dedup_sorted,
    intervalize,
    intervalize_scale,
    ratio_of_intervals,
)
from irscales.serp import SerpUniverse, TopicContext

import oracles

RR = Measure(Kind.RR)
RBP = Measure(Kind.RBP, p=0.5)


def test_rr_points_k3():
    # brute force over all 8 SERPs
    expected = sorted({oracles.rr(s) for s in oracles.brute_universe(3, [0, 1])})
    assert expected == [0, Fraction(1, 3), Fraction(1, 2), 1]
    scale = achievable_points(RR, SerpUniverse.binary(3))
    assert scale.points == tuple(float(x) for x in expected)
    assert scale.claimed_type is ScaleType.ORDINAL


def test_rbp_points_k2():
    scale = achievable_points(RBP, SerpUniverse.binary(2))
    assert scale.points == (0.0, 0.25, 0.5, 0.75)
    assert scale.claimed_type is ScaleType.INTERVAL


def test_p1_points():
    assert achievable_points(Measure(Kind.PRECISION, cutoff=1), SerpUniverse.binary(1)).points == (0.0, 1.0)


def test_points_for_rb_dependent_measure():
    scale = achievable_points(Measure(Kind.AP), SerpUniverse.binary(2), TopicContext("t", 2))
    # AP with RB=2, k=2: 00, 01 -> 1/4, 10 -> 1/2, 11 -> 1
    assert scale.points == (0.0, 0.25, 0.5, 1.0)
    assert scale.source["recall_base"] == 2


def test_rb_constrained_points():
    u = SerpUniverse.binary(3, constraint=1)
    scale = achievable_points(Measure(Kind.AP), u, TopicContext("t", 1))
    assert scale.points == pytest.approx((0.0, 1 / 3, 1 / 2, 1.0))


def test_equispaced_examples():
    assert check_equispaced([0, 0.25, 0.5, 0.75]).equispaced
    v = check_equispaced([0, 1 / 3, 1 / 2, 1])
    assert not v.equispaced
    assert v.gaps == pytest.approx((1 / 3, 1 / 6, 1 / 2))
    assert v.worst_gap == 2 and v.worst_pair == (0.5, 1.0)
    with pytest.raises(DegenerateScaleError):
        check_equispaced([5])


def test_equispacing_tolerance_is_relative():
    pts = [0, 1, 2 + 1e-10, 3]
    assert check_equispaced(pts, tol=1e-9).equispaced
    assert not check_equispaced(pts, tol=1e-11).equispaced
    scaled = [x * 1e-6 for x in pts]
    assert check_equispaced(scaled, tol=1e-9).equispaced


def test_affine_examples():
    fit = check_affine_equivalent([1, 2, 3], [3, 5, 7])
    assert (fit.alpha, fit.beta) == (2.0, 1.0)
    # solving from the extremes gives alpha=3, beta=0; the interior point 1/3 -> 1 misses 1
    assert check_affine_equivalent([0, 1 / 3, 1 / 2, 1], [0, 1, 2, 3]) is None
    fit = check_affine_equivalent([0, 0.25, 0.5, 0.75], [0, 0.25, 0.5, 0.75])
    assert (fit.alpha, fit.beta) == (1.0, 0.0)


def test_affine_count_mismatch_and_degenerate():
    assert check_affine_equivalent([0, 1], [0, 1, 2]) is None
    assert check_affine_equivalent([1], [2]) is None


def test_affine_transform_requires_positive_alpha():
    with pytest.raises(ValueError):
        AffineTransform(0.0, 1.0)
    assert AffineTransform(2, 1)([0, 1]) == [1, 3]


strictly_increasing = st.lists(
    st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=30, unique=True
).map(sorted).filter(lambda xs: min(b - a for a, b in zip(xs, xs[1:])) > 1e-6)


@settings(max_examples=1000, deadline=None)
@given(
    pts=strictly_increasing,
    alpha=st.floats(1e-2, 1e2),
    beta=st.floats(-100, 100),
)
def test_affine_fit_recovers_parameters(pts, alpha, beta):
    image = [alpha * x + beta for x in pts]
    fit = check_affine_equivalent(pts, image)
    assert fit is not None
    assert fit.alpha == pytest.approx(alpha, rel=1e-6)
    assert fit.beta == pytest.approx(beta, rel=1e-6, abs=1e-6 * (1 + abs(alpha) * max(map(abs, pts))))


def test_intervalize_rr_k3():
    mp = intervalize(RR, SerpUniverse.binary(3))
    assert [mp(v) for v in (0, 1 / 3, 1 / 2, 1)] == [0, 1, 2, 3]
    assert mp.map_serp((0, 1, 1)) == 2
    assert mp.value_to_rank == {0.0: 0, 1 / 3: 1, 0.5: 2, 1.0: 3}


def test_intervalize_p1():
    mp = intervalize(Measure(Kind.PRECISION, cutoff=1), SerpUniverse.binary(1))
    assert mp.mapped_points() == (0.0, 1.0)


def test_intervalize_rbp_is_affine_image_of_raw():
    raw = achievable_points(RBP, SerpUniverse.binary(2))
    mp = intervalize(RBP, SerpUniverse.binary(2))
    fit = check_affine_equivalent(raw, mp.mapped_points())
    assert (fit.alpha, fit.beta) == (4.0, 0.0)


def test_normalized_ranks():
    mp = intervalize(RR, SerpUniverse.binary(3), normalize=True)
    assert mp.mapped_points() == pytest.approx((0, 1 / 3, 2 / 3, 1))
    assert check_equispaced(mp.mapped_points()).equispaced
    assert check_affine_equivalent(intervalize(RR, SerpUniverse.binary(3)).mapped_points(), mp.mapped_points())


def test_unachievable_score():
    mp = intervalize(RR, SerpUniverse.binary(3))
    with pytest.raises(UnachievableScoreError):
        mp(0.4)


@pytest.mark.parametrize("kind", [Kind.RR, Kind.ERR, Kind.DCG])
def test_graded_order_preservation(kind):
    m = Measure(kind, g_max=2)
    u = SerpUniverse.graded(3, 2)
    mp = intervalize(m, u)
    serps = list(u)
    scores = [m(s) for s in serps]
    ranks = [mp(v) for v in scores]
    for i in range(len(serps)):
        for j in range(len(serps)):
            ds = scores[i] - scores[j]
            dr = ranks[i] - ranks[j]
            sgn = 0 if abs(ds) <= 1e-12 else (1 if ds > 0 else -1)
            assert sgn == (dr > 0) - (dr < 0)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 40), start=st.floats(-100, 100), step=st.floats(1e-3, 1e3))
def test_intervalizing_an_equispaced_scale_is_affine(n, start, step):
    pts = [start + i * step for i in range(n)]
    mp = intervalize_scale(pts)
    assert check_affine_equivalent(pts, mp.mapped_points()) is not None


def test_ratio_of_intervals_examples():
    celsius = {"rome": 20, "oslo": 10, "rome_then": 12, "oslo_then": 7}
    assert ratio_of_intervals(celsius, "rome", "oslo", "rome_then", "oslo_then") == 2
    fahrenheit = {"rome": 68, "oslo": 50, "rome_then": 53.6, "oslo_then": 44.6}
    assert ratio_of_intervals(fahrenheit, "rome", "oslo", "rome_then", "oslo_then") == pytest.approx(2, rel=1e-9)
    assert ratio_of_intervals([3, 1, 4, 1], 0, 0, 2, 3) == 0
    with pytest.raises(UndefinedRatioError):
        ratio_of_intervals([1, 2, 2], 0, 1, 1, 2)


def test_ratio_of_intervals_on_scale():
    scale = MeasurementScale((0.0, 0.25, 0.5, 0.75))
    assert ratio_of_intervals(scale, 3, 1, 1, 0) == 2


def test_ratio_invariance_random():
    rng = random.Random(7)
    for _ in range(2000):
        phi = [rng.uniform(-50, 50) for _ in range(6)]
        a, b, c, d = (rng.randrange(6) for _ in range(4))
        if abs(phi[c] - phi[d]) < 1e-3:
            continue
        alpha, beta = 10 ** rng.uniform(-2, 2), rng.uniform(-100, 100)
        moved = [alpha * x + beta for x in phi]
        assert ratio_of_intervals(moved, a, b, c, d) == pytest.approx(
            ratio_of_intervals(phi, a, b, c, d), rel=1e-9, abs=1e-9
        )


def test_dedup_merges_float_noise():
    assert dedup_sorted([0.3, 0.1 + 0.2, 0.5]) == (0.3, 0.5)


def test_scale_rejects_unsorted_points():
    with pytest.raises(ValueError):
        MeasurementScale((0.5, 0.25))
