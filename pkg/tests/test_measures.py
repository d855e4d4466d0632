import math
from fractions import Fraction

import pytest

from irscales.errors import (
    InputError,
    MeasureError,
    MissingContextError,
    RecallBaseError,
    UndefinedNormalizationError,
)
from irscales.measures import Kind, Measure, eval_measure, rb_dependence_report
from irscales.serp import TopicContext, enumerate_universe

import oracles

RR = Measure(Kind.RR)
AP = Measure(Kind.AP)
RBP = Measure(Kind.RBP, p=0.5)
NDCG = Measure(Kind.NDCG)
ERR = Measure(Kind.ERR)


def ctx(rb, g_max=1):
    return TopicContext("t", rb, g_max)


def test_spec_examples():
    assert RR((0, 0, 1)) == pytest.approx(1 / 3)
    assert RBP((1, 1, 0)) == 0.75
    # AP oracle: (1/2) * (1/1 + 2/3)
    assert oracles.ap((1, 0, 1), 2) == Fraction(5, 6)
    assert AP((1, 0, 1), ctx(2)) == pytest.approx(5 / 6, rel=1e-15)


def test_score_carries_identity():
    s = eval_measure(AP, (1, 0, 1), ctx(2))
    assert s.measure is AP and s.topic.recall_base == 2


@pytest.mark.parametrize("k", range(1, 7))
def test_binary_measures_match_oracles(k):
    rb = k
    for serp in enumerate_universe(k, {0, 1}):
        assert RR(serp) == float(oracles.rr(serp))
        assert Measure(Kind.PRECISION, cutoff=k)(serp) == pytest.approx(float(oracles.precision(serp, k)))
        assert AP(serp, ctx(rb)) == pytest.approx(float(oracles.ap(serp, rb)), rel=1e-12)
        assert RBP(serp) == float(oracles.rbp(serp, Fraction(1, 2)))
        assert ERR(serp) == pytest.approx(float(oracles.err(serp)), rel=1e-12)
        assert NDCG(serp, ctx(rb)) == pytest.approx(oracles.ndcg(serp, rb), rel=1e-12)
        assert Measure(Kind.DCG)(serp) == pytest.approx(oracles.dcg(serp), rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_graded_measures_match_oracles(k):
    g_max = 2
    ndcg = Measure(Kind.NDCG, g_max=g_max)
    err = Measure(Kind.ERR, g_max=g_max)
    rbp = Measure(Kind.RBP, p=0.8, g_max=g_max)
    for serp in enumerate_universe(k, {0, 1, 2}):
        assert err(serp) == pytest.approx(float(oracles.err(serp, g_max)), rel=1e-12)
        assert rbp(serp) == pytest.approx(float(oracles.rbp(serp, Fraction(4, 5), g_max)), rel=1e-12)
        assert ndcg(serp, ctx(k, g_max)) == pytest.approx(oracles.ndcg(serp, k, g_max), rel=1e-12)


@pytest.mark.parametrize("k", range(1, 9))
def test_scores_in_unit_interval(k):
    measures = [RR, RBP, ERR, Measure(Kind.PRECISION, cutoff=k)]
    for serp in enumerate_universe(k, {0, 1}):
        for m in measures:
            assert 0.0 <= m(serp) <= 1.0
        assert 0.0 <= AP(serp, ctx(k)) <= 1.0
        assert 0.0 <= NDCG(serp, ctx(k)) <= 1.0 + 1e-12
        assert Measure(Kind.DCG)(serp) >= 0.0


@pytest.mark.parametrize("k", range(1, 7))
def test_flipping_a_zero_to_one_never_decreases(k):
    measures = [
        lambda s: Measure(Kind.PRECISION, cutoff=k)(s),
        lambda s: AP(s, ctx(k)),
        RBP,
        lambda s: NDCG(s, ctx(k)),
        ERR,
    ]
    for serp in enumerate_universe(k, {0, 1}):
        for i, g in enumerate(serp):
            if g == 0:
                better = serp[:i] + (1,) + serp[i + 1:]
                for m in measures:
                    assert m(better) >= m(serp) - 1e-15


@pytest.mark.parametrize("k", range(1, 11))
def test_rbp_half_yields_dyadic_rationals(k):
    values = {RBP(s) for s in enumerate_universe(k, {0, 1})}
    assert values == {j / 2**k for j in range(2**k)}


def test_cutoff_truncates_and_pads():
    p3 = Measure(Kind.PRECISION, cutoff=3)
    assert p3((1, 1, 1, 1, 1)) == 1.0
    assert p3((1,)) == pytest.approx(1 / 3)
    assert Measure(Kind.RR, cutoff=2)((0, 0, 1)) == 0.0


def test_rr_beyond_cutoff_is_zero():
    assert RR((0, 0, 0)) == 0.0


def test_rb_dependent_errors():
    with pytest.raises(MissingContextError):
        AP((1, 0))
    with pytest.raises(MissingContextError):
        NDCG((1, 0))
    with pytest.raises(RecallBaseError):
        AP((1, 1, 1), ctx(2))
    zero_gain = Measure(Kind.NDCG, gain=lambda g: 0.0)
    with pytest.raises(UndefinedNormalizationError):
        zero_gain((1, 0), ctx(1))


def test_ideal_dcg_uses_min_rb_k():
    # RB larger than k: ideal SERP is k top-grade documents
    assert NDCG((1, 1), ctx(5)) == pytest.approx(1.0)
    # RB smaller than k
    assert NDCG((0, 1, 0), ctx(1)) == pytest.approx(1 / math.log2(3))


def test_grade_above_gmax_rejected():
    with pytest.raises(MeasureError):
        RR((0, 2))


def test_measure_validation():
    with pytest.raises(InputError):
        Measure(Kind.RBP)
    with pytest.raises(InputError):
        Measure(Kind.RBP, p=1.0)
    with pytest.raises(InputError):
        Measure(Kind.RR, p=0.5)
    with pytest.raises(InputError):
        Measure(Kind.RR, cutoff=0)


@pytest.mark.parametrize(
    "text, kind, cutoff, name",
    [("rr", Kind.RR, None, "RR"), ("P@10", Kind.PRECISION, 10, "P@10"), ("rbp@5", Kind.RBP, 5, "RBP(p=0.5)@5"),
     ("nDCG", Kind.NDCG, None, "nDCG"), ("map", Kind.AP, None, "AP")],
)
def test_parse(text, kind, cutoff, name):
    m = Measure.parse(text)
    assert (m.kind, m.cutoff, m.name) == (kind, cutoff, name)


def test_parse_unknown():
    with pytest.raises(InputError):
        Measure.parse("bpref")


def test_rb_dependence_report():
    ap = rb_dependence_report(AP)
    assert ap.dependent and "RB" in ap.explanation
    assert not rb_dependence_report(RBP).dependent
    assert not rb_dependence_report(Measure(Kind.PRECISION, cutoff=5)).dependent
    assert rb_dependence_report(NDCG).dependent
    assert {k for k in Kind if Measure.parse(k.value).rb_dependent} == {Kind.AP, Kind.NDCG}
