"""Comparative harness: raw vs intervalized scoring of real runs.

Runs are scored per topic into a system x topic matrix, the matrix is
mapped through the measure's intervalization, and both versions are
compared: system means and rankings, Kendall's tau-b between rankings,
and paired t-tests and exact sign tests for every system pair.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from scipy import stats

from .errors import (
    InputError,
    InsufficientDataError,
    IRScalesError,
    RecallBaseError,
    UnachievableScoreError,
)
from .measures import Measure
from .scales import DEDUP_TOL, IntervalizedMapping, intervalize
from .serp import DEFAULT_UNIVERSE_CAP, SerpUniverse, TopicContext
from .trec import Qrels, Run, sort_topics

SCHEMA_VERSION = 1

UNJUDGED_NOTE = "unjudged documents are scored as grade 0"


def rb_warning(m: Measure) -> str:
    return (
        f"{m.name} is normalized by the recall base: every topic has its own set "
        "of achievable scores, so its scale differs from topic to topic and "
        "cross-topic means mix different scales"
    )


@dataclass
class ScoreMatrix:
    """Scores per (system, topic); missing cells are absent, never zero."""

    systems: list[str]
    topics: list[str]
    cells: dict[tuple[str, str], float]
    measure: Measure
    intervalized: bool = False
    warnings: list[str] = field(default_factory=list)
    errors: dict[str, str] = field(default_factory=dict)

    def get(self, system: str, topic: str) -> float | None:
        return self.cells.get((system, topic))

    def row(self, system: str) -> list[float | None]:
        return [self.get(system, t) for t in self.topics]

    def column(self, topic: str) -> list[float | None]:
        return [self.get(s, topic) for s in self.systems]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["system", *self.topics])
        for s in self.systems:
            w.writerow([s, *("" if v is None else repr(v) for v in self.row(s))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "measure": self.measure.name,
            "intervalized": self.intervalized,
            "systems": self.systems,
            "topics": self.topics,
            "cells": {s: self.row(s) for s in self.systems},
            "warnings": self.warnings,
            "errors": self.errors,
        }


def _with_cutoff(m: Measure, k: int) -> Measure:
    return m if m.cutoff == k else dataclasses.replace(m, cutoff=k)


def score_runs(
    runs: Mapping[str, Run] | Sequence[Run],
    qrels: Qrels,
    m: Measure,
    k: int,
) -> ScoreMatrix:
    """Score every system on every judged topic at cutoff ``k``."""
    if not isinstance(runs, Mapping):
        runs = {r.name: r for r in runs}
    m = _with_cutoff(m, k)
    topics = qrels.topics
    known = set(topics)
    warnings = [UNJUDGED_NOTE]
    if m.rb_dependent:
        warnings.append(rb_warning(m))
    errors: dict[str, str] = {}
    cells: dict[tuple[str, str], float] = {}
    clipped: set[str] = set()

    for name, run in runs.items():
        extra = [t for t in run.topics if t not in known]
        if extra:
            raise InputError(f"run {name!r} has topics without qrels: {', '.join(sort_topics(extra))}")

    for topic in topics:
        ctx = None
        if m.rb_dependent:
            try:
                ctx = qrels.context(topic, m.g_max)
            except IRScalesError as exc:
                errors[topic] = str(exc)
                continue
        for name, run in runs.items():
            docs = run.docs(topic)
            if not docs:
                warnings.append(f"system {name!r} retrieved nothing for topic {topic}; cell left empty")
                continue
            serp = qrels.serp(topic, docs, k)
            if max(serp) > m.g_max:
                clipped.add(topic)
                serp = tuple(min(g, m.g_max) for g in serp)
            cells[(name, topic)] = m(serp, ctx)

    if clipped:
        warnings.append(
            f"grades above g_max={m.g_max} were clipped to {m.g_max} on topics "
            + ", ".join(sort_topics(clipped))
        )
    return ScoreMatrix(list(runs), topics, cells, m, False, warnings, errors)


def intervalize_matrix(
    matrix: ScoreMatrix,
    m: Measure,
    k: int,
    grade_set: Sequence[int],
    qrels: Qrels | None = None,
    rb_constrained: bool = False,
    normalize: bool = False,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> ScoreMatrix:
    """Replace every cell by its dense rank in the measure's universe mapping.

    Recall-base dependent measures get one mapping per recall base, so
    ``qrels`` is required for them.  With ``rb_constrained`` the universe
    for a topic is restricted to SERPs holding at most RB relevant documents.
    """
    m = _with_cutoff(m, k)
    grade_set = tuple(sorted(set(grade_set)))
    if m.rb_dependent and qrels is None:
        raise InputError(f"{m.name} depends on the recall base; qrels are required")

    cache: dict[int | None, IntervalizedMapping] = {}

    def mapping_for(topic: str) -> IntervalizedMapping:
        rb = qrels.recall_base(topic) if m.rb_dependent else None
        if rb not in cache:
            ctx = TopicContext(topic, rb, m.g_max) if rb is not None else None
            constraint = rb if (rb is not None and rb_constrained) else None
            universe = SerpUniverse(k, grade_set, constraint, cap)
            try:
                cache[rb] = intervalize(m, universe, ctx, normalize)
            except RecallBaseError as exc:
                raise RecallBaseError(
                    f"{exc}; topic {topic} has fewer relevant documents than k={k}, "
                    "so its universe must be RB-constrained (rb_constrained=True)"
                ) from None
        return cache[rb]

    cells = {}
    for (system, topic), value in matrix.cells.items():
        mp = mapping_for(topic)
        try:
            cells[(system, topic)] = mp(value)
        except UnachievableScoreError:
            raise UnachievableScoreError(
                f"score {value!r} of {system!r} on topic {topic} is not an achievable "
                f"{m.name} value for k={k} and grades {list(grade_set)}"
            ) from None
    return ScoreMatrix(
        list(matrix.systems),
        list(matrix.topics),
        cells,
        m,
        True,
        list(matrix.warnings),
        dict(matrix.errors),
    )


# -- statistics --------------------------------------------------------------


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Kendall's tau-b with tie correction; None when either side is
    constant (undefined)."""
    if len(x) != len(y):
        raise ValueError("sequences differ in length")
    concordant = discordant = ties_x = ties_y = 0
    for i, j in combinations(range(len(x)), 2):
        dx = x[i] - x[j]
        dy = y[i] - y[j]
        if dx == 0 and dy == 0:
            continue
        if dx == 0:
            ties_x += 1
        elif dy == 0:
            ties_y += 1
        elif (dx > 0) == (dy > 0):
            concordant += 1
        else:
            discordant += 1
    denom = math.sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y))
    if denom == 0:
        return None
    return (concordant - discordant) / denom


def sign_test(diffs: Sequence[float], tol: float = DEDUP_TOL) -> tuple[int, int, float]:
    """Exact two-sided sign test; zero differences are dropped.

    Returns ``(n_positive, n_negative, p_value)``.
    """
    pos = sum(1 for d in diffs if d > tol)
    neg = sum(1 for d in diffs if d < -tol)
    n = pos + neg
    if n == 0:
        return pos, neg, 1.0
    tail = sum(math.comb(n, i) for i in range(min(pos, neg) + 1))
    return pos, neg, min(1.0, 2 * tail / 2**n)


@dataclass(frozen=True)
class TTest:
    statistic: float | None
    p_value: float | None
    degenerate: bool

    def significant(self, alpha: float) -> bool:
        return not self.degenerate and self.p_value < alpha

    def to_dict(self) -> dict:
        return {"t": self.statistic, "p_value": self.p_value, "degenerate": self.degenerate}


def paired_t_test(diffs: Sequence[float], tol: float = DEDUP_TOL) -> TTest:
    """Two-sided one-sample t-test of the paired differences against 0.

    Fewer than two differences, or differences that are all equal, make
    the test degenerate rather than significant.
    """
    if len(diffs) < 2 or max(diffs) - min(diffs) <= tol:
        return TTest(None, None, True)
    res = stats.ttest_1samp(diffs, 0.0)
    return TTest(float(res.statistic), float(res.pvalue), False)


@dataclass(frozen=True)
class PairComparison:
    a: str
    b: str
    n_topics: int
    raw_t: TTest
    iv_t: TTest
    raw_sign: tuple[int, int, float]
    iv_sign: tuple[int, int, float]

    def to_dict(self, alpha: float) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "n_topics": self.n_topics,
            "raw_ttest": self.raw_t.to_dict() | {"significant": self.raw_t.significant(alpha)},
            "intervalized_ttest": self.iv_t.to_dict() | {"significant": self.iv_t.significant(alpha)},
            "raw_sign_test": _sign_dict(self.raw_sign, alpha),
            "intervalized_sign_test": _sign_dict(self.iv_sign, alpha),
        }


def _sign_dict(res, alpha):
    pos, neg, p = res
    return {"wins": pos, "losses": neg, "p_value": p, "significant": p < alpha}


@dataclass(frozen=True)
class ComparisonReport:
    measure: str
    alpha: float
    systems: list[str]
    raw_means: dict[str, float | None]
    iv_means: dict[str, float | None]
    coverage: dict[str, int]
    raw_ranking: list[str]
    iv_ranking: list[str]
    tau_b: float | None
    pairs: list[PairComparison]
    warnings: list[str]

    def _disagree(self, attr_raw, attr_iv) -> list[tuple[str, str]]:
        out = []
        for pc in self.pairs:
            r, v = getattr(pc, attr_raw), getattr(pc, attr_iv)
            if isinstance(r, TTest):
                if r.significant(self.alpha) != v.significant(self.alpha):
                    out.append((pc.a, pc.b))
            elif (r[2] < self.alpha) != (v[2] < self.alpha):
                out.append((pc.a, pc.b))
        return out

    @property
    def ttest_disagreements(self) -> list[tuple[str, str]]:
        return self._disagree("raw_t", "iv_t")

    @property
    def sign_disagreements(self) -> list[tuple[str, str]]:
        return self._disagree("raw_sign", "iv_sign")

    def to_dict(self) -> dict:
        n = len(self.pairs)
        t_dis = self.ttest_disagreements
        s_dis = self.sign_disagreements
        return {
            "schema_version": SCHEMA_VERSION,
            "measure": self.measure,
            "alpha": self.alpha,
            "notes": [UNJUDGED_NOTE],
            "systems": [
                {
                    "system": s,
                    "raw_mean": self.raw_means[s],
                    "intervalized_mean": self.iv_means[s],
                    "n_topics": self.coverage[s],
                }
                for s in self.systems
            ],
            "raw_ranking": self.raw_ranking,
            "intervalized_ranking": self.iv_ranking,
            "kendall_tau_b": self.tau_b,
            "pairs": [pc.to_dict(self.alpha) for pc in self.pairs],
            "ttest_agreements": n - len(t_dis),
            "ttest_disagreements": [list(p) for p in t_dis],
            "sign_agreements": n - len(s_dis),
            "sign_disagreements": [list(p) for p in s_dis],
            "warnings": self.warnings,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([
            "a", "b", "n_topics",
            "raw_t_p", "iv_t_p", "raw_t_sig", "iv_t_sig",
            "raw_sign_p", "iv_sign_p", "raw_sign_sig", "iv_sign_sig",
        ])
        for pc in self.pairs:
            w.writerow([
                pc.a, pc.b, pc.n_topics,
                "degenerate" if pc.raw_t.degenerate else repr(pc.raw_t.p_value),
                "degenerate" if pc.iv_t.degenerate else repr(pc.iv_t.p_value),
                int(pc.raw_t.significant(self.alpha)), int(pc.iv_t.significant(self.alpha)),
                repr(pc.raw_sign[2]), repr(pc.iv_sign[2]),
                int(pc.raw_sign[2] < self.alpha), int(pc.iv_sign[2] < self.alpha),
            ])
        return buf.getvalue()


def _means(matrix: ScoreMatrix) -> tuple[dict[str, float | None], dict[str, int]]:
    means, counts = {}, {}
    for s in matrix.systems:
        vals = [v for v in matrix.row(s) if v is not None]
        counts[s] = len(vals)
        means[s] = math.fsum(vals) / len(vals) if vals else None
    return means, counts


def _ranking(means: Mapping[str, float | None]) -> list[str]:
    return sorted(means, key=lambda s: (means[s] is None, -(means[s] or 0.0), s))


def compare(raw: ScoreMatrix, iv: ScoreMatrix, alpha: float = 0.05) -> ComparisonReport:
    """Compare raw and intervalized scorings of the same runs."""
    if raw.systems != iv.systems or raw.topics != iv.topics:
        raise InputError("raw and intervalized matrices must share systems and topics")
    if set(raw.cells) != set(iv.cells):
        raise InputError("raw and intervalized matrices have different absent cells")
    if len(raw.systems) < 2 or len(raw.topics) < 2:
        raise InsufficientDataError(
            f"need at least 2 systems and 2 topics, got {len(raw.systems)} and {len(raw.topics)}"
        )
    if not 0.0 < alpha < 1.0:
        raise InputError(f"significance level must lie in (0, 1), got {alpha}")

    raw_means, coverage = _means(raw)
    iv_means, _ = _means(iv)
    both = [s for s in raw.systems if raw_means[s] is not None]
    tau = kendall_tau_b([raw_means[s] for s in both], [iv_means[s] for s in both])

    pairs = []
    for a, b in combinations(raw.systems, 2):
        shared = [t for t in raw.topics if (a, t) in raw.cells and (b, t) in raw.cells]
        d_raw = [raw.cells[(a, t)] - raw.cells[(b, t)] for t in shared]
        d_iv = [iv.cells[(a, t)] - iv.cells[(b, t)] for t in shared]
        pairs.append(
            PairComparison(
                a, b, len(shared),
                paired_t_test(d_raw), paired_t_test(d_iv),
                sign_test(d_raw), sign_test(d_iv),
            )
        )

    warnings = list(dict.fromkeys(raw.warnings + iv.warnings))
    return ComparisonReport(
        raw.measure.name,
        alpha,
        list(raw.systems),
        raw_means,
        iv_means,
        coverage,
        _ranking(raw_means),
        _ranking(iv_means),
        tau,
        pairs,
        warnings,
    )
