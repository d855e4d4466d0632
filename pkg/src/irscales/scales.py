"""Achievable measurement points, interval-scale checks and intervalization.

For a finite, totally ordered set of achievable points, the solvability
requirement of a difference structure reduces to equal consecutive gaps.
``check_equispaced`` tests exactly that, within a relative tolerance.
"""

from __future__ import annotations

import bisect
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum

from .errors import DegenerateScaleError, UnachievableScoreError, UndefinedRatioError
from .measures import Measure, measure_value
from .serp import SerpUniverse, TopicContext

DEDUP_TOL = 1e-12
EQUISPACING_TOL = 1e-9


class ScaleType(str, Enum):
    NOMINAL = "nominal"
    ORDINAL = "ordinal"
    INTERVAL = "interval"
    RATIO = "ratio"

    @property
    def level(self) -> int:
        return list(ScaleType).index(self)


@dataclass(frozen=True)
class MeasurementScale:
    """Sorted distinct achievable scores of a measure over a universe."""

    points: tuple[float, ...]
    claimed_type: ScaleType = ScaleType.ORDINAL
    source: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("scale points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "claimed_type", ScaleType(self.claimed_type))

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    def index_of(self, value: float, tol: float = DEDUP_TOL) -> int:
        """Index of the point within ``tol`` of ``value``."""
        return _nearest(self.points, value, tol)


def _nearest(points: Sequence[float], value: float, tol: float) -> int:
    i = bisect.bisect_left(points, value)
    best = None
    for j in (i - 1, i):
        if 0 <= j < len(points) and abs(points[j] - value) <= tol:
            if best is None or abs(points[j] - value) < abs(points[best] - value):
                best = j
    if best is None:
        raise UnachievableScoreError(f"score {value!r} is not an achievable point")
    return best


def dedup_sorted(values, tol: float = DEDUP_TOL) -> tuple[float, ...]:
    """Sort ``values`` and merge runs closer than ``tol`` (absolute) into
    their smallest member."""
    out: list[float] = []
    prev = None
    for v in sorted(values):
        if prev is None or v - prev > tol:
            out.append(v)
        prev = v
    return tuple(out)


def achievable_points(
    m: Measure,
    universe: SerpUniverse,
    ctx: TopicContext | None = None,
    dedup_tol: float = DEDUP_TOL,
) -> MeasurementScale:
    """Scan the universe and collect the distinct scores of ``m``.

    Only the set of distinct values is kept in memory, never the SERPs.
    """
    seen = {measure_value(m, serp, ctx) for serp in universe}
    points = dedup_sorted(seen, dedup_tol)
    claimed = ScaleType.ORDINAL
    if len(points) >= 2 and check_equispaced(points).equispaced:
        claimed = ScaleType.INTERVAL
    source = {"measure": m.name, "universe": universe.describe()}
    if ctx is not None:
        source["topic"] = ctx.topic_id
        source["recall_base"] = ctx.recall_base
    return MeasurementScale(points, claimed, source)


def _points_of(scale) -> tuple[float, ...]:
    if isinstance(scale, MeasurementScale):
        return scale.points
    return tuple(float(x) for x in scale)


@dataclass(frozen=True)
class DifferenceStructure:
    points: tuple[float, ...]
    tolerance: float = EQUISPACING_TOL

    @property
    def gaps(self) -> tuple[float, ...]:
        p = self.points
        return tuple(b - a for a, b in zip(p, p[1:]))

    @property
    def mean_gap(self) -> float:
        return (self.points[-1] - self.points[0]) / (len(self.points) - 1)

    def deviations(self) -> tuple[float, ...]:
        mean = self.mean_gap
        return tuple(abs(g - mean) for g in self.gaps)

    def worst_gap(self) -> int:
        dev = self.deviations()
        return max(range(len(dev)), key=dev.__getitem__)

    @property
    def is_equispaced(self) -> bool:
        return max(self.deviations()) <= self.tolerance * self.mean_gap


@dataclass(frozen=True)
class EquispacingVerdict:
    equispaced: bool
    gaps: tuple[float, ...]
    mean_gap: float
    max_deviation: float
    worst_gap: int
    worst_pair: tuple[float, float]
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "equispaced": self.equispaced,
            "n_points": len(self.gaps) + 1,
            "mean_gap": self.mean_gap,
            "max_deviation": self.max_deviation,
            "worst_gap_index": self.worst_gap,
            "worst_gap_points": list(self.worst_pair),
            "worst_gap_width": self.gaps[self.worst_gap],
            "tolerance": self.tolerance,
        }


def check_equispaced(scale, tol: float = EQUISPACING_TOL) -> EquispacingVerdict:
    """Test whether consecutive gaps are all equal to the mean gap within
    ``tol`` times the mean gap.

    The worst gap is the one deviating most from the mean; it spans
    points ``worst_gap`` and ``worst_gap + 1``.
    """
    points = _points_of(scale)
    if len(points) < 2:
        raise DegenerateScaleError(f"equi-spacing needs at least 2 points, got {len(points)}")
    ds = DifferenceStructure(points, tol)
    w = ds.worst_gap()
    return EquispacingVerdict(
        equispaced=ds.is_equispaced,
        gaps=ds.gaps,
        mean_gap=ds.mean_gap,
        max_deviation=ds.deviations()[w],
        worst_gap=w,
        worst_pair=(points[w], points[w + 1]),
        tolerance=tol,
    )


@dataclass(frozen=True)
class AffineTransform:
    alpha: float
    beta: float
    max_residual: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"affine transforms need alpha > 0, got {self.alpha}")

    def __call__(self, x):
        if isinstance(x, (int, float)):
            return self.alpha * x + self.beta
        return [self.alpha * v + self.beta for v in x]


def check_affine_equivalent(a, b, tol: float = EQUISPACING_TOL) -> AffineTransform | None:
    """Find ``alpha > 0, beta`` with ``b[i] == alpha * a[i] + beta`` for all i.

    The pair is solved from the extreme points, then every interior point
    must match within ``tol`` times the span of ``b``.  Returns None when
    the point counts differ or no increasing affine map fits.
    """
    pa, pb = _points_of(a), _points_of(b)
    if len(pa) != len(pb) or len(pa) < 2:
        return None
    span_a = pa[-1] - pa[0]
    span_b = pb[-1] - pb[0]
    if span_a <= 0 or span_b <= 0:
        return None
    alpha = span_b / span_a
    beta = pb[0] - alpha * pa[0]
    residual = max(abs(alpha * x + beta - y) for x, y in zip(pa, pb))
    if residual > tol * span_b:
        return None
    return AffineTransform(alpha, beta, residual)


@dataclass(frozen=True)
class IntervalizedMapping:
    """Dense-rank mapping of achievable scores onto ``0..n-1``.

    Equal scores share one rank; with ``normalized`` the ranks are
    rescaled to ``[0, 1]``.
    """

    points: tuple[float, ...]
    normalized: bool = False
    measure: Measure | None = field(default=None, compare=False)
    ctx: TopicContext | None = field(default=None, compare=False)
    tol: float = DEDUP_TOL

    def __len__(self) -> int:
        return len(self.points)

    def _scaled(self, rank: int) -> float:
        if not self.normalized:
            return float(rank)
        n = len(self.points)
        return rank / (n - 1) if n > 1 else 0.0

    def rank_of(self, score: float) -> int:
        return _nearest(self.points, score, self.tol)

    def __call__(self, score: float) -> float:
        return self._scaled(self.rank_of(score))

    def map_serp(self, serp: Sequence[int]) -> float:
        if self.measure is None:
            raise ValueError("mapping was not built from a measure")
        return self(measure_value(self.measure, serp, self.ctx))

    @property
    def value_to_rank(self) -> dict[float, int]:
        return {p: i for i, p in enumerate(self.points)}

    def mapped_points(self) -> tuple[float, ...]:
        return tuple(self._scaled(i) for i in range(len(self.points)))

    def as_scale(self) -> MeasurementScale:
        return MeasurementScale(self.mapped_points(), ScaleType.INTERVAL, {"intervalized": True})

    def rows(self):
        for i, p in enumerate(self.points):
            yield p, i, self._scaled(i)


def intervalize_scale(scale, normalize: bool = False) -> IntervalizedMapping:
    return IntervalizedMapping(_points_of(scale), normalized=normalize)


def intervalize(
    m: Measure,
    universe: SerpUniverse,
    ctx: TopicContext | None = None,
    normalize: bool = False,
    dedup_tol: float = DEDUP_TOL,
) -> IntervalizedMapping:
    """Rank every achievable score of ``m`` over ``universe`` (dense ranks).

    The mapped scale is equi-spaced by construction and keeps the weak
    order the raw measure induces on SERPs.
    """
    scale = achievable_points(m, universe, ctx, dedup_tol)
    return IntervalizedMapping(scale.points, normalize, m, ctx, dedup_tol)


def ratio_of_intervals(phi, a, b, c, d) -> float:
    """``(phi[a] - phi[b]) / (phi[c] - phi[d])``.

    ``phi`` may be a scale, a sequence or a mapping; the keys index it.
    """
    if isinstance(phi, MeasurementScale):
        phi = phi.points
    den = phi[c] - phi[d]
    if den == 0:
        raise UndefinedRatioError(f"interval between {c!r} and {d!r} is zero")
    return (phi[a] - phi[b]) / den


def sign(x: float, tol: float = 0.0) -> int:
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


