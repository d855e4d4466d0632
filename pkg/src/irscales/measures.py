"""IR effectiveness measures over SERPs of relevance grades.

All measures are evaluated on the first ``cutoff`` positions of a SERP
(the whole SERP when no cutoff is set).  Positions missing from a SERP
shorter than the cutoff count as not relevant.  Binary measures (P@k, RR,
AP) treat any grade above zero as relevant.
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import (
    InputError,
    MeasureError,
    MissingContextError,
    RecallBaseError,
    UndefinedNormalizationError,
)
from .serp import TopicContext


class Kind(str, Enum):
    PRECISION = "P"
    RR = "RR"
    AP = "AP"
    DCG = "DCG"
    NDCG = "nDCG"
    RBP = "RBP"
    ERR = "ERR"


# measures whose formula references the recall base or an ideal ranking
RB_DEPENDENT = frozenset({Kind.AP, Kind.NDCG})

_ALIASES = {
    "p": Kind.PRECISION,
    "prec": Kind.PRECISION,
    "precision": Kind.PRECISION,
    "rr": Kind.RR,
    "mrr": Kind.RR,
    "ap": Kind.AP,
    "map": Kind.AP,
    "dcg": Kind.DCG,
    "ndcg": Kind.NDCG,
    "rbp": Kind.RBP,
    "err": Kind.ERR,
}


def exponential_gain(grade: int) -> float:
    return float(2**grade - 1)


@dataclass(frozen=True)
class Measure:
    """A named, parameterized scoring function over SERPs.

    ``gain`` only affects DCG and nDCG; ERR always uses the exponential
    stopping probability ``(2**g - 1) / 2**g_max``.
    """

    kind: Kind
    cutoff: int | None = None
    p: float | None = None
    g_max: int = 1
    gain: Callable[[int], float] = exponential_gain

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.RBP:
            if self.p is None or not 0.0 < self.p < 1.0:
                raise InputError(f"RBP needs a persistence 0 < p < 1, got {self.p}")
        elif self.p is not None:
            raise InputError(f"{self.kind.value} takes no persistence parameter")
        if self.cutoff is not None and self.cutoff < 1:
            raise InputError(f"cutoff must be >= 1, got {self.cutoff}")
        if self.g_max < 1:
            raise InputError(f"g_max must be >= 1, got {self.g_max}")

    @classmethod
    def parse(
        cls, name: str, *, cutoff: int | None = None, p: float | None = None, g_max: int = 1
    ) -> Measure:
        """Build a measure from a name such as ``rr``, ``P@10`` or ``rbp``.

        A ``@k`` suffix sets the cutoff unless ``cutoff`` is given.
        """
        m = re.fullmatch(r"\s*([A-Za-z]+)\s*(?:@\s*(\d+))?\s*", name)
        if not m or m.group(1).lower() not in _ALIASES:
            raise InputError(f"unknown measure {name!r}")
        kind = _ALIASES[m.group(1).lower()]
        if cutoff is None and m.group(2):
            cutoff = int(m.group(2))
        if kind is Kind.RBP and p is None:
            p = 0.5
        if kind is not Kind.RBP:
            p = None
        return cls(kind, cutoff=cutoff, p=p, g_max=g_max)

    @property
    def rb_dependent(self) -> bool:
        return self.kind in RB_DEPENDENT

    @property
    def name(self) -> str:
        s = self.kind.value
        if self.kind is Kind.RBP:
            s += f"(p={self.p:g})"
        if self.cutoff is not None:
            s += f"@{self.cutoff}"
        return s

    def __str__(self) -> str:
        return self.name

    def __call__(self, serp: Sequence[int], ctx: TopicContext | None = None) -> float:
        return measure_value(self, serp, ctx)


@dataclass(frozen=True)
class Score:
    value: float
    measure: Measure
    topic: TopicContext | None = None


def _truncate(m: Measure, serp: Sequence[int]) -> tuple[list[int], int]:
    if not len(serp):
        raise InputError("cannot score an empty SERP")
    depth = m.cutoff if m.cutoff is not None else len(serp)
    grades = list(serp[:depth])
    for g in grades:
        if g < 0 or g > m.g_max:
            raise MeasureError(f"grade {g} outside 0..{m.g_max} for {m.name}")
    return grades, depth


def _recall_base(m: Measure, grades: list[int], ctx: TopicContext | None) -> int:
    if ctx is None:
        raise MissingContextError(f"{m.name} depends on the recall base; a topic context is required")
    rel = sum(1 for g in grades if g > 0)
    if rel > ctx.recall_base:
        raise RecallBaseError(
            f"{m.name}: SERP holds {rel} relevant documents but topic "
            f"{ctx.topic_id!r} has recall base {ctx.recall_base}"
        )
    return ctx.recall_base


def _dcg(m: Measure, grades: list[int]) -> float:
    total = 0.0
    for i, g in enumerate(grades, start=1):
        if g:
            total += m.gain(g) / math.log2(i + 1)
    return total


def measure_value(m: Measure, serp: Sequence[int], ctx: TopicContext | None = None) -> float:
    """Score ``serp`` under ``m``, returning a bare float."""
    grades, depth = _truncate(m, serp)
    kind = m.kind

    if kind is Kind.PRECISION:
        return sum(1 for g in grades if g > 0) / depth

    if kind is Kind.RR:
        for i, g in enumerate(grades, start=1):
            if g > 0:
                return 1.0 / i
        return 0.0

    if kind is Kind.AP:
        rb = _recall_base(m, grades, ctx)
        hits = 0
        total = 0.0
        for i, g in enumerate(grades, start=1):
            if g > 0:
                hits += 1
                total += hits / i
        return total / rb

    if kind is Kind.DCG:
        return _dcg(m, grades)

    if kind is Kind.NDCG:
        rb = _recall_base(m, grades, ctx)
        ideal = [m.g_max] * min(rb, depth)
        idcg = _dcg(m, ideal)
        if idcg <= 0.0:
            raise UndefinedNormalizationError(f"{m.name}: ideal DCG is zero")
        return _dcg(m, grades) / idcg

    if kind is Kind.RBP:
        p = m.p
        total = 0.0
        weight = 1.0
        for g in grades:
            if g:
                total += (g / m.g_max) * weight
            weight *= p
        return (1.0 - p) * total

    if kind is Kind.ERR:
        denom = 2.0**m.g_max
        total = 0.0
        not_stopped = 1.0
        for i, g in enumerate(grades, start=1):
            r = (2.0**g - 1.0) / denom
            total += not_stopped * r / i
            not_stopped *= 1.0 - r
        return total

    raise MeasureError(f"unsupported measure {kind}")  # pragma: no cover


def eval_measure(m: Measure, serp: Sequence[int], ctx: TopicContext | None = None) -> Score:
    return Score(measure_value(m, serp, ctx), m, ctx)


class RBDependence(NamedTuple):
    dependent: bool
    explanation: str


_EXPLANATIONS = {
    Kind.PRECISION: "no recall-base term: relevant count in the top k divided by k",
    Kind.RR: "no recall-base term: reciprocal of the first relevant rank",
    Kind.AP: "normalized by RB: the sum of precisions at relevant ranks is divided by the recall base",
    Kind.DCG: "no recall-base term: unnormalized discounted gain",
    Kind.NDCG: "normalized by RB: the ideal DCG is built from min(RB, k) top-grade documents",
    Kind.RBP: "no recall-base term: geometric weights (1-p)p^(i-1) depend only on rank",
    Kind.ERR: "no recall-base term: cascade stopping probabilities depend only on grades above",
}


def rb_dependence_report(m: Measure) -> RBDependence:
    """Whether ``m`` yields a different scale per topic via the recall base."""
    return RBDependence(m.rb_dependent, _EXPLANATIONS[m.kind])


ALL_KINDS = tuple(Kind)
