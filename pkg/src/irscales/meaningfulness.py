"""Meaningfulness of statistical statements over score samples.

A statement is meaningful when its truth value survives every
permissible transformation of the underlying scale.  Statements whose
statistic is allowable for the claimed scale type are accepted by rule;
everything else is attacked with a few fixed witnesses followed by
seeded random members of the transformation family.  Sampling can only
refute, so a clean run reports "no counterexample found", not a proof.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Protocol

import numpy as np

from .errors import InputError, StatisticError, UndefinedRatioError
from .scales import ScaleType

REL_TOL = 1e-9


class Statistic(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"
    QUANTILE = "quantile"
    GEOMEAN = "geomean"
    HARMEAN = "harmean"
    MODE = "mode"
    DIFFRATIO = "diffratio"


class Relation(str, Enum):
    LT = "<"
    EQ = "="
    GT = ">"


class Outcome(str, Enum):
    BY_RULE = "meaningful-by-rule"
    NO_COUNTEREXAMPLE = "no-counterexample-found"
    REFUTED = "refuted"


# statistics allowable at each scale level; each level inherits the ones below
_ALLOWED = {
    ScaleType.NOMINAL: {Statistic.MODE},
    ScaleType.ORDINAL: {Statistic.MEDIAN, Statistic.QUANTILE},
    ScaleType.INTERVAL: {Statistic.MEAN, Statistic.DIFFRATIO},
    ScaleType.RATIO: {Statistic.GEOMEAN, Statistic.HARMEAN},
}


def allowable_statistics(scale_type: ScaleType) -> frozenset[Statistic]:
    scale_type = ScaleType(scale_type)
    out: set[Statistic] = set()
    for st in ScaleType:
        if st.level <= scale_type.level:
            out |= _ALLOWED[st]
    return frozenset(out)


SampleRef = tuple[str, int]


@dataclass(frozen=True)
class Statement:
    """A comparison of one statistic over two samples.

    For ``diffratio`` the left side is ``(A[i] - A[j]) / (B[k] - B[l])``
    built from ``quad`` and the right side is the constant ``target``.
    Sample indices are 0-based.
    """

    statistic: Statistic
    relation: Relation
    lhs: str | None = None
    rhs: str | None = None
    q: float | None = None
    quad: tuple[SampleRef, SampleRef, SampleRef, SampleRef] | None = None
    target: float | None = None
    rel_tol: float = REL_TOL

    def __post_init__(self):
        object.__setattr__(self, "statistic", Statistic(self.statistic))
        object.__setattr__(self, "relation", Relation(self.relation))
        if self.statistic is Statistic.DIFFRATIO:
            if self.quad is None or self.target is None:
                raise InputError("diffratio statements need four sample references and a constant")
        elif self.lhs is None or self.rhs is None:
            raise InputError(f"{self.statistic.value} statements need two samples")
        if self.statistic is Statistic.QUANTILE:
            if self.q is None or not 0.0 <= self.q <= 1.0:
                raise InputError(f"quantile level must lie in [0, 1], got {self.q}")
        if not self.rel_tol > 0:
            raise InputError("equality tolerance must be positive")

    @property
    def sample_names(self) -> tuple[str, ...]:
        if self.statistic is Statistic.DIFFRATIO:
            names = [ref[0] for ref in self.quad]
        else:
            names = [self.lhs, self.rhs]
        return tuple(dict.fromkeys(names))

    def _call(self, name: str) -> str:
        if self.statistic is Statistic.QUANTILE:
            return f"quantile({name}, {self.q:g})"
        return f"{self.statistic.value}({name})"

    def __str__(self) -> str:
        if self.statistic is Statistic.DIFFRATIO:
            a, b, c, d = (f"{n}[{i}]" for n, i in self.quad)
            return f"diffratio({a},{b};{c},{d}) {self.relation.value} {self.target:g}"
        return f"{self._call(self.lhs)} {self.relation.value} {self._call(self.rhs)}"


# -- statistics --------------------------------------------------------------


def _require(values: Sequence, name: str) -> list:
    if len(values) == 0:
        raise StatisticError(f"sample {name!r} is empty")
    return list(values)


def _positive(values: list, stat: str, name: str):
    if any(v <= 0 for v in values):
        raise StatisticError(f"{stat} of sample {name!r} needs strictly positive values")


def _median(xs: list):
    xs = sorted(xs)
    n = len(xs)
    mid = n // 2
    if n % 2:
        return xs[mid]
    return (xs[mid - 1] + xs[mid]) / 2


def _quantile(xs: list, q: float):
    # linear interpolation between order statistics at h = (n - 1) q
    xs = sorted(xs)
    h = (len(xs) - 1) * (Fraction(q) if isinstance(xs[0], Fraction) else q)
    lo = math.floor(h)
    if lo >= len(xs) - 1:
        return xs[-1]
    return xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo])


def _mode(xs: list):
    counts = Counter(xs)
    top = max(counts.values())
    return min(v for v, c in counts.items() if c == top)


def _stat(st: Statement, values: Sequence, name: str):
    xs = _require(values, name)
    stat = st.statistic
    if stat is Statistic.MEAN:
        return sum(xs) / len(xs)
    if stat is Statistic.MEDIAN:
        return _median(xs)
    if stat is Statistic.QUANTILE:
        return _quantile(xs, st.q)
    if stat is Statistic.MODE:
        return _mode(xs)
    if stat is Statistic.GEOMEAN:
        _positive(xs, "geometric mean", name)
        return math.exp(math.fsum(math.log(x) for x in xs) / len(xs))
    if stat is Statistic.HARMEAN:
        _positive(xs, "harmonic mean", name)
        return len(xs) / sum(1 / x for x in xs)
    raise StatisticError(f"unsupported statistic {stat}")  # pragma: no cover


def _lookup(samples: Mapping[str, Sequence], name: str) -> Sequence:
    try:
        return samples[name]
    except KeyError:
        raise InputError(f"unresolved sample {name!r}") from None


def _diffratio(st: Statement, samples):
    vals = []
    for name, idx in st.quad:
        xs = _lookup(samples, name)
        if not -len(xs) <= idx < len(xs):
            raise InputError(f"index {idx} out of range for sample {name!r}")
        vals.append(xs[idx])
    a, b, c, d = vals
    if c == d:
        raise UndefinedRatioError("diffratio denominator interval is zero")
    return (a - b) / (c - d)


def statement_values(st: Statement, samples: Mapping[str, Sequence]) -> tuple[float, float]:
    """The two numbers a statement compares."""
    if st.statistic is Statistic.DIFFRATIO:
        return _diffratio(st, samples), st.target
    return (
        _stat(st, _lookup(samples, st.lhs), st.lhs),
        _stat(st, _lookup(samples, st.rhs), st.rhs),
    )


def _holds(lhs, rhs, relation: Relation, rel_tol: float | None) -> bool:
    if rel_tol is None:
        eq = lhs == rhs
    else:
        eq = lhs == rhs or abs(lhs - rhs) <= rel_tol * max(abs(lhs), abs(rhs))
    if relation is Relation.EQ:
        return eq
    if relation is Relation.LT:
        return not eq and lhs < rhs
    return not eq and lhs > rhs


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        # the shortest repr recovers the decimal the user typed
        return Fraction(repr(v))
    return Fraction(v)


def _exact_truth(st: Statement, samples: Mapping[str, Sequence]) -> bool:
    fs = {name: [_as_fraction(v) for v in _lookup(samples, name)] for name in st.sample_names}
    if st.statistic is Statistic.GEOMEAN:
        x = _require(fs[st.lhs], st.lhs)
        y = _require(fs[st.rhs], st.rhs)
        _positive(x, "geometric mean", st.lhs)
        _positive(y, "geometric mean", st.rhs)
        # compare prod(x)^(1/n) with prod(y)^(1/m) by raising both to n*m
        lhs = math.prod(x) ** len(y)
        rhs = math.prod(y) ** len(x)
        return _holds(lhs, rhs, st.relation, None)
    lhs, rhs = statement_values(st, fs)
    return _holds(_as_fraction(lhs), _as_fraction(rhs), st.relation, None)


def evaluate_statement(
    st: Statement, samples: Mapping[str, Sequence[float]], exact: bool = False
) -> bool:
    """Truth value of ``st`` over the named samples.

    Equality uses the statement's relative tolerance; strict relations
    hold only when the sides are not equal under that tolerance.  With
    ``exact`` all arithmetic is done on rationals and equality is exact.
    """
    if exact:
        return _exact_truth(st, samples)
    lhs, rhs = statement_values(st, samples)
    return _holds(lhs, rhs, st.relation, st.rel_tol)


def has_interpolated_median(st: Statement, samples: Mapping[str, Sequence]) -> bool:
    if st.statistic is not Statistic.MEDIAN:
        return False
    return any(len(samples[n]) % 2 == 0 for n in st.sample_names)


def whitelist_check(st: Statement, claimed_type: ScaleType) -> Outcome | None:
    """``Outcome.BY_RULE`` when the statistic is allowable for the scale
    type, None to defer to sampling.

    On a nominal scale only equality statements qualify: the order
    relations are not part of a nominal structure.
    """
    claimed_type = ScaleType(claimed_type)
    if st.statistic not in allowable_statistics(claimed_type):
        return None
    if claimed_type is ScaleType.NOMINAL and st.relation is not Relation.EQ:
        return None
    return Outcome.BY_RULE


# -- transformations ---------------------------------------------------------


class Transformation(Protocol):
    def __call__(self, values: Sequence) -> list: ...

    def describe(self) -> dict: ...


def _like(param, values: Sequence):
    if values and isinstance(values[0], Fraction):
        return _as_fraction(param)
    return float(param)


@dataclass(frozen=True)
class AffineMap:
    alpha: float | Fraction
    beta: float | Fraction = 0.0
    label: str = ""

    def __call__(self, values: Sequence) -> list:
        a, b = _like(self.alpha, values), _like(self.beta, values)
        return [a * v + b for v in values]

    def describe(self) -> dict:
        d = {"type": "affine", "alpha": float(self.alpha), "beta": float(self.beta)}
        if self.label:
            d["label"] = self.label
        return d


@dataclass(frozen=True)
class PowerMap:
    exponent: int

    def __call__(self, values: Sequence) -> list:
        return [v**self.exponent for v in values]

    def describe(self) -> dict:
        return {"type": "power", "exponent": self.exponent}


@dataclass(frozen=True)
class PiecewiseLinearMap:
    """Strictly increasing map through ``(xs[i], ys[i])``; slope-1
    extrapolation outside the anchors when only one is given, the edge
    slopes otherwise."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def _eval(self, v, xs, ys):
        n = len(xs)
        if n == 1:
            return ys[0] + (v - xs[0])
        if v <= xs[0]:
            i = 0
        elif v >= xs[-1]:
            i = n - 2
        else:
            lo, hi = 0, n - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if xs[mid] <= v:
                    lo = mid
                else:
                    hi = mid
            i = lo
        if v == xs[i]:
            return ys[i]
        if v == xs[i + 1]:
            return ys[i + 1]
        slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        return ys[i] + slope * (v - xs[i])

    def __call__(self, values: Sequence) -> list:
        xs = [_like(x, values) for x in self.xs]
        ys = [_like(y, values) for y in self.ys]
        return [self._eval(v, xs, ys) for v in values]

    def describe(self) -> dict:
        return {"type": "monotone-piecewise-linear", "anchors": [list(p) for p in zip(self.xs, self.ys)]}


@dataclass(frozen=True)
class PermutationMap:
    """A bijection of the covered values onto themselves."""

    pairs: tuple[tuple[float, float], ...]

    def __call__(self, values: Sequence) -> list:
        table = dict(self.pairs)
        try:
            return [_like(table[float(v)], values) for v in values]
        except KeyError as exc:
            raise InputError(f"value {exc.args[0]!r} not covered by the permutation") from None

    def describe(self) -> dict:
        return {"type": "permutation", "pairs": [list(p) for p in self.pairs]}


class FamilyKind(str, Enum):
    ONE_TO_ONE = "one-to-one"
    MONOTONE = "monotone"
    AFFINE = "affine"
    LINEAR = "linear"


_SCALE_OF = {
    FamilyKind.ONE_TO_ONE: ScaleType.NOMINAL,
    FamilyKind.MONOTONE: ScaleType.ORDINAL,
    FamilyKind.AFFINE: ScaleType.INTERVAL,
    FamilyKind.LINEAR: ScaleType.RATIO,
}

CELSIUS_TO_FAHRENHEIT = AffineMap(Fraction(9, 5), Fraction(32), "celsius-to-fahrenheit")
_AFFINE_WITNESSES = (
    CELSIUS_TO_FAHRENHEIT,
    AffineMap(Fraction(2), Fraction(0), "double"),
    AffineMap(Fraction(1), Fraction(1), "shift"),
)


@dataclass(frozen=True)
class TransformationFamily:
    """The permissible transformations of one scale type."""

    kind: FamilyKind

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))

    @classmethod
    def for_scale(cls, scale_type: ScaleType) -> TransformationFamily:
        scale_type = ScaleType(scale_type)
        for kind, st in _SCALE_OF.items():
            if st is scale_type:
                return cls(kind)
        raise InputError(f"no family for scale type {scale_type}")  # pragma: no cover

    @property
    def scale_type(self) -> ScaleType:
        return _SCALE_OF[self.kind]

    def witnesses(self, cover: Sequence[float]) -> list[Transformation]:
        """Fixed, deterministic members tried before any random sample."""
        out: list[Transformation] = [
            w for w in _AFFINE_WITNESSES if self.kind is not FamilyKind.LINEAR or w.beta == 0
        ]
        if self.kind in (FamilyKind.MONOTONE, FamilyKind.ONE_TO_ONE) and min(cover) > 0:
            out.append(PowerMap(2))
        if self.kind is FamilyKind.ONE_TO_ONE:
            out.append(AffineMap(Fraction(-1), Fraction(0), "negate"))
        return out

    def sample(self, seed, cover: Sequence[float]) -> Transformation:
        return sample_transformation(self, seed, cover)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _log_uniform(rng: np.random.Generator, lo=1e-2, hi=1e2, size=None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def sample_transformation(family: TransformationFamily, seed, cover: Sequence[float]) -> Transformation:
    """Draw a random member of ``family`` that covers the given values.

    affine: alpha log-uniform on [1e-2, 1e2], beta uniform on [-100, 100];
    linear: the same alpha with beta = 0; monotone: a piecewise-linear map
    anchored at the sorted cover with i.i.d. log-uniform gaps; one-to-one:
    a random permutation of the cover.
    """
    if len(cover) == 0:
        raise InputError("cannot sample a transformation for an empty cover")
    rng = _rng(seed)
    kind = family.kind if isinstance(family, TransformationFamily) else FamilyKind(family)
    if kind is FamilyKind.AFFINE:
        return AffineMap(float(_log_uniform(rng)), float(rng.uniform(-100.0, 100.0)))
    if kind is FamilyKind.LINEAR:
        return AffineMap(float(_log_uniform(rng)), 0.0)
    anchors = sorted(set(float(v) for v in cover))
    if kind is FamilyKind.MONOTONE:
        start = float(rng.uniform(-100.0, 100.0))
        gaps = _log_uniform(rng, size=len(anchors) - 1)
        ys = [start]
        for g in gaps:
            ys.append(ys[-1] + float(g))
        return PiecewiseLinearMap(tuple(anchors), tuple(ys))
    perm = rng.permutation(len(anchors))
    return PermutationMap(tuple((anchors[i], anchors[int(j)]) for i, j in enumerate(perm)))


# -- verdicts ----------------------------------------------------------------


@dataclass(frozen=True)
class MeaningfulnessVerdict:
    outcome: Outcome
    statement: str
    family: FamilyKind
    claimed_type: ScaleType
    truth: bool
    values: tuple[float, float]
    n_trials: int = 0
    n_witnesses: int = 0
    n_skipped: int = 0
    witness: dict | None = None
    witness_index: int | None = None
    truth_before: bool | None = None
    truth_after: bool | None = None
    values_after: tuple[float, float] | None = None
    interpolated_median: bool = False
    seed: int | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def meaningful(self) -> bool | None:
        """True by rule, False when refuted, None when only unrefuted."""
        if self.outcome is Outcome.BY_RULE:
            return True
        if self.outcome is Outcome.REFUTED:
            return False
        return None

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "statement": self.statement,
            "family": self.family.value,
            "claimed_type": self.claimed_type.value,
            "truth": self.truth,
            "lhs": float(self.values[0]),
            "rhs": float(self.values[1]),
            "n_trials": self.n_trials,
            "n_witnesses": self.n_witnesses,
            "n_skipped": self.n_skipped,
            "witness": self.witness,
            "witness_index": self.witness_index,
            "truth_before": self.truth_before,
            "truth_after": self.truth_after,
            "values_after": None if self.values_after is None else [float(v) for v in self.values_after],
            "interpolated_median": self.interpolated_median,
            "seed": self.seed,
            "notes": list(self.notes),
        }


def check_meaningfulness(
    st: Statement,
    samples: Mapping[str, Sequence[float]],
    family: TransformationFamily,
    n_trials: int = 1000,
    seed: int = 0,
    *,
    claimed_type: ScaleType | None = None,
    use_whitelist: bool = True,
    exact: bool = False,
) -> MeaningfulnessVerdict:
    """Test whether the truth of ``st`` is invariant under ``family``.

    Fixed witnesses are tried first, then ``n_trials`` random members
    drawn with per-trial seeds ``(seed, trial)``.  Every member is applied
    to all samples at once.  The first flipping member is reported.
    """
    if n_trials < 1:
        raise InputError("n_trials must be >= 1")
    family = TransformationFamily(family.kind)
    claimed = ScaleType(claimed_type) if claimed_type is not None else family.scale_type
    used = {name: list(_lookup(samples, name)) for name in st.sample_names}
    truth = evaluate_statement(st, used, exact)
    values = statement_values(st, used)
    base = dict(
        statement=str(st),
        family=family.kind,
        claimed_type=claimed,
        truth=truth,
        values=values,
        interpolated_median=has_interpolated_median(st, used),
        seed=seed,
    )

    if use_whitelist and whitelist_check(st, claimed) is Outcome.BY_RULE:
        return MeaningfulnessVerdict(Outcome.BY_RULE, **base)

    if exact:
        used = {n: [_as_fraction(v) for v in xs] for n, xs in used.items()}
    cover = sorted(set(v for xs in used.values() for v in xs))
    witnesses = family.witnesses(cover)
    skipped = 0

    def attempt(f):
        nonlocal skipped
        moved = {n: f(xs) for n, xs in used.items()}
        try:
            after = evaluate_statement(st, moved, exact)
        except (StatisticError, UndefinedRatioError):
            skipped += 1
            return None
        if after != truth:
            return after, statement_values(st, moved)
        return None

    def refuted(f, index, after, vals_after, trials_run):
        return MeaningfulnessVerdict(
            Outcome.REFUTED,
            n_trials=trials_run,
            n_witnesses=len(witnesses),
            n_skipped=skipped,
            witness=f.describe(),
            witness_index=index,
            truth_before=truth,
            truth_after=after,
            values_after=vals_after,
            **base,
        )

    for i, f in enumerate(witnesses):
        hit = attempt(f)
        if hit is not None:
            return refuted(f, i, *hit, 0)

    for t in range(n_trials):
        f = sample_transformation(family, np.random.default_rng([seed, t]), cover)
        hit = attempt(f)
        if hit is not None:
            return refuted(f, len(witnesses) + t, *hit, t + 1)

    notes = ()
    if skipped:
        notes = (f"{skipped} transformations were inapplicable and skipped",)
    return MeaningfulnessVerdict(
        Outcome.NO_COUNTEREXAMPLE,
        n_trials=n_trials,
        n_witnesses=len(witnesses),
        n_skipped=skipped,
        notes=notes,
        **base,
    )
