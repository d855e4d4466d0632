"""SERPs, topic contexts and enumeration of the SERP universe.

A SERP is a plain tuple of small non-negative integer grades; position 1
is the first element.  The universe of all SERPs of length ``k`` over a
grade set grows as ``|G|**k``, so it is only ever streamed.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from .errors import InputError, UniverseTooLargeError

Serp = tuple[int, ...]

DEFAULT_UNIVERSE_CAP = 2**24


def make_serp(grades: Iterable[int], g_max: int | None = None) -> Serp:
    """Validate ``grades`` and return them as a SERP tuple."""
    serp = tuple(int(g) for g in grades)
    if not serp:
        raise InputError("a SERP needs at least one position")
    for g in serp:
        if g < 0:
            raise InputError(f"negative relevance grade {g}")
        if g_max is not None and g > g_max:
            raise InputError(f"grade {g} exceeds g_max={g_max}")
    return serp


def grade_range(g_max: int) -> tuple[int, ...]:
    """The default grade vocabulary ``{0, ..., g_max}``."""
    if g_max < 1:
        raise InputError(f"g_max must be positive, got {g_max}")
    return tuple(range(g_max + 1))


@dataclass(frozen=True)
class TopicContext:
    topic_id: str
    recall_base: int
    g_max: int = 1

    def __post_init__(self):
        if self.recall_base < 1:
            raise InputError(
                f"topic {self.topic_id!r}: recall base must be >= 1, got {self.recall_base}"
            )
        if self.g_max < 1:
            raise InputError(f"topic {self.topic_id!r}: g_max must be >= 1")


def _check_args(k: int, grade_set: Iterable[int], constraint: int | None) -> tuple[int, ...]:
    if k < 1:
        raise InputError(f"SERP length must be >= 1, got {k}")
    grades = tuple(sorted(set(int(g) for g in grade_set)))
    if not grades:
        raise InputError("grade set is empty")
    if grades[0] != 0:
        raise InputError("grade set must contain 0 (not relevant)")
    if constraint is not None and constraint < 0:
        raise InputError(f"relevant-document cap must be >= 0, got {constraint}")
    return grades


def _count(k: int, n_grades: int, constraint: int | None) -> int:
    if constraint is None or constraint >= k:
        return n_grades**k
    # choose which positions are relevant, then a positive grade for each
    return sum(math.comb(k, j) * (n_grades - 1) ** j for j in range(constraint + 1))


def count_universe(
    k: int,
    grade_set: Iterable[int],
    constraint: int | None = None,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> int:
    """Number of SERPs of length ``k`` over ``grade_set``.

    With ``constraint`` set, only SERPs holding at most that many relevant
    (non-zero) documents are counted.
    """
    grades = _check_args(k, grade_set, constraint)
    n = _count(k, len(grades), constraint)
    if n > cap:
        raise UniverseTooLargeError(
            f"universe of {n} SERPs (k={k}, |G|={len(grades)}) exceeds the cap of {cap}"
        )
    return n


def _constrained(k: int, grades: tuple[int, ...], budget: int) -> Iterator[Serp]:
    # depth-first in lexicographic order; only the current prefix is held
    prefix: list[int] = []

    def walk(remaining: int) -> Iterator[Serp]:
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for g in grades:
            if g != 0 and remaining == 0:
                break
            prefix.append(g)
            yield from walk(remaining - (g != 0))
            prefix.pop()

    return walk(budget)


def enumerate_universe(
    k: int,
    grade_set: Iterable[int],
    constraint: int | None = None,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> Iterator[Serp]:
    """Lazily yield every SERP of length ``k`` in lexicographic grade order.

    >>> list(enumerate_universe(2, {0, 1}))
    [(0, 0), (0, 1), (1, 0), (1, 1)]
    """
    grades = _check_args(k, grade_set, constraint)
    count_universe(k, grades, constraint, cap)
    if constraint is None or constraint >= k:
        return itertools.product(grades, repeat=k)
    return _constrained(k, grades, constraint)


@dataclass(frozen=True)
class SerpUniverse:
    """All SERPs of length ``k`` over ``grade_set``, optionally capped in
    the number of relevant documents (RB-constrained mode)."""

    k: int
    grade_set: tuple[int, ...] = (0, 1)
    constraint: int | None = None
    cap: int = field(default=DEFAULT_UNIVERSE_CAP, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "grade_set", _check_args(self.k, self.grade_set, self.constraint))

    @classmethod
    def binary(cls, k: int, **kwargs) -> SerpUniverse:
        return cls(k, (0, 1), **kwargs)

    @classmethod
    def graded(cls, k: int, g_max: int, **kwargs) -> SerpUniverse:
        return cls(k, grade_range(g_max), **kwargs)

    @property
    def g_max(self) -> int:
        return self.grade_set[-1]

    @property
    def cardinality(self) -> int:
        return count_universe(self.k, self.grade_set, self.constraint, self.cap)

    def __iter__(self) -> Iterator[Serp]:
        return enumerate_universe(self.k, self.grade_set, self.constraint, self.cap)

    def __len__(self) -> int:
        return self.cardinality

    def describe(self) -> dict:
        return {
            "k": self.k,
            "grade_set": list(self.grade_set),
            "rb_constraint": self.constraint,
            "cardinality": self.cardinality,
        }


def n_relevant(serp: Sequence[int]) -> int:
    return sum(1 for g in serp if g > 0)
