"""Run configuration: defaults, an optional JSON file, then CLI flags."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace

from .errors import FormatError, InputError
from .measures import Measure
from .meaningfulness import REL_TOL
from .scales import DEDUP_TOL, EQUISPACING_TOL
from .serp import DEFAULT_UNIVERSE_CAP, SerpUniverse, grade_range


@dataclass(frozen=True)
class Config:
    measure: str = "rr"
    p: float | None = None
    k: int | None = None
    gmax: int = 1
    rb: int | None = None
    tol: float = EQUISPACING_TOL
    eq_tol: float = REL_TOL
    dedup_tol: float = DEDUP_TOL
    trials: int = 1000
    seed: int | None = None
    universe_cap: int = DEFAULT_UNIVERSE_CAP
    rb_constrained: bool = False
    format: str | None = None

    def __post_init__(self):
        for name in ("tol", "eq_tol", "dedup_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"tolerance {name} must be > 0")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.universe_cap < 1:
            raise InputError("universe cap must be >= 1")
        if self.format not in (None, "json", "csv"):
            raise InputError(f"unknown output format {self.format!r}")

    @classmethod
    def load(cls, path: str) -> Config:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**data)

    def override(self, **kwargs) -> Config:
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def build_measure(self) -> Measure:
        return Measure.parse(self.measure, cutoff=self.k, p=self.p, g_max=self.gmax)

    def depth(self) -> int:
        m = self.build_measure()
        k = self.k if self.k is not None else m.cutoff
        if k is None:
            raise InputError("a SERP length is required: pass --k or a measure like rr@3")
        return k

    @property
    def grade_set(self) -> tuple[int, ...]:
        return grade_range(self.gmax)

    def universe(self, constraint: int | None = None) -> SerpUniverse:
        return SerpUniverse(self.depth(), self.grade_set, constraint, self.universe_cap)

    def require_seed(self) -> int:
        if self.seed is None:
            raise InputError("--seed is mandatory for meaningfulness checks")
        return self.seed
