"""Parser for the statement mini-language.

    mean(A) < mean(B)
    median(A) = median(B)
    quantile(A, 0.25) > quantile(B, 0.25)
    geomean([2,2,4,8,36]) > geomean([1,2,4,15,34])
    diffratio(T[0],T[1];P[0],P[1]) = 2

Samples are names resolved against supplied data, or inline lists.  An
inline list is registered under its own normalized text, e.g.
``[2,2,4,8,36]``.  Indices in ``diffratio`` are 0-based.
"""

from __future__ import annotations

import re
from collections.abc import Mapping, Sequence

from .errors import InputError, StatementSyntaxError
from .meaningfulness import REL_TOL, Relation, Statement, Statistic

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)
      | (?P<rel>==|<|>|=)
      | (?P<punct>[()\[\],;])
    )""",
    re.VERBOSE,
)

_STATS = {
    "mean": Statistic.MEAN,
    "median": Statistic.MEDIAN,
    "quantile": Statistic.QUANTILE,
    "geomean": Statistic.GEOMEAN,
    "harmean": Statistic.HARMEAN,
    "mode": Statistic.MODE,
    "diffratio": Statistic.DIFFRATIO,
}


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise StatementSyntaxError(f"unexpected input at column {pos + 1}: {text[pos:]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, samples: Mapping[str, Sequence[float]]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.known = samples
        self.samples: dict[str, list[float]] = {}

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind: str, value: str | None = None) -> str:
        k, v = self.peek()
        if k != kind or (value is not None and v != value):
            want = value or kind
            got = v if v is not None else "end of input"
            raise StatementSyntaxError(f"expected {want!r}, got {got!r} in {self.text!r}")
        self.i += 1
        return v

    def number(self) -> float:
        return float(self.take("num"))

    def sample(self) -> str:
        k, v = self.peek()
        if k == "name":
            self.i += 1
            if v not in self.known:
                raise InputError(f"unresolved sample {v!r}")
            self.samples[v] = [float(x) for x in self.known[v]]
            return v
        if (k, v) == ("punct", "["):
            self.i += 1
            raw = [self.take("num")]
            while self.peek() == ("punct", ","):
                self.i += 1
                raw.append(self.take("num"))
            self.take("punct", "]")
            name = "[" + ",".join(raw) + "]"
            self.samples[name] = [float(x) for x in raw]
            return name
        raise StatementSyntaxError(f"expected a sample name or [list], got {v!r}")

    def statistic(self) -> Statistic:
        name = self.take("name")
        try:
            return _STATS[name.lower()]
        except KeyError:
            raise StatementSyntaxError(
                f"unknown statistic {name!r}; expected one of {', '.join(_STATS)}"
            ) from None

    def relation(self) -> Relation:
        rel = self.take("rel")
        return Relation("=" if rel == "==" else rel)

    def call(self, stat: Statistic) -> tuple[str, float | None]:
        self.take("punct", "(")
        name = self.sample()
        q = None
        if stat is Statistic.QUANTILE:
            self.take("punct", ",")
            q = self.number()
        self.take("punct", ")")
        return name, q

    def ref(self) -> tuple[str, int]:
        name = self.sample()
        self.take("punct", "[")
        idx = self.take("num")
        if not re.fullmatch(r"[+-]?\d+", idx):
            raise StatementSyntaxError(f"index {idx!r} is not an integer")
        self.take("punct", "]")
        return name, int(idx)

    def statement(self, rel_tol: float) -> Statement:
        stat = self.statistic()
        if stat is Statistic.DIFFRATIO:
            self.take("punct", "(")
            a = self.ref()
            self.take("punct", ",")
            b = self.ref()
            self.take("punct", ";")
            c = self.ref()
            self.take("punct", ",")
            d = self.ref()
            self.take("punct", ")")
            rel = self.relation()
            target = self.number()
            st = Statement(stat, rel, quad=(a, b, c, d), target=target, rel_tol=rel_tol)
        else:
            lhs, q = self.call(stat)
            rel = self.relation()
            stat2 = self.statistic()
            if stat2 is not stat:
                raise StatementSyntaxError(
                    f"both sides must use the same statistic ({stat.value} vs {stat2.value})"
                )
            rhs, q2 = self.call(stat2)
            if q != q2:
                raise StatementSyntaxError("both quantile calls must use the same level")
            st = Statement(stat, rel, lhs, rhs, q=q, rel_tol=rel_tol)
        if self.i != len(self.tokens):
            raise StatementSyntaxError(f"trailing input after statement: {self.peek()[1]!r}")
        return st


def parse_statement(
    text: str,
    samples: Mapping[str, Sequence[float]] | None = None,
    rel_tol: float = REL_TOL,
) -> tuple[Statement, dict[str, list[float]]]:
    """Parse ``text`` and return the statement plus the samples it uses."""
    p = _Parser(text, samples or {})
    st = p.statement(rel_tol)
    return st, p.samples
