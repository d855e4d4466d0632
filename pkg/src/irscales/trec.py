"""TREC run and qrels files.

Run lines: ``topic Q0 doc rank score tag``.  The rank column is ignored;
documents are ordered by descending score, ties by ascending doc id.
Scores are parsed as decimals so ordering never depends on float rounding.

Qrels lines: ``topic 0 doc grade``.  Unjudged documents have grade 0.
"""

from __future__ import annotations

import json
import os
import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .errors import FormatError, InputError, UndefinedNormalizationError
from .serp import TopicContext


def _natural_key(topic: str):
    return (0, int(topic), topic) if topic.isdigit() else (1, 0, topic)


def sort_topics(topics: Iterable[str]) -> list[str]:
    """Numeric topic ids in numeric order, then the rest alphabetically."""
    return sorted(topics, key=_natural_key)


@dataclass
class Run:
    name: str
    entries: dict[str, list[tuple[str, Decimal]]] = field(default_factory=dict)

    @property
    def topics(self) -> list[str]:
        return list(self.entries)

    def docs(self, topic: str) -> list[str]:
        return [doc for doc, _ in self.entries.get(topic, [])]

    def ranking(self) -> dict[str, list[str]]:
        return {t: self.docs(t) for t in self.entries}


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                yield lineno, line.split()


def parse_run(path: str | os.PathLike, name: str | None = None) -> Run:
    """Read a TREC run file into per-topic ordered document lists."""
    path = str(path)
    by_topic: dict[str, dict[str, Decimal]] = {}
    tags: list[str] = []
    for lineno, fields in _lines(path):
        if len(fields) != 6:
            raise FormatError(f"expected 6 fields, got {len(fields)}", path, lineno)
        topic, q0, doc, rank, score, tag = fields
        if q0 != "Q0":
            raise FormatError(f"second field must be 'Q0', got {q0!r}", path, lineno)
        try:
            int(rank)
        except ValueError:
            raise FormatError(f"rank {rank!r} is not an integer", path, lineno) from None
        try:
            value = Decimal(score)
        except InvalidOperation:
            raise FormatError(f"score {score!r} is not a number", path, lineno) from None
        if not value.is_finite():
            raise FormatError(f"score {score!r} is not finite", path, lineno)
        docs = by_topic.setdefault(topic, {})
        if doc in docs:
            raise FormatError(f"document {doc!r} appears twice for topic {topic}", path, lineno)
        docs[doc] = value
        if tag not in tags:
            tags.append(tag)
    if name is None:
        name = tags[0] if len(tags) == 1 else Path(path).stem
    entries = {
        t: sorted(docs.items(), key=lambda item: (-item[1], item[0]))
        for t, docs in by_topic.items()
    }
    return Run(name, entries)


def format_run(run: Run) -> str:
    out = []
    for topic, docs in run.entries.items():
        for rank, (doc, score) in enumerate(docs, start=1):
            out.append(f"{topic} Q0 {doc} {rank} {score} {run.name}\n")
    return "".join(out)


@dataclass
class Qrels:
    grades: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def topics(self) -> list[str]:
        return sort_topics(self.grades)

    def grade(self, topic: str, doc: str) -> int:
        return self.grades.get(topic, {}).get(doc, 0)

    def recall_base(self, topic: str) -> int:
        return sum(1 for g in self.grades.get(topic, {}).values() if g > 0)

    @property
    def g_max(self) -> int:
        top = max((g for docs in self.grades.values() for g in docs.values()), default=0)
        return max(top, 1)

    @property
    def flagged(self) -> list[str]:
        """Topics without any relevant judgment (recall base 0)."""
        return [t for t in self.topics if self.recall_base(t) == 0]

    def context(self, topic: str, g_max: int | None = None) -> TopicContext:
        rb = self.recall_base(topic)
        if rb == 0:
            raise UndefinedNormalizationError(f"topic {topic!r} has no relevant documents (RB = 0)")
        return TopicContext(topic, rb, g_max or self.g_max)

    def serp(self, topic: str, docs: list[str], k: int) -> tuple[int, ...]:
        """Grades of the top ``k`` documents, padded with zeros."""
        grades = [self.grade(topic, d) for d in docs[:k]]
        grades.extend([0] * (k - len(grades)))
        return tuple(grades)


def parse_qrels(path: str | os.PathLike) -> Qrels:
    path = str(path)
    grades: dict[str, dict[str, int]] = {}
    for lineno, fields in _lines(path):
        if len(fields) != 4:
            raise FormatError(f"expected 4 fields, got {len(fields)}", path, lineno)
        topic, it, doc, grade = fields
        if it != "0":
            raise FormatError(f"second field must be '0', got {it!r}", path, lineno)
        if not re.fullmatch(r"[+-]?\d+", grade):
            raise FormatError(f"grade {grade!r} is not an integer", path, lineno)
        g = int(grade)
        if g < 0:
            raise FormatError(f"negative grade {g}", path, lineno)
        docs = grades.setdefault(topic, {})
        if doc in docs:
            raise FormatError(f"duplicate judgment for ({topic}, {doc})", path, lineno)
        docs[doc] = g
    return Qrels(grades)


def format_qrels(qrels: Qrels) -> str:
    return "".join(
        f"{topic} 0 {doc} {g}\n" for topic, docs in qrels.grades.items() for doc, g in docs.items()
    )


def load_samples(path: str | os.PathLike) -> dict[str, list[float]]:
    """Named score samples from a JSON object of ``name: [numbers]``."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", str(path), exc.lineno) from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: samples file must hold a JSON object")
    out = {}
    for name, values in data.items():
        if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
        ):
            raise InputError(f"{path}: sample {name!r} must be a list of numbers")
        out[name] = [float(v) for v in values]
    return out
