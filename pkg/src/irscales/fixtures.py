"""Bundled synthetic TREC fixtures (3 systems x 5 topics each).

``toy`` mixes reciprocal ranks freely; ``flip`` is built so that the
paired t-test between ``flipA`` and ``flipB`` is significant at 0.05 on
intervalized RR@3 but not on raw RR@3.
"""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

from .trec import Qrels, Run, parse_qrels, parse_run

FIXTURES = {
    "toy": ("toyA", "toyB", "toyC"),
    "flip": ("flipA", "flipB", "flipC"),
}


def fixture_path(name: str) -> Path:
    return Path(str(files("irscales") / "data" / name))


def load_fixture(name: str) -> tuple[list[Run], Qrels]:
    runs = [parse_run(fixture_path(f"{s}.run")) for s in FIXTURES[name]]
    return runs, parse_qrels(fixture_path("qrels.txt"))
