"""Measurement-theoretic analysis of IR evaluation measures.

Derive the achievable measurement points of a measure, test them for
equal spacing, intervalize them by dense ranking, and check whether
statements about score statistics survive the permissible
transformations of a scale.
"""

__version__ = "0.1.0"

from .analysis import (
    ComparisonReport,
    ScoreMatrix,
    compare,
    intervalize_matrix,
    kendall_tau_b,
    paired_t_test,
    score_runs,
    sign_test,
)
from .grammar import parse_statement
from .meaningfulness import (
    FamilyKind,
    MeaningfulnessVerdict,
    Outcome,
    Relation,
    Statement,
    Statistic,
    TransformationFamily,
    check_meaningfulness,
    evaluate_statement,
    sample_transformation,
    whitelist_check,
)
from .measures import Kind, Measure, Score, eval_measure, rb_dependence_report
from .scales import (
    AffineTransform,
    DifferenceStructure,
    IntervalizedMapping,
    MeasurementScale,
    ScaleType,
    achievable_points,
    check_affine_equivalent,
    check_equispaced,
    intervalize,
    ratio_of_intervals,
)
from .serp import SerpUniverse, TopicContext, count_universe, enumerate_universe
from .trec import Qrels, Run, parse_qrels, parse_run

__all__ = [
    "AffineTransform",
    "ComparisonReport",
    "DifferenceStructure",
    "FamilyKind",
    "IntervalizedMapping",
    "Kind",
    "MeaningfulnessVerdict",
    "Measure",
    "MeasurementScale",
    "Outcome",
    "Qrels",
    "Relation",
    "Run",
    "ScaleType",
    "Score",
    "ScoreMatrix",
    "SerpUniverse",
    "Statement",
    "Statistic",
    "TopicContext",
    "TransformationFamily",
    "achievable_points",
    "check_affine_equivalent",
    "check_equispaced",
    "check_meaningfulness",
    "compare",
    "count_universe",
    "enumerate_universe",
    "eval_measure",
    "evaluate_statement",
    "intervalize",
    "intervalize_matrix",
    "kendall_tau_b",
    "paired_t_test",
    "parse_qrels",
    "parse_run",
    "parse_statement",
    "ratio_of_intervals",
    "rb_dependence_report",
    "sample_transformation",
    "score_runs",
    "sign_test",
    "whitelist_check",
]
