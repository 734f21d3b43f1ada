"""Shared fixtures plus an always-on metric-invariant watchdog.

Every evaluation report built anywhere in the suite is intercepted and
checked for the hop-wise <= multi-hop accuracy invariant, so the
invariant holds on every report ever produced, not only in the test
that targets it directly.
"""

from __future__ import annotations

import pytest

import polyhop.evaluation as evaluation

# every EvalReport constructed during this test session, in order
ALL_REPORTS: list[evaluation.EvalReport] = []


def assert_metric_invariant(report: evaluation.EvalReport) -> None:
    assert report.overall.hopwise_accuracy <= report.overall.accuracy + 1e-12
    for language, block in report.per_language.items():
        assert block.hopwise_accuracy <= block.accuracy + 1e-12, language


@pytest.fixture(autouse=True, scope="session")
def report_archive():
    """Yields the list of every report produced so far in this session."""
    original = evaluation._aggregate

    def wrapped(*args, **kwargs):
        report = original(*args, **kwargs)
        assert_metric_invariant(report)
        ALL_REPORTS.append(report)
        return report

    evaluation._aggregate = wrapped
    yield ALL_REPORTS
    evaluation._aggregate = original
