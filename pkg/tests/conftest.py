"""Shared fixtures.

The expensive artifacts (the Painleve II solution, the exterior-field
evaluators, the verification-report run) are session scoped so the suite
pays for each of them once.
"""

import pytest

from coulombgas import opasymp, painleve, report


@pytest.fixture(scope="session")
def hm_solution():
    return painleve.hastings_mcleod()


@pytest.fixture(scope="session")
def pre_evaluator():
    return opasymp.GEvaluator.build(1.2, 1.0)


@pytest.fixture(scope="session")
def post_evaluator():
    return opasymp.GEvaluator.build(0.2, 1.0)


@pytest.fixture(scope="session")
def acceptance_results():
    results = report.run_checks()
    return {result.key: result for result in results}
