from __future__ import annotations

import pytest

from agendalab import VotingRule
from agendalab.factories import gfa_corpus
from agendalab.fixtures import (
    blocked_default_problem,
    blocked_default_realized,
    majority_cycle_problem,
)


@pytest.fixture(scope="session")
def cycle():
    return majority_cycle_problem()


@pytest.fixture(scope="session")
def blocked():
    return blocked_default_problem()


@pytest.fixture(scope="session")
def blocked_realized():
    return blocked_default_realized()


@pytest.fixture(scope="session")
def rule3():
    return VotingRule.simple_majority(3)


@pytest.fixture(scope="session")
def small_corpus():
    return gfa_corpus(50, seed=11)


@pytest.fixture(scope="session")
def acceptance_corpus():
    """The 200-instance corpus shared by the oracle-equivalence criteria."""
    return gfa_corpus(200, seed=2026)
