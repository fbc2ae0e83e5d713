"""Seeded random instance factories for the verification corpora."""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import ValidationError
from .problems import CollectiveChoiceProblem


def gen_random_gfa(num_policies: int, n: int, seed: int) -> CollectiveChoiceProblem:
    """Random problem with strict rows: shuffled rank utilities per player."""
    if num_policies < 2:
        raise ValidationError("need at least two policies")
    if n % 2 == 0 or n < 1:
        raise ValidationError("gfa needs an odd positive voter count")
    rng = random.Random(seed)

    def ranks():
        values = list(range(1, num_policies + 1))
        rng.shuffle(values)
        return tuple(Fraction(v) for v in values)

    voters = tuple(ranks() for _ in range(n))
    setter = ranks()
    labels = tuple(f"x{i}" for i in range(num_policies))
    return CollectiveChoiceProblem(policies=labels, voter_utilities=voters,
                                   setter_utilities=setter, gfa=True)


def gfa_corpus(count: int, seed: int, max_policies: int = 6,
               voter_choices=(3, 5)) -> list[CollectiveChoiceProblem]:
    """Deterministic corpus of random gfa instances for the theorem suites."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        m = rng.randrange(2, max_policies + 1)
        n = voter_choices[rng.randrange(len(voter_choices))]
        out.append(gen_random_gfa(m, n, seed=rng.randrange(2**31)))
    return out


def gen_random_with_ties(num_policies: int, n: int, seed: int,
                         levels: int = 3) -> CollectiveChoiceProblem:
    """Random problem where utilities draw from few levels, forcing indifference."""
    if num_policies < 2 or n < 1:
        raise ValidationError("need at least two policies and one voter")
    rng = random.Random(seed)

    def row():
        return tuple(Fraction(rng.randrange(levels)) for _ in range(num_policies))

    labels = tuple(f"x{i}" for i in range(num_policies))
    return CollectiveChoiceProblem(
        policies=labels,
        voter_utilities=tuple(row() for _ in range(n)),
        setter_utilities=row())
