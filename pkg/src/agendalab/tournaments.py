"""Tournament realization: voter profiles whose majority relation is given.

The classical two-voters-per-edge construction: for each directed pair
the two voters agree on it and exactly cancel everywhere else, and one
extra lexicographic voter makes the count odd.  Realized margins are
therefore +1 or +3 on every pair, and the derived strict majority
relation reproduces the input tournament exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InternalInvariantError, ValidationError
from .problems import CollectiveChoiceProblem, TournamentSpec

REALIZE_LIMIT = 12   # voter count grows as 2*C(|X|,2)+1


def derive_tournament(problem: CollectiveChoiceProblem) -> TournamentSpec:
    """Strict majority relation of a problem as a tournament.

    Requires completeness: every pair must be strictly resolved, which
    holds under gfa (odd voters, strict preferences).
    """
    m = problem.num_policies
    edges = []
    for x in range(m):
        for y in range(x + 1, m):
            if problem.strictly_majority_preferred(x, y):
                edges.append((x, y))
            elif problem.strictly_majority_preferred(y, x):
                edges.append((y, x))
            else:
                raise ValidationError(
                    f"majority ties on pair ({problem.policies[x]}, "
                    f"{problem.policies[y]}); no tournament")
    return TournamentSpec.from_edges(m, edges)


def _ranking_utilities(ranking, m: int) -> tuple[Fraction, ...]:
    utilities = [Fraction(0)] * m
    for position, policy in enumerate(ranking):
        utilities[policy] = Fraction(m - position)
    return tuple(utilities)


def mcgarvey_realize(tournament: TournamentSpec,
                     setter_utilities) -> CollectiveChoiceProblem:
    """Emit a 2E+1 voter problem realizing the tournament.

    Per directed edge, one voter pair nets +2 on that pair and zero on
    every other; the extra voter ranks policies by index.  Setter
    utilities come from the caller and must be strict so the result is
    a gfa problem.
    """
    m = tournament.size
    if m > REALIZE_LIMIT:
        raise ValidationError(
            f"{m} policies would need {2 * m * (m - 1) // 2 + 1} voters; "
            f"limit is {REALIZE_LIMIT} policies")
    setter = tuple(Fraction(u) for u in setter_utilities)
    if len(setter) != m:
        raise ValidationError("setter utility vector length mismatch")
    if len(set(setter)) != m:
        raise ValidationError("setter utilities must be strict for a gfa realization")

    rows = []
    for winner, loser in sorted(tournament.edges):
        others = [p for p in range(m) if p not in (winner, loser)]
        rows.append(_ranking_utilities([winner, loser] + others, m))
        rows.append(_ranking_utilities(list(reversed(others)) + [winner, loser], m))
    rows.append(_ranking_utilities(list(range(m)), m))

    labels = tuple(f"x{i}" for i in range(m))
    problem = CollectiveChoiceProblem(
        policies=labels, voter_utilities=tuple(rows),
        setter_utilities=setter, gfa=True)
    if derive_tournament(problem).edges != tournament.edges:
        raise InternalInvariantError("realized majority relation differs from input")
    return problem


def relabel(problem: CollectiveChoiceProblem, labels) -> CollectiveChoiceProblem:
    """Same problem with new policy labels."""
    labels = tuple(labels)
    if len(labels) != problem.num_policies:
        raise ValidationError("label count mismatch")
    return CollectiveChoiceProblem(
        policies=labels, voter_utilities=problem.voter_utilities,
        setter_utilities=problem.setter_utilities,
        majority_override=problem.majority_override, gfa=problem.gfa)
