"""Dynamic layer: favorite-improvement iterates and equilibrium objects.

The favorite improvement of a default x is the setter's best policy
among those some winning coalition strictly prefers to x, x itself
included.  Under generic finite alternatives (gfa) the T-round game has
a unique equilibrium outcome: the T-fold iterate of that map.  This
module builds the iterates, the simple Markov equilibrium profile, the
one-round improvement correspondence for problems with indifference,
equilibrium outcome bounds obtained from its selections, and the
divide-the-dollar share-grabbing machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .problems import (
    CollectiveChoiceProblem,
    VotingRule,
    acceptance_set,
    is_improvable,
)


# ---------------------------------------------------------------------------
# favorite improvement


def favorite_improvement(problem: CollectiveChoiceProblem, rule: VotingRule,
                         x: int, allow_ties: bool = False) -> int:
    """Setter's best policy among {x} plus the strict acceptance set of x.

    Returns x itself exactly when x is unimprovable.  Without gfa the
    argmax may be non-unique; the lowest-index maximizer is returned,
    and callers must opt in via `allow_ties`.
    """
    if not problem.gfa and not allow_ties:
        raise ValidationError(
            "favorite improvement is single-valued only under gfa; "
            "pass allow_ties=True to accept lowest-index tie-breaking")
    fast = _phi_fast(problem, rule, x)
    if fast is not None:
        return fast
    cert = is_improvable(problem, rule, x)
    return x if cert is None else cert.witness


def _phi_fast(problem, rule, x: int) -> Optional[int]:
    """Vectorized argmax for quota rules on large override-free problems.

    Matches the scalar path exactly: the default stands unless some
    coalition-backed policy strictly improves the setter, in which case
    the lowest-index utility maximizer among those wins.
    """
    if problem.majority_override is not None or rule.quota is None:
        return None
    voters, setter = problem._np_voters, problem._np_setter
    if voters is None or problem.num_policies < 64:
        return None
    counts = (voters > voters[:, x:x + 1]).sum(axis=0)
    better = (counts >= rule.quota) & (setter > setter[x])
    better[x] = False
    if not better.any():
        return x
    candidates = np.flatnonzero(better)
    return int(candidates[np.argmax(setter[candidates])])


def phi_iterates(problem: CollectiveChoiceProblem, rule: VotingRule,
                 x0: int, count: int, allow_ties: bool = False) -> list[int]:
    """[x0, phi(x0), ..., phi^count(x0)] with early fixed-point short-circuit."""
    problem.check_policy(x0)
    out = [x0]
    for _ in range(count):
        nxt = favorite_improvement(problem, rule, out[-1], allow_ties=allow_ties)
        out.append(nxt)
        if nxt == out[-2]:
            out.extend([nxt] * (count - len(out) + 1))
            break
    return out


@dataclass(frozen=True)
class Trajectory:
    """Iterates of the favorite-improvement map from a starting default."""

    start: int
    steps: tuple[int, ...]                  # phi^1 .. phi^T
    fixed_point_reached_at: Optional[int]   # smallest t with phi^t unimprovable

    @property
    def outcome(self) -> int:
        return self.steps[-1] if self.steps else self.start


def equilibrium_outcome(problem: CollectiveChoiceProblem, rule: VotingRule,
                        x0: int, rounds: int) -> Trajectory:
    """Unique equilibrium outcome trajectory of the T-round game (gfa).

    The final entry is the outcome; setter utility is nondecreasing
    along the steps and a fixed point, once hit, absorbs.
    """
    if rounds < 1:
        raise ValidationError("need at least one round")
    if not problem.gfa:
        raise ValidationError("equilibrium outcomes are only unique under gfa")
    iterates = phi_iterates(problem, rule, x0, rounds)
    reached = None
    for t in range(len(iterates) - 1):
        if iterates[t + 1] == iterates[t]:
            reached = t
            break
    if reached is None and is_improvable(problem, rule, iterates[-1]) is None:
        reached = rounds
    return Trajectory(start=x0, steps=tuple(iterates[1:]), fixed_point_reached_at=reached)


# ---------------------------------------------------------------------------
# strategy profiles


@dataclass(frozen=True)
class StrategyProfile:
    """Tabulated or callable-backed behavior on (round, default) states.

    `propose(t, x) -> (proposal, adjourn_flag)`;
    `vote(voter, t, x, proposal) -> bool`.  Table-backed profiles raise
    KeyError on missing states, which the oracle's verifier converts
    into a located validation error.
    """

    horizon: int
    propose: Callable[[int, int], tuple[int, bool]]
    vote: Callable[[int, int, int, int], bool]
    label: str = ""

    @staticmethod
    def from_tables(horizon: int, proposer_table: dict, voter_tables: list[dict],
                    label: str = "") -> "StrategyProfile":
        def propose(t, x):
            return proposer_table[(t, x)]

        def vote(i, t, x, a):
            return voter_tables[i][(t, x, a)]

        return StrategyProfile(horizon=horizon, propose=propose, vote=vote, label=label)

    def with_proposal(self, t: int, x: int, proposal: int,
                      adjourn: bool = False) -> "StrategyProfile":
        """Copy of this profile with one proposer entry overridden."""
        base = self.propose

        def propose(tt, xx):
            if (tt, xx) == (t, x):
                return (proposal, adjourn)
            return base(tt, xx)

        return StrategyProfile(horizon=self.horizon, propose=propose, vote=self.vote,
                               label=f"{self.label}+perturbed")


def simple_equilibrium_profile(problem: CollectiveChoiceProblem, rule: VotingRule,
                               rounds: int) -> StrategyProfile:
    """The greedy Markov equilibrium of the T-round amendment game.

    The setter always proposes the favorite improvement of the current
    default; voter i approves a proposal exactly when the continuation
    outcome from acceptance is weakly preferred to the one from
    rejection (so on-path ties go to the proposal).
    """
    if not problem.gfa:
        raise ValidationError("the simple equilibrium profile requires gfa")
    if rounds < 1:
        raise ValidationError("need at least one round")

    @lru_cache(maxsize=None)
    def power(x: int, k: int) -> int:
        if k == 0:
            return x
        return favorite_improvement(problem, rule, power(x, k - 1))

    def propose(t, x):
        return (power(x, 1), False)

    def vote(i, t, x, a):
        row = problem.voter_utilities[i]
        return row[power(a, rounds - t)] >= row[power(x, rounds - t)]

    return StrategyProfile(horizon=rounds, propose=propose, vote=vote,
                           label="simple-equilibrium")


# ---------------------------------------------------------------------------
# one-round improvement correspondence and outcome bounds


def phi_or(problem: CollectiveChoiceProblem, rule: VotingRule, x: int) -> frozenset[int]:
    """One-round improvement correspondence at x.

    Weakly acceptable alternatives whose setter utility is at least the
    best over the almost-strict acceptance set.  Nonempty; contains x
    exactly when x is unimprovable.
    """
    problem.check_policy(x)
    almost = acceptance_set(problem, rule, x, "almost_strict")
    bar = max(problem.setter_utilities[y] for y in almost)
    weak = acceptance_set(problem, rule, x, "weak")
    return frozenset(y for y in weak if problem.setter_utilities[y] >= bar)


@dataclass(frozen=True)
class OutcomeBounds:
    """Equilibrium-outcome bounds from selections of the correspondence.

    `lower`: outcomes of composing a single selection T times — each is
    realized by some well-behaved equilibrium.  `upper`: outcomes of
    T-fold composites of per-round selections whose values at every
    default agree in setter utility — a necessary condition on
    equilibrium outcomes, so this over-approximates.  Restricting the
    agreement constraint to reachable defaults provably yields the same
    set (choices at unvisited defaults are unconstrained), so
    `upper_reachable_variant` always equals `upper`; both are reported.
    """

    lower: frozenset[int]
    upper: frozenset[int]
    upper_reachable_variant: frozenset[int]


def nc_outcome_bounds(problem: CollectiveChoiceProblem, rule: VotingRule,
                      x0: int, rounds: int, budget: int = 200_000) -> OutcomeBounds:
    if rounds < 1:
        raise ValidationError("need at least one round")
    problem.check_policy(x0)
    correspondence = [phi_or(problem, rule, x) for x in range(problem.num_policies)]
    ticker = [0]

    def spend():
        ticker[0] += 1
        if ticker[0] > budget:
            raise BudgetExceededError(
                "selection enumeration exceeded budget", required=ticker[0], budget=budget)

    lower: set[int] = set()
    assignment: dict[int, int] = {}

    def walk_lower(state: int, depth: int):
        spend()
        if depth == rounds:
            lower.add(state)
            return
        if state in assignment:
            walk_lower(assignment[state], depth + 1)
            return
        for y in sorted(correspondence[state]):
            assignment[state] = y
            walk_lower(y, depth + 1)
            del assignment[state]

    walk_lower(x0, 0)

    # upper bound: per-state setter-utility classes, consistent across visits
    classes: list[dict[Fraction, tuple[int, ...]]] = []
    for members in correspondence:
        by_value: dict[Fraction, list[int]] = {}
        for y in sorted(members):
            by_value.setdefault(problem.setter_utilities[y], []).append(y)
        classes.append({v: tuple(ys) for v, ys in by_value.items()})

    upper: set[int] = set()
    chosen_value: dict[int, Fraction] = {}

    def walk_upper(state: int, depth: int):
        spend()
        if depth == rounds:
            upper.add(state)
            return
        if state in chosen_value:
            for y in classes[state][chosen_value[state]]:
                walk_upper(y, depth + 1)
            return
        for value, members in classes[state].items():
            chosen_value[state] = value
            for y in members:
                walk_upper(y, depth + 1)
            del chosen_value[state]

    walk_upper(x0, 0)
    return OutcomeBounds(lower=frozenset(lower), upper=frozenset(upper),
                         upper_reachable_variant=frozenset(upper))


# ---------------------------------------------------------------------------
# divide-the-dollar machinery


@dataclass(frozen=True)
class Allocation:
    """Division of the dollar on the 1/denom grid, setter share last."""

    units: tuple[int, ...]
    denom: int

    def __post_init__(self):
        if self.denom < 1:
            raise ValidationError("denominator must be positive")
        if any(u < 0 for u in self.units):
            raise ValidationError("shares must be nonnegative")
        if sum(self.units) != self.denom:
            raise ValidationError(
                f"shares sum to {sum(self.units)}/{self.denom}, expected exactly 1")
        if len(self.units) < 2:
            raise ValidationError("need at least one voter plus the setter")

    @property
    def n_voters(self) -> int:
        return len(self.units) - 1

    @property
    def shares(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(u, self.denom) for u in self.units)


def dtd_beta(allocation: Allocation) -> Allocation:
    """Zero out the (n-1)/2 largest voter shares into the setter's share.

    Ties select the lower-indexed voters.  The third iterate is the
    dictator allocation when n = 3.
    """
    n = allocation.n_voters
    if n % 2 == 0:
        raise ValidationError("the share-grab operator needs an odd number of voters")
    take = (n - 1) // 2
    order = sorted(range(n), key=lambda i: (-allocation.units[i], i))
    grabbed = set(order[:take])
    units = list(allocation.units)
    moved = sum(units[i] for i in grabbed)
    for i in grabbed:
        units[i] = 0
    units[n] += moved
    return Allocation(units=tuple(units), denom=allocation.denom)


def dtd_beta_power(allocation: Allocation, k: int) -> Allocation:
    for _ in range(k):
        allocation = dtd_beta(allocation)
    return allocation


def dtd_profile(n: int, m: int, rounds: int, flavor: str) -> StrategyProfile:
    """Share-grabbing equilibrium profiles over the denominator-m grid.

    `non_capricious`: the setter proposes the grab of the default and
    voters compare grab-iterate continuations, ties going to the
    proposal.  `capricious` (three voters only): identical except ties
    favor the proposal only in the last two rounds, which caps the
    setter at the two-fold grab of the initial default for every
    horizon of at least two rounds.
    """
    if flavor not in ("non_capricious", "capricious"):
        raise ValidationError(f"unknown flavor {flavor!r}")
    if flavor == "capricious" and n != 3:
        raise ValidationError("the capricious construction is specific to three voters")
    if n % 2 == 0:
        raise ValidationError("odd voter count required")
    if rounds < 2:
        raise ValidationError("need at least two rounds")
    from .distributions import DivideDollarGrid
    grid = DivideDollarGrid(n=n, m=m)

    @lru_cache(maxsize=None)
    def power_idx(x: int, k: int) -> int:
        if k == 0:
            return x
        return grid.index(dtd_beta(grid.allocation(power_idx(x, k - 1))))

    def propose(t, x):
        return (power_idx(x, 1), False)

    if flavor == "non_capricious":
        def vote(i, t, x, a):
            k = rounds - t
            ca = grid.allocation(power_idx(a, k))
            cr = grid.allocation(power_idx(x, k))
            return ca.units[i] >= cr.units[i]
    else:
        def vote(i, t, x, a):
            k = min(rounds - t, 2)
            ca = grid.allocation(power_idx(a, k))
            cr = grid.allocation(power_idx(x, k))
            if ca.units[i] != cr.units[i]:
                return ca.units[i] > cr.units[i]
            return t >= rounds - 1

    return StrategyProfile(horizon=rounds, propose=propose, vote=vote,
                           label=f"dtd-{flavor}")
