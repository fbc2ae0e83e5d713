"""Independent subgame-perfect-equilibrium solver and profile verifier.

This is the ground truth the favorite-improvement predictions are
tested against.  The solver runs backward induction over (round,
default) states of the full extensive form: at each state every
feasible proposal is evaluated, every voter votes as if pivotal between
the two continuation outcomes, and the setter picks her best passing
result.  Nothing here consults the improvement operators.

Generalized adjournment protocols are supported: a proposal may carry
an adjournment provision whose passage ends deliberation immediately.
The richness validator separates protocols for which all of this is
outcome-equivalent from trap protocols that are not.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .engine import StrategyProfile, phi_iterates
from .errors import (
    BudgetExceededError,
    RichnessError,
    UnsupportedCombinationError,
    ValidationError,
)
from .problems import CollectiveChoiceProblem, VotingRule

PRESET_PROTOCOLS = ("amendment", "successive", "open_rule")


@dataclass(frozen=True)
class CustomProtocol:
    """Feasible proposal sets given as an explicit table.

    `table[(round, default)]` lists the available (policy, adjourn)
    actions.  Tables keep the game spec serializable and make the
    richness check a plain scan.
    """

    label: str
    table: dict

    def actions(self, t: int, x: int):
        try:
            return tuple(self.table[(t, x)])
        except KeyError:
            raise ValidationError(
                f"custom protocol {self.label!r} has no feasible set at "
                f"(round {t}, default {x})") from None


Protocol = Union[str, CustomProtocol]


@dataclass(frozen=True)
class GameSpec:
    problem: CollectiveChoiceProblem
    rule: VotingRule
    horizon: int
    initial_default: int
    protocol: Protocol = "amendment"

    def __post_init__(self):
        if self.horizon < 1:
            raise ValidationError("horizon must be at least one round")
        self.problem.check_policy(self.initial_default)
        if self.rule.n != self.problem.n:
            raise ValidationError(
                f"rule is for {self.rule.n} voters, problem has {self.problem.n}")
        if isinstance(self.protocol, str) and self.protocol not in PRESET_PROTOCOLS:
            raise ValidationError(f"unknown protocol {self.protocol!r}")

    @property
    def protocol_name(self) -> str:
        return self.protocol if isinstance(self.protocol, str) else self.protocol.label

    def feasible(self, t: int, x: int) -> tuple[tuple[int, bool], ...]:
        m = self.problem.num_policies
        if self.protocol == "amendment":
            return tuple((y, False) for y in range(m))
        if self.protocol == "successive":
            return tuple((y, True) for y in range(m))
        if self.protocol == "open_rule":
            return tuple((y, False) for y in range(m)) + ((x, True),)
        actions = self.protocol.actions(t, x)
        if not actions:
            raise ValidationError(
                f"empty feasible set at (round {t}, default {x})")
        return actions


@dataclass(frozen=True)
class TraceStep:
    round: int
    default: int
    proposal: int
    adjourn: bool
    approvers: frozenset[int]
    passed: bool


@dataclass(frozen=True)
class SolveReport:
    outcome: int
    value_table: dict            # (round, default) -> continuation outcome
    pivotal_trace: tuple[TraceStep, ...]


@dataclass(frozen=True)
class Violation:
    player: str                  # "setter" or "voter k" (1-based)
    round: int
    default: int
    proposal: Optional[int]
    deviation: str
    gain: Fraction


@dataclass(frozen=True)
class DeviationReport:
    profile_valid: bool
    violations: tuple[Violation, ...]


def _vote_mask(problem, accept_out: int, reject_out: int) -> int:
    """Voters approving when acceptance leads to accept_out, rejection to reject_out.

    With identical continuations everyone is indifferent and votes yes.
    Otherwise each voter backs the strictly preferred continuation; the
    problems this solver accepts have strict preferences, so that
    covers every voter.
    """
    if accept_out == reject_out:
        return (1 << problem.n) - 1
    return problem.support_mask(accept_out, reject_out)


def solve_spe(game: GameSpec, budget: int = 5_000_000) -> SolveReport:
    """Backward induction over (round, default) states.

    Requires strict preferences (gfa) so the equilibrium outcome is
    unique and vote profiles are pinned down; problems with indifference
    belong to `verify_profile`.  Proposal ties for the setter break to
    the lowest (policy, adjourn) pair, which cannot affect the outcome
    under gfa.
    """
    problem = game.problem
    if problem.majority_override is not None:
        raise UnsupportedCombinationError(
            "the oracle votes per voter; realize the override as an explicit "
            "profile (e.g. a tournament realization) first")
    if not problem.gfa:
        raise ValidationError(
            "solve_spe requires gfa; use verify_profile for problems with indifference")
    m = problem.num_policies
    work = game.horizon * m * (m + 1)
    if work > budget:
        raise BudgetExceededError("state space too large for the oracle",
                                  required=work, budget=budget)

    value: dict[tuple[int, int], int] = {}
    chosen: dict[tuple[int, int], tuple[int, bool]] = {}
    for x in range(m):
        value[(game.horizon + 1, x)] = x
    for t in range(game.horizon, 0, -1):
        for x in range(m):
            reject_out = value[(t + 1, x)]
            best = None   # (outcome, proposal, adjourn)
            for a, adjourn in sorted(game.feasible(t, x)):
                accept_out = a if adjourn else value[(t + 1, a)]
                mask = _vote_mask(problem, accept_out, reject_out)
                result = accept_out if game.rule.wins(mask) else reject_out
                if best is None or (problem.setter_utilities[result]
                                    > problem.setter_utilities[best[0]]):
                    best = (result, a, adjourn)
            value[(t, x)] = best[0]
            chosen[(t, x)] = (best[1], best[2])

    trace = []
    t, x = 1, game.initial_default
    while t <= game.horizon:
        a, adjourn = chosen[(t, x)]
        reject_out = value[(t + 1, x)]
        accept_out = a if adjourn else value[(t + 1, a)]
        mask = _vote_mask(problem, accept_out, reject_out)
        passed = game.rule.wins(mask)
        trace.append(TraceStep(
            round=t, default=x, proposal=a, adjourn=adjourn,
            approvers=frozenset(i for i in range(problem.n) if (mask >> i) & 1),
            passed=passed))
        if passed and adjourn:
            return SolveReport(outcome=a, value_table=value, pivotal_trace=tuple(trace))
        x = a if passed else x
        t += 1
    return SolveReport(outcome=x, value_table=value, pivotal_trace=tuple(trace))


# ---------------------------------------------------------------------------
# profile verification


def _profile_vote_actions(game, t, x):
    """Feasible actions, requiring one flag per policy so votes are unambiguous."""
    actions = game.feasible(t, x)
    flags: dict[int, bool] = {}
    for a, adjourn in actions:
        if a in flags and flags[a] != adjourn:
            raise ValidationError(
                "verify_profile needs each policy offered with a single adjournment "
                f"flag; policy {a} at (round {t}, default {x}) has both")
        flags[a] = adjourn
    return actions


def verify_profile(game: GameSpec, profile: StrategyProfile,
                   budget: int = 5_000_000) -> DeviationReport:
    """One-shot deviation audit of a tabulated profile.

    Walks every reachable (round, default) state, computes continuation
    outcomes under the profile, then checks (a) every feasible proposal
    deviation for the setter and (b) the as-if-pivotal convention for
    every voter at every (state, proposal): a strict preference between
    the acceptance and rejection continuations must be voted.  Partial
    profiles raise a validation error listing the missing states.
    """
    problem = game.problem
    if problem.majority_override is not None:
        raise UnsupportedCombinationError(
            "profiles are voted per voter; relation-override problems unsupported")
    if profile.horizon != game.horizon:
        raise ValidationError(
            f"profile horizon {profile.horizon} != game horizon {game.horizon}")

    # reachable defaults per round: a failed vote keeps the default, a passed
    # non-adjourning proposal installs it, a passed adjourning one ends play
    reach: list[set[int]] = [set() for _ in range(game.horizon + 2)]
    reach[1] = {game.initial_default}
    for t in range(1, game.horizon + 1):
        nxt = set()
        for x in reach[t]:
            nxt.add(x)
            for a, adjourn in game.feasible(t, x):
                if not adjourn:
                    nxt.add(a)
        reach[t + 1] = nxt

    work = sum(len(reach[t]) for t in range(1, game.horizon + 1)) \
        * problem.num_policies * (problem.n + 1)
    if work > budget:
        raise BudgetExceededError("profile verification too large",
                                  required=work, budget=budget)

    missing: list[tuple] = []
    for t in range(1, game.horizon + 1):
        for x in sorted(reach[t]):
            try:
                profile.propose(t, x)
            except KeyError:
                missing.append(("proposer", t, x))
            for a, _ in _profile_vote_actions(game, t, x):
                for i in range(problem.n):
                    try:
                        profile.vote(i, t, x, a)
                    except KeyError:
                        missing.append((f"voter {i + 1}", t, x, a))
    if missing:
        raise ValidationError(f"profile not total on reachable states; missing: "
                              f"{missing[:20]}{'...' if len(missing) > 20 else ''}")

    cont: dict[tuple[int, int], int] = {}

    def play(t: int, x: int) -> int:
        if t > game.horizon:
            return x
        key = (t, x)
        if key in cont:
            return cont[key]
        a, adjourn = profile.propose(t, x)
        mask = 0
        for i in range(problem.n):
            if profile.vote(i, t, x, a):
                mask |= 1 << i
        if game.rule.wins(mask):
            out = a if adjourn else play(t + 1, a)
        else:
            out = play(t + 1, x)
        cont[key] = out
        return out

    violations: list[Violation] = []
    for t in range(1, game.horizon + 1):
        for x in sorted(reach[t]):
            on_path_out = play(t, x)
            reject_out = play(t + 1, x)
            for a, adjourn in _profile_vote_actions(game, t, x):
                accept_out = a if adjourn else play(t + 1, a)
                mask = 0
                for i in range(problem.n):
                    if profile.vote(i, t, x, a):
                        mask |= 1 << i
                # setter: one-shot proposal deviation under fixed voting
                dev_out = accept_out if game.rule.wins(mask) else reject_out
                gain = problem.setter_utilities[dev_out] - problem.setter_utilities[on_path_out]
                if gain > 0:
                    violations.append(Violation(
                        player="setter", round=t, default=x, proposal=a,
                        deviation=f"propose {problem.policies[a]}"
                                  f"{' with adjournment' if adjourn else ''}",
                        gain=gain))
                # voters: as-if-pivotal convention between the two continuations
                for i in range(problem.n):
                    row = problem.voter_utilities[i]
                    stake = row[accept_out] - row[reject_out]
                    votes_yes = bool((mask >> i) & 1)
                    if stake > 0 and not votes_yes:
                        violations.append(Violation(
                            player=f"voter {i + 1}", round=t, default=x, proposal=a,
                            deviation="must approve strictly preferred continuation",
                            gain=stake))
                    elif stake < 0 and votes_yes:
                        violations.append(Violation(
                            player=f"voter {i + 1}", round=t, default=x, proposal=a,
                            deviation="must reject strictly dispreferred continuation",
                            gain=-stake))
    return DeviationReport(profile_valid=not violations, violations=tuple(violations))


def play_out(game: GameSpec, profile: StrategyProfile) -> int:
    """Policy implemented when everyone follows the profile."""
    t, x = 1, game.initial_default
    while t <= game.horizon:
        a, adjourn = profile.propose(t, x)
        mask = 0
        for i in range(game.problem.n):
            if profile.vote(i, t, x, a):
                mask |= 1 << i
        if game.rule.wins(mask):
            if adjourn:
                return a
            x = a
        t += 1
    return x


# ---------------------------------------------------------------------------
# richness and protocol equivalence


@dataclass(frozen=True)
class RichnessReport:
    rich: bool
    # protocols mixing adjourn-only and amend-only policies at one state
    subset_witness: Optional[tuple[int, int, int, int]] = None   # (t, x, p_amend, q_adjourn)
    # states where neither the one-step nor the terminal improvement is offered
    feasibility_witness: Optional[tuple[int, int]] = None        # (t, x)


def check_richness(game: GameSpec) -> RichnessReport:
    """Scan all (round, default) states for the richness conditions.

    A state fails if some policy is offered only without adjournment
    while another is offered only with one, or if neither the one-step
    favorite improvement (without adjournment) nor the remaining-rounds
    improvement iterate (with adjournment) is available.  The named
    presets pass for every problem.

    Note: a literal "all actions share one adjournment flag" reading
    would wrongly reject the open-rule preset (it offers every policy
    without adjournment plus the standing default with one); the
    mixed-only-availability condition implemented here is the one the
    equivalence argument actually needs.
    """
    problem = game.problem
    for t in range(1, game.horizon + 1):
        remaining = game.horizon - t + 1
        for x in range(problem.num_policies):
            actions = set(game.feasible(t, x))
            amend = {a for a, adj in actions if not adj}
            adjourn = {a for a, adj in actions if adj}
            amend_only = sorted(amend - adjourn)
            adjourn_only = sorted(adjourn - amend)
            if amend_only and adjourn_only:
                return RichnessReport(
                    rich=False,
                    subset_witness=(t, x, amend_only[0], adjourn_only[0]))
            iterates = phi_iterates(problem, game.rule, x, remaining, allow_ties=True)
            if (iterates[1], False) not in actions and (iterates[-1], True) not in actions:
                return RichnessReport(rich=False, feasibility_witness=(t, x))
    return RichnessReport(rich=True)


@dataclass(frozen=True)
class EquivalenceReport:
    all_agree: bool
    phi_outcome: int
    outcomes: dict            # protocol name -> outcome


def protocol_equivalence(problem: CollectiveChoiceProblem, rule: VotingRule,
                         rounds: int, x0: int,
                         protocols: list[Protocol]) -> EquivalenceReport:
    """Solve each rich protocol and compare against the improvement iterate.

    Non-rich protocols are refused with the witness pair; solve their
    games directly with `solve_spe` to see what the trap yields.
    """
    phi_out = phi_iterates(problem, rule, x0, rounds)[-1]
    outcomes = {}
    for protocol in protocols:
        game = GameSpec(problem=problem, rule=rule, horizon=rounds,
                        initial_default=x0, protocol=protocol)
        report = check_richness(game)
        if not report.rich:
            witness = report.subset_witness or report.feasibility_witness
            raise RichnessError(
                f"protocol {game.protocol_name!r} is not rich (witness {witness}); "
                "solve it directly with solve_spe to inspect the trap outcome",
                witness=witness)
        outcomes[game.protocol_name] = solve_spe(game).outcome
    agree = all(out == phi_out for out in outcomes.values())
    return EquivalenceReport(all_agree=agree, phi_outcome=phi_out, outcomes=outcomes)
