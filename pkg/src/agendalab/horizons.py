"""Commitment benchmarks and horizon comparison.

Three nested reachability notions bound what different commitment
technologies deliver: arbitrary majority chains (full commitment),
length-two chains (fixed agendas), and chains that follow the favorite
improvement step by step (no commitment).  The infinite-horizon
benchmark comes through the unique stable set under the joint
setter-and-majority dominance relation; the finite/infinite payoff
comparison then splits every problem into exactly one of two cases.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import phi_iterates
from .errors import InternalInvariantError, ValidationError
from .problems import CollectiveChoiceProblem, VotingRule


def _majority_rule(problem: CollectiveChoiceProblem) -> VotingRule:
    return VotingRule.simple_majority(problem.n)


def _weak_step(problem, a: int, b: int) -> bool:
    """One chain step from a to b: stay put or strict majority win."""
    return a == b or problem.strictly_majority_preferred(b, a)


@dataclass(frozen=True)
class ReachabilityReport:
    mode: str
    start: int
    members: frozenset[int]
    best_for_setter: int
    witness_chain: tuple[int, ...]


def reachability(problem: CollectiveChoiceProblem, x0: int, mode: str,
                 k: Optional[int] = None) -> ReachabilityReport:
    """Reachability closures from a default under majority chains.

    mode "reachable": endpoints of finite chains of majority wins.
    mode "k_reachable": chains of at most k steps (k=0 gives {x0}).
    mode "two_reachable": the k=2 case, the policies not covered by x0.
    mode "credible": the favorite-improvement orbit (gfa only) — chains
    the setter can walk without commitment.
    """
    problem.check_policy(x0)
    if mode == "two_reachable":
        mode, k = "k_reachable", 2
    if mode == "k_reachable":
        if k is None or k < 0:
            raise ValidationError("k_reachable needs k >= 0")
        layers = {x0: 0}
        frontier = {x0}
        for depth in range(1, k + 1):
            frontier = {
                y for x in frontier for y in range(problem.num_policies)
                if _weak_step(problem, x, y)}
            for y in frontier:
                layers.setdefault(y, depth)
        members = frozenset(layers)
        best = _best(problem, members)
        chain = _bfs_chain(problem, x0, best)
        return ReachabilityReport(mode=f"k_reachable({k})" if k != 2 else "two_reachable",
                                  start=x0, members=members,
                                  best_for_setter=best, witness_chain=chain)
    if mode == "reachable":
        members, parent = _bfs(problem, x0)
        best = _best(problem, members)
        return ReachabilityReport(mode=mode, start=x0, members=frozenset(members),
                                  best_for_setter=best,
                                  witness_chain=_unwind(parent, x0, best))
    if mode == "credible":
        if not problem.gfa:
            raise ValidationError("credible reachability needs the single-valued "
                                  "improvement map, i.e. gfa")
        rule = _majority_rule(problem)
        orbit = phi_iterates(problem, rule, x0, problem.num_policies)
        seen: list[int] = []
        for x in orbit:
            if seen and x == seen[-1]:
                break
            seen.append(x)
        members = frozenset(seen)
        best = _best(problem, members)
        return ReachabilityReport(mode=mode, start=x0, members=members,
                                  best_for_setter=best,
                                  witness_chain=tuple(seen[:seen.index(best) + 1]))
    raise ValidationError(f"unknown reachability mode {mode!r}")


def _bfs(problem, x0):
    parent = {x0: None}
    queue = deque([x0])
    while queue:
        x = queue.popleft()
        for y in range(problem.num_policies):
            if y not in parent and problem.strictly_majority_preferred(y, x):
                parent[y] = x
                queue.append(y)
    return set(parent), parent


def _unwind(parent, x0, target) -> tuple[int, ...]:
    chain = [target]
    while chain[-1] != x0:
        chain.append(parent[chain[-1]])
    return tuple(reversed(chain))


def _bfs_chain(problem, x0, target) -> tuple[int, ...]:
    members, parent = _bfs(problem, x0)
    return _unwind(parent, x0, target)


def _best(problem, members) -> int:
    return min(members, key=lambda y: (-problem.setter_utilities[y], y))


# ---------------------------------------------------------------------------
# stable set


@dataclass(frozen=True)
class StableSetReport:
    members: frozenset[int]
    psi_table: dict              # policy -> favorite stable improvement
    uniqueness_certified: bool


def _dominates(problem, y: int, x: int) -> bool:
    return (problem.setter_utilities[y] > problem.setter_utilities[x]
            and problem.strictly_majority_preferred(y, x))


def stable_set(problem: CollectiveChoiceProblem,
               certify_limit: int = 12) -> StableSetReport:
    """The unique internally and externally stable set under gfa.

    Dominance pairs a strict setter gain with a strict majority win;
    under gfa it refines the setter's strict order and is therefore
    acyclic, so a greedy scan in decreasing setter utility builds the
    stable set.  For small policy sets the full subset enumeration
    certifies that this is the only stable set.
    """
    if not problem.gfa:
        raise ValidationError("stable sets are guaranteed unique only under gfa")
    order = sorted(range(problem.num_policies),
                   key=lambda x: -problem.setter_utilities[x])
    admitted: list[int] = []
    for x in order:
        if not any(_dominates(problem, y, x) for y in admitted):
            admitted.append(x)
    members = frozenset(admitted)

    psi = {}
    for x in range(problem.num_policies):
        candidates = [y for y in members
                      if y == x or problem.strictly_majority_preferred(y, x)]
        psi[x] = min(candidates, key=lambda y: (-problem.setter_utilities[y], y))

    certified = False
    if problem.num_policies <= certify_limit:
        stable_subsets = _enumerate_stable_subsets(problem)
        if stable_subsets != [members]:
            raise InternalInvariantError(
                f"greedy stable set {sorted(members)} but enumeration found "
                f"{[sorted(s) for s in stable_subsets]}")
        certified = True
    return StableSetReport(members=members, psi_table=psi, uniqueness_certified=certified)


def _enumerate_stable_subsets(problem) -> list[frozenset[int]]:
    m = problem.num_policies
    dom = [[_dominates(problem, y, x) for x in range(m)] for y in range(m)]
    found = []
    for bits in range(1 << m):
        inside = [x for x in range(m) if (bits >> x) & 1]
        inside_set = set(inside)
        if any(dom[y][x] for y in inside for x in inside):
            continue
        if all(any(dom[y][x] for y in inside) for x in range(m) if x not in inside_set):
            found.append(frozenset(inside))
    return found


# ---------------------------------------------------------------------------
# horizon comparison


@dataclass(frozen=True)
class HorizonRows:
    start: int
    u_table: dict                # rounds -> setter payoff
    u_inf: Fraction


def horizon_payoffs(problem: CollectiveChoiceProblem, x0: int,
                    t_list) -> HorizonRows:
    """Setter payoffs for finite horizons plus the infinite-horizon value.

    Finite payoffs are utilities of improvement iterates; the
    infinite-horizon value is the utility of the favorite stable
    improvement — a characterization import, not a simulated game.
    """
    if not problem.gfa:
        raise ValidationError("horizon payoffs require gfa")
    problem.check_policy(x0)
    t_list = sorted(set(int(t) for t in t_list))
    if t_list and t_list[0] < 1:
        raise ValidationError("horizons start at one round")
    rule = _majority_rule(problem)
    iterates = phi_iterates(problem, rule, x0, max(t_list) if t_list else 1)
    table = {t: problem.setter_utilities[iterates[t]] for t in t_list}
    psi = stable_set(problem).psi_table
    return HorizonRows(start=x0, u_table=table,
                       u_inf=problem.setter_utilities[psi[x0]])


@dataclass(frozen=True)
class HorizonReport:
    u_table: dict                # (x0, rounds) -> payoff, rounds in {1, 2}
    u_inf: dict                  # x0 -> payoff
    r_set: frozenset[int]
    case: str                    # "a" or "b"
    witness: Optional[int]


def horizon_classify(problem: CollectiveChoiceProblem) -> HorizonReport:
    """Split the problem into the two exhaustive horizon-preference cases.

    Case "a": some default makes a long finite deadline strictly better
    than one round, which in turn strictly beats no deadline at all.
    Case "b": the horizon never matters.  The at-most-once-improvable
    set is computed both from the improvement map and from the stable
    set identity; disagreement is an internal error.
    """
    if not problem.gfa:
        raise ValidationError("horizon classification requires gfa")
    rule = _majority_rule(problem)
    report = stable_set(problem)
    psi = report.psi_table
    m = problem.num_policies

    phi1 = {x: phi_iterates(problem, rule, x, 1)[1] for x in range(m)}
    unimprovable = frozenset(x for x in range(m) if phi1[x] == x)
    r_via_phi = frozenset(x for x in range(m) if phi1[x] in unimprovable)
    r_via_psi = frozenset(
        x for x in range(m)
        if phi1[x] == psi[x] and phi1[phi1[x]] == psi[phi1[x]])
    if r_via_phi != r_via_psi:
        raise InternalInvariantError(
            f"at-most-once-improvable sets disagree: {sorted(r_via_phi)} vs "
            f"{sorted(r_via_psi)}")

    u_table = {}
    u_inf = {}
    for x in range(m):
        u_table[(x, 1)] = problem.setter_utilities[phi1[x]]
        u_table[(x, 2)] = problem.setter_utilities[phi1[phi1[x]]]
        u_inf[x] = problem.setter_utilities[psi[x]]

    if r_via_phi == frozenset(range(m)):
        return HorizonReport(u_table=u_table, u_inf=u_inf, r_set=r_via_phi,
                             case="b", witness=None)
    y = min(x for x in range(m) if x not in r_via_phi)
    if problem.setter_utilities[phi1[y]] > problem.setter_utilities[psi[y]]:
        witness = y
    else:
        witness = phi1[y]
    return HorizonReport(u_table=u_table, u_inf=u_inf, r_set=r_via_phi,
                         case="a", witness=witness)
