"""Distribution-problem generators and the scarcity/transferability audit.

Divide-the-dollar grids, pork-barrel project menus, and transfer
augmentations of arbitrary base problems all share the same simplex
enumeration.  Coarse grids violate the distribution axioms near their
boundaries; the audit makes those violations explicit per (policy,
player) pair so theorem checks can restrict themselves to the clean
region instead of silently failing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .engine import Allocation
from .errors import BudgetExceededError, ValidationError
from .problems import CollectiveChoiceProblem


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _count_compositions(total: int, parts: int) -> int:
    out = 1
    for i in range(1, parts):
        out = out * (total + i) // i
    return out


def _allocation_label(units, m: int) -> str:
    return f"({','.join(str(u) for u in units)})/{m}"


@dataclass(frozen=True)
class DivideDollarGrid:
    """All divisions of the dollar with denominator m for n voters.

    Policies are indexed in lexicographic unit order; the induced
    problem has each player's own share as utility.  Never gfa: share
    ties are everywhere.
    """

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValidationError("need n >= 1 voters and denominator m >= 1")

    @cached_property
    def allocations(self) -> tuple[Allocation, ...]:
        return tuple(Allocation(units=u, denom=self.m)
                     for u in _compositions(self.m, self.n + 1))

    @cached_property
    def _index(self) -> dict:
        return {a.units: i for i, a in enumerate(self.allocations)}

    def index(self, allocation: Allocation) -> int:
        if allocation.denom != self.m:
            raise ValidationError("allocation denominator does not match the grid")
        return self._index[allocation.units]

    def allocation(self, idx: int) -> Allocation:
        return self.allocations[idx]

    @cached_property
    def problem(self) -> CollectiveChoiceProblem:
        labels = tuple(_allocation_label(a.units, self.m) for a in self.allocations)
        voters = tuple(
            tuple(Fraction(a.units[i], self.m) for a in self.allocations)
            for i in range(self.n))
        setter = tuple(Fraction(a.units[self.n], self.m) for a in self.allocations)
        return CollectiveChoiceProblem(policies=labels, voter_utilities=voters,
                                       setter_utilities=setter)


def divide_dollar_problem(n: int, m: int) -> CollectiveChoiceProblem:
    return DivideDollarGrid(n=n, m=m).problem


# ---------------------------------------------------------------------------
# pork barrel


def pork_barrel_problem(projects, m: int, n: int,
                        budget: int = 200_000) -> CollectiveChoiceProblem:
    """Implementation subsets of projects with grid splits of benefits and costs.

    Each project k carries aggregate benefit B_k and cost C_k; a policy
    picks a subset to implement and, for each one, how to split B_k and
    C_k among the n voters and the setter on the 1/m grid.  Utilities
    sum per-player benefit minus cost over implemented projects.
    """
    if m < 1 or n < 1:
        raise ValidationError("need m >= 1 and n >= 1")
    parsed = []
    for b, c in projects:
        b, c = Fraction(b), Fraction(c)
        if b <= 0 or c < 0:
            raise ValidationError("projects need positive benefit and nonnegative cost")
        if (b * m).denominator != 1 or (c * m).denominator != 1:
            raise ValidationError(
                f"benefit {b} and cost {c} must be multiples of 1/{m}")
        parsed.append((int(b * m), int(c * m)))

    players = n + 1
    total = 0
    for mask in range(1 << len(parsed)):
        size = 1
        for k, (b_units, c_units) in enumerate(parsed):
            if (mask >> k) & 1:
                size *= _count_compositions(b_units, players)
                size *= _count_compositions(c_units, players)
        total += size
        if total > budget:
            raise BudgetExceededError("pork policy space exceeds the budget",
                                      required=total, budget=budget)

    labels, rows = [], []
    for mask in range(1 << len(parsed)):
        chosen = [k for k in range(len(parsed)) if (mask >> k) & 1]
        split_lists = []
        for k in chosen:
            b_units, c_units = parsed[k]
            split_lists.append([
                (bs, cs)
                for bs in _compositions(b_units, players)
                for cs in _compositions(c_units, players)])
        for combo in _product(split_lists):
            util = [Fraction(0)] * players
            parts = []
            for k, (bs, cs) in zip(chosen, combo):
                for i in range(players):
                    util[i] += Fraction(bs[i] - cs[i], m)
                parts.append(f"{k}:b{_allocation_label(bs, m)}c{_allocation_label(cs, m)}")
            label = "skip" if not chosen else ";".join(parts)
            labels.append(label)
            rows.append(tuple(util))

    voters = tuple(tuple(row[i] for row in rows) for i in range(n))
    setter = tuple(row[n] for row in rows)
    return CollectiveChoiceProblem(policies=tuple(labels), voter_utilities=voters,
                                   setter_utilities=setter)


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for rest in _product(lists[1:]):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# transfers


def transfers_problem(base: CollectiveChoiceProblem, m: int) -> CollectiveChoiceProblem:
    """Quasi-linear transfer augmentation of a base problem, on the 1/m grid.

    For each base policy the players' total utility is redistributed
    over nonnegative grid allocations; each player's utility is their
    own slice.  Slices of equal total coincide and are deduplicated.
    """
    if m < 1:
        raise ValidationError("need m >= 1")
    players = base.n + 1
    seen: dict[tuple[int, ...], None] = {}
    for x in range(base.num_policies):
        total = sum(row[x] for row in base.voter_utilities) + base.setter_utilities[x]
        if total < 0:
            raise ValidationError(
                f"policy {base.policies[x]!r} has negative total utility {total}")
        scaled = total * m
        if scaled.denominator != 1:
            raise ValidationError(
                f"total utility {total} of {base.policies[x]!r} is not a multiple of 1/{m}")
        for units in _compositions(int(scaled), players):
            seen.setdefault(units, None)
    allocations = sorted(seen)
    labels = tuple(_allocation_label(u, m) for u in allocations)
    voters = tuple(
        tuple(Fraction(u[i], m) for u in allocations) for i in range(base.n))
    setter = tuple(Fraction(u[base.n], m) for u in allocations)
    return CollectiveChoiceProblem(policies=labels, voter_utilities=voters,
                                   setter_utilities=setter)


def gen_distribution(kind: str, **params) -> CollectiveChoiceProblem:
    """Dispatcher over the distribution-problem generators."""
    if kind == "dtd":
        return divide_dollar_problem(params["n"], params["m"])
    if kind == "pork":
        return pork_barrel_problem(params["projects"], params["m"], params["n"],
                                   budget=params.get("budget", 200_000))
    if kind == "transfers":
        return transfers_problem(params["base"], params["m"])
    raise ValidationError(f"unknown distribution kind {kind!r}")


# ---------------------------------------------------------------------------
# axiom audit


@dataclass(frozen=True)
class AxiomViolation:
    policy: int
    player: int                  # voters 0..n-1, setter is index n
    axiom: str


@dataclass(frozen=True)
class AxiomAudit:
    scarcity_violations: tuple[AxiomViolation, ...]
    transferability_violations: tuple[AxiomViolation, ...]

    @property
    def passes(self) -> bool:
        return not self.scarcity_violations and not self.transferability_violations

    def dirty_policies(self) -> frozenset[int]:
        return frozenset(v.policy for v in
                         self.scarcity_violations + self.transferability_violations)

    def clean_policies(self, num_policies: int) -> frozenset[int]:
        """Policies with no violation for any player."""
        return frozenset(range(num_policies)) - self.dirty_policies()


def audit_dp_axioms(problem: CollectiveChoiceProblem) -> AxiomAudit:
    """Exhaustive scarcity and transferability check over (policy, player).

    Scarcity: a policy short of player i's maximum must give some other
    player more than their minimum, or be strictly Pareto dominated.
    Transferability: a policy above player i's minimum must admit an
    alternative strictly better for everyone else.
    """
    rows = list(problem.voter_utilities) + [problem.setter_utilities]
    players = len(rows)
    m = problem.num_policies
    max_u = [max(row) for row in rows]
    min_u = [min(row) for row in rows]
    pareto_improvable = [
        any(all(rows[p][y] > rows[p][x] for p in range(players)) for y in range(m))
        for x in range(m)]

    scarcity, transferability = [], []
    for x in range(m):
        for i in range(players):
            if rows[i][x] < max_u[i]:
                others_gain = any(rows[j][x] > min_u[j]
                                  for j in range(players) if j != i)
                if not others_gain and not pareto_improvable[x]:
                    scarcity.append(AxiomViolation(policy=x, player=i, axiom="scarcity"))
            if rows[i][x] > min_u[i]:
                escape = any(
                    all(rows[j][y] > rows[j][x] for j in range(players) if j != i)
                    for y in range(m))
                if not escape:
                    transferability.append(
                        AxiomViolation(policy=x, player=i, axiom="transferability"))
    return AxiomAudit(scarcity_violations=tuple(scarcity),
                      transferability_violations=tuple(transferability))
