"""Static collective choice layer.

A collective choice problem is a finite labeled policy set together
with exact-rational utilities for n voters and a single agenda setter.
The strict majority relation is derived from the voter utilities, or
supplied directly as a tournament override for relation-level fixtures
whose voter profiles are not pinned down.

On top of the problem sit voting rules (quota or explicit families of
winning coalitions), acceptance sets, improvability certificates,
manipulability, and the uniform improvement margin used to bound how
many proposal rounds the setter needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil
from typing import Iterable, Optional

import numpy as np

from .errors import UnsupportedCombinationError, ValidationError
from .rationals import ScaledInts


# ---------------------------------------------------------------------------
# tournaments


@dataclass(frozen=True)
class TournamentSpec:
    """Complete antisymmetric strict relation over policy indices.

    `edges` holds one (winner, loser) pair per unordered policy pair.
    """

    size: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        seen = set()
        for winner, loser in self.edges:
            if not (0 <= winner < self.size and 0 <= loser < self.size):
                raise ValidationError(f"tournament edge ({winner},{loser}) out of range")
            if winner == loser:
                raise ValidationError("tournament relation must be irreflexive")
            key = (min(winner, loser), max(winner, loser))
            if key in seen:
                raise ValidationError(f"both orientations given for pair {key}")
            seen.add(key)
        expected = self.size * (self.size - 1) // 2
        if len(seen) != expected:
            raise ValidationError(
                f"tournament incomplete: {len(seen)} of {expected} pairs oriented")

    @staticmethod
    def from_edges(size: int, edges: Iterable[tuple[int, int]]) -> "TournamentSpec":
        return TournamentSpec(size, frozenset((int(w), int(l)) for w, l in edges))

    def beats(self, x: int, y: int) -> bool:
        return (x, y) in self.edges


# ---------------------------------------------------------------------------
# voting rules


@dataclass(frozen=True)
class VotingRule:
    """Family of winning voter coalitions.

    Quota rules store only the quota; explicit rules store the antichain
    of minimal winning coalitions as voter bitmasks (n <= 63, so a
    coalition is one machine word).  Monotone closure is implicit: any
    superset of a winning coalition wins.
    """

    n: int
    quota: Optional[int] = None
    min_coalitions: tuple[int, ...] = ()

    def __post_init__(self):
        if not (1 <= self.n <= 63):
            raise ValidationError(f"voter count {self.n} outside supported range 1..63")
        if self.quota is not None:
            if not (1 <= self.quota <= self.n):
                raise ValidationError(f"quota {self.quota} outside 1..{self.n}")
            if self.min_coalitions:
                raise ValidationError("give either a quota or explicit coalitions, not both")
            return
        if not self.min_coalitions:
            raise ValidationError("explicit rule needs at least one winning coalition")
        full = (1 << self.n) - 1
        for mask in self.min_coalitions:
            if mask == 0 or mask & ~full:
                raise ValidationError(f"coalition mask {mask:#x} invalid for n={self.n}")
        masks = sorted(set(self.min_coalitions))
        for i, a in enumerate(masks):
            for b in masks[i + 1:]:
                if a & b == a or a & b == b:
                    raise ValidationError("minimal coalitions must form an antichain")
        object.__setattr__(self, "min_coalitions", tuple(masks))

    @staticmethod
    def quota_rule(n: int, q: int) -> "VotingRule":
        return VotingRule(n=n, quota=q)

    @staticmethod
    def simple_majority(n: int) -> "VotingRule":
        if n % 2 == 0:
            raise ValidationError(
                "simple majority is only defined here for an odd number of voters; "
                "use an explicit coalition family for even n")
        return VotingRule(n=n, quota=(n + 1) // 2)

    @staticmethod
    def explicit(n: int, coalitions: Iterable[Iterable[int]]) -> "VotingRule":
        masks = []
        for coalition in coalitions:
            mask = 0
            for voter in coalition:
                if not 0 <= voter < n:
                    raise ValidationError(f"voter {voter} out of range for n={n}")
                mask |= 1 << voter
            masks.append(mask)
        # keep only minimal masks so the stored family is an antichain
        minimal = [m for m in masks
                   if not any(o != m and o & m == o for o in masks)]
        return VotingRule(n=n, min_coalitions=tuple(sorted(set(minimal))))

    @property
    def is_simple_majority(self) -> bool:
        return self.quota is not None and self.n % 2 == 1 and self.quota == (self.n + 1) // 2

    def wins(self, mask: int) -> bool:
        if self.quota is not None:
            return mask.bit_count() >= self.quota
        return any(c & mask == c for c in self.min_coalitions)

    @property
    def veto_proof(self) -> bool:
        """No single voter belongs to every winning coalition."""
        if self.quota is not None:
            return self.quota <= self.n - 1
        return all(any(not (c >> i) & 1 for c in self.min_coalitions)
                   for i in range(self.n))

    def iter_min_coalitions(self):
        """Minimal winning coalitions; materialized on demand for quota rules."""
        if self.quota is None:
            yield from self.min_coalitions
            return
        from itertools import combinations
        for combo in combinations(range(self.n), self.quota):
            mask = 0
            for voter in combo:
                mask |= 1 << voter
            yield mask


# ---------------------------------------------------------------------------
# the problem itself


@dataclass(frozen=True)
class CollectiveChoiceProblem:
    """Finite policy set plus exact-rational preferences.

    voter_utilities has one row per voter, one column per policy.  When
    `majority_override` is present it replaces the profile-derived
    strict majority relation; utility-level operations then refuse the
    problem, since the two descriptions need not be consistent.

    `gfa` asserts the generic-finite-alternatives regime: odd voter
    count and no within-row utility ties for any player.
    """

    policies: tuple[str, ...]
    voter_utilities: tuple[tuple[Fraction, ...], ...]
    setter_utilities: tuple[Fraction, ...]
    majority_override: Optional[TournamentSpec] = None
    gfa: bool = False

    def __post_init__(self):
        m = len(self.policies)
        if m < 1:
            raise ValidationError("need at least one policy")
        if len(set(self.policies)) != m:
            raise ValidationError("duplicate policy labels")
        if len(self.setter_utilities) != m:
            raise ValidationError(
                f"setter utility row has {len(self.setter_utilities)} entries, expected {m}")
        if not self.voter_utilities:
            raise ValidationError("need at least one voter")
        for i, row in enumerate(self.voter_utilities):
            if len(row) != m:
                raise ValidationError(
                    f"voter {i + 1} utility row has {len(row)} entries, expected {m}")
        if self.majority_override is not None and self.majority_override.size != m:
            raise ValidationError("override tournament size does not match policy count")
        if self.gfa:
            if len(self.voter_utilities) % 2 == 0:
                raise ValidationError("gfa requires an odd number of voters")
            for name, row in self._named_rows():
                if len(set(row)) != m:
                    raise ValidationError(f"gfa requires strict preferences; {name} has ties")

    def _named_rows(self):
        for i, row in enumerate(self.voter_utilities):
            yield f"voter {i + 1}", row
        yield "agenda setter", self.setter_utilities

    # -- basic views --------------------------------------------------------

    @property
    def num_policies(self) -> int:
        return len(self.policies)

    @property
    def n(self) -> int:
        return len(self.voter_utilities)

    def policy_index(self, label: str) -> int:
        try:
            return self.policies.index(label)
        except ValueError:
            raise ValidationError(f"unknown policy label {label!r}") from None

    def check_policy(self, x: int) -> int:
        if not 0 <= x < self.num_policies:
            raise ValidationError(f"policy index {x} out of range")
        return x

    @cached_property
    def setter_max(self) -> Fraction:
        return max(self.setter_utilities)

    @cached_property
    def setter_optima(self) -> frozenset[int]:
        top = self.setter_max
        return frozenset(i for i, u in enumerate(self.setter_utilities) if u == top)

    # -- integer fast path ---------------------------------------------------

    @cached_property
    def _ints(self) -> ScaledInts:
        rows = [list(r) for r in self.voter_utilities] + [list(self.setter_utilities)]
        return ScaledInts(rows)

    @cached_property
    def _np_voters(self):
        if not self._ints.as_numpy:
            return None
        return np.stack(self._ints.rows[:-1])

    @cached_property
    def _np_setter(self):
        if not self._ints.as_numpy:
            return None
        return self._ints.rows[-1]

    # -- majority relation ---------------------------------------------------

    def support_mask(self, y: int, x: int, weak: bool = False) -> int:
        """Bitmask of voters preferring y to x (weakly if `weak`)."""
        mask = 0
        for i, row in enumerate(self.voter_utilities):
            if row[y] > row[x] or (weak and row[y] == row[x]):
                mask |= 1 << i
        return mask

    def margin(self, x: int, y: int) -> int:
        """(# voters strictly preferring x) minus (# strictly preferring y)."""
        ahead = behind = 0
        for row in self.voter_utilities:
            if row[x] > row[y]:
                ahead += 1
            elif row[y] > row[x]:
                behind += 1
        return ahead - behind

    def strictly_majority_preferred(self, y: int, x: int) -> bool:
        """True iff y beats x under the strict majority relation."""
        if y == x:
            return False
        if self.majority_override is not None:
            return self.majority_override.beats(y, x)
        return 2 * self.support_mask(y, x).bit_count() > self.n


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class MajorityComparison:
    result: str                       # "x_strict" | "y_strict" | "neither"
    margin: int


@dataclass(frozen=True)
class ImprovementCertificate:
    """Witness that `base` can be improved for the setter and a coalition."""

    base: int
    witness: int
    coalition: Optional[frozenset[int]]   # None for relation-override problems
    setter_gain: Fraction


@dataclass(frozen=True)
class MarginReport:
    """Uniform improvement margin over the delta-suboptimal region.

    eta_star maps each delta-suboptimal policy to the largest eta such
    that some alternative improves the setter and a full winning
    coalition by at least eta.  eta_delta is the minimum over that
    region; t_bound the induced round bound, undefined (None) whenever
    the margin is not strictly positive.
    """

    delta: Fraction
    gamma_set: tuple[int, ...]
    eta_star: dict[int, Fraction]
    eta_delta: Optional[Fraction]
    t_bound: Optional[int]

    @property
    def lemma_holds(self) -> bool:
        return self.eta_delta is not None and self.eta_delta > 0


# ---------------------------------------------------------------------------
# operations


def majority_compare(problem: CollectiveChoiceProblem, x: int, y: int) -> MajorityComparison:
    """Compare two policies under the strict majority relation.

    The margin is always the utility-level vote count difference; with a
    majority override in place the relation verdict comes from the
    override while the margin still reports the raw profile count.
    """
    problem.check_policy(x)
    problem.check_policy(y)
    margin = 0 if x == y else problem.margin(x, y)
    if x == y:
        return MajorityComparison("neither", 0)
    if problem.strictly_majority_preferred(x, y):
        return MajorityComparison("x_strict", margin)
    if problem.strictly_majority_preferred(y, x):
        return MajorityComparison("y_strict", margin)
    return MajorityComparison("neither", margin)


def _require_simple_majority_for_override(problem, rule):
    if problem.majority_override is not None and not rule.is_simple_majority:
        raise UnsupportedCombinationError(
            "a majority override defines only the simple-majority relation; "
            "pair explicit or non-majority rules with utility-level problems")


def acceptance_set(problem: CollectiveChoiceProblem, rule: VotingRule,
                   x: int, mode: str) -> frozenset[int]:
    """Policies some winning coalition accepts over default x.

    mode "strict": a winning coalition strictly prefers y.
    mode "weak": a winning coalition weakly prefers y (always contains x).
    mode "almost_strict": the strict set plus x itself; on finite spaces
    the closure operation degenerates to exactly this.
    """
    problem.check_policy(x)
    if rule.n != problem.n:
        raise ValidationError(f"rule is for {rule.n} voters, problem has {problem.n}")
    if mode not in ("strict", "weak", "almost_strict"):
        raise ValidationError(f"unknown acceptance mode {mode!r}")
    _require_simple_majority_for_override(problem, rule)

    if problem.majority_override is not None:
        strict = frozenset(
            y for y in range(problem.num_policies)
            if problem.majority_override.beats(y, x))
        if mode == "strict":
            return strict
        return strict | {x}

    members = []
    for y in range(problem.num_policies):
        if mode == "strict" and y == x:
            continue
        mask = problem.support_mask(y, x, weak=(mode == "weak"))
        if rule.wins(mask):
            members.append(y)
    out = frozenset(members)
    if mode == "almost_strict":
        out |= {x}
    return out


def is_improvable(problem: CollectiveChoiceProblem, rule: VotingRule,
                  x: int) -> Optional[ImprovementCertificate]:
    """Best improvement certificate at x, or None if x is unimprovable.

    Among witnesses the setter-utility maximizer is returned, ties
    broken by lowest policy index.  Relation-override problems get a
    certificate without a voter coalition (votes are relation-level).
    """
    problem.check_policy(x)
    _require_simple_majority_for_override(problem, rule)
    base_u = problem.setter_utilities[x]
    best = None
    for y in range(problem.num_policies):
        if problem.setter_utilities[y] <= base_u:
            continue
        if best is not None and problem.setter_utilities[y] <= problem.setter_utilities[best]:
            continue
        if problem.majority_override is not None:
            if problem.majority_override.beats(y, x):
                best = y
            continue
        if rule.wins(problem.support_mask(y, x)):
            best = y
    if best is None:
        return None
    coalition = None
    if problem.majority_override is None:
        gainers = problem.support_mask(best, x)
        coalition = _canonical_winning_subcoalition(rule, gainers)
    return ImprovementCertificate(
        base=x, witness=best, coalition=coalition,
        setter_gain=problem.setter_utilities[best] - base_u)


def _canonical_winning_subcoalition(rule: VotingRule, gainers: int) -> frozenset[int]:
    if rule.quota is not None:
        picked, mask = [], gainers
        while mask and len(picked) < rule.quota:
            low = (mask & -mask).bit_length() - 1
            picked.append(low)
            mask &= mask - 1
        return frozenset(picked)
    for coalition in rule.min_coalitions:
        if coalition & gainers == coalition:
            return frozenset(i for i in range(rule.n) if (coalition >> i) & 1)
    raise ValidationError("gainer set contains no winning coalition")  # pragma: no cover


def unimprovable_set(problem: CollectiveChoiceProblem, rule: VotingRule) -> frozenset[int]:
    """Fixed points of improvement: no coalition-backed setter gain exists."""
    fast = _unimprovable_fast(problem, rule)
    if fast is not None:
        return fast
    return frozenset(x for x in range(problem.num_policies)
                     if is_improvable(problem, rule, x) is None)


def _unimprovable_fast(problem, rule) -> Optional[frozenset[int]]:
    """Vectorized scan; only for quota rules on override-free problems."""
    if problem.majority_override is not None or rule.quota is None:
        return None
    voters, setter = problem._np_voters, problem._np_setter
    if voters is None or problem.num_policies < 64:
        return None
    out = []
    for x in range(problem.num_policies):
        counts = (voters > voters[:, x:x + 1]).sum(axis=0)
        if not np.any((counts >= rule.quota) & (setter > setter[x])):
            out.append(x)
    return frozenset(out)


@dataclass(frozen=True)
class ManipulabilityReport:
    manipulable: bool
    blocking: frozenset[int]          # unimprovable policies outside the setter optima


def is_manipulable(problem: CollectiveChoiceProblem, rule: VotingRule) -> ManipulabilityReport:
    """True iff every policy outside the setter's optimum set is improvable."""
    stuck = unimprovable_set(problem, rule)
    blocking = stuck - problem.setter_optima
    return ManipulabilityReport(manipulable=not blocking, blocking=blocking)


def uniform_margin(problem: CollectiveChoiceProblem, rule: VotingRule,
                   delta: Fraction) -> MarginReport:
    """Uniform improvement margin for the delta-suboptimal policies.

    For each x with setter shortfall at least delta, eta_star(x) is the
    best over alternatives y of min(setter gain, coalition-min voter
    gain), where for a quota rule the coalition-min gain is the q-th
    largest voter gain and for explicit families it is maximized over
    the minimal winning coalitions.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValidationError("delta must be positive")
    if problem.majority_override is not None:
        raise UnsupportedCombinationError(
            "uniform_margin needs utility-consistent majorities; "
            "relation overrides carry no gain information")
    if rule.n != problem.n:
        raise ValidationError(f"rule is for {rule.n} voters, problem has {problem.n}")

    top = problem.setter_max
    gamma = tuple(x for x in range(problem.num_policies)
                  if top >= problem.setter_utilities[x] + delta)
    if not gamma:
        return MarginReport(delta=delta, gamma_set=(), eta_star={},
                            eta_delta=None, t_bound=0)

    eta_star: dict[int, Fraction] = {}
    fast = _eta_star_fast(problem, rule, gamma)
    if fast is not None:
        eta_star = fast
    else:
        for x in gamma:
            eta_star[x] = _eta_star_one(problem, rule, x)

    eta_delta = min(eta_star.values())
    t_bound: Optional[int] = None
    if eta_delta > 0:
        spread = top - min(problem.setter_utilities)
        t_bound = max(1, ceil(spread / eta_delta))
    return MarginReport(delta=delta, gamma_set=gamma, eta_star=eta_star,
                        eta_delta=eta_delta, t_bound=t_bound)


def _eta_star_one(problem, rule, x: int) -> Fraction:
    best = None
    for y in range(problem.num_policies):
        setter_gain = problem.setter_utilities[y] - problem.setter_utilities[x]
        if best is not None and setter_gain <= best:
            continue
        gains = [row[y] - row[x] for row in problem.voter_utilities]
        if rule.quota is not None:
            coalition_gain = sorted(gains, reverse=True)[rule.quota - 1]
        else:
            coalition_gain = max(
                min(gains[i] for i in range(rule.n) if (mask >> i) & 1)
                for mask in rule.min_coalitions)
        value = min(setter_gain, coalition_gain)
        if best is None or value > best:
            best = value
    return best


def _eta_star_fast(problem, rule, gamma) -> Optional[dict[int, Fraction]]:
    """int64 kernel for quota rules on large problems."""
    if rule.quota is None:
        return None
    voters, setter = problem._np_voters, problem._np_setter
    if voters is None or problem.num_policies < 64:
        return None
    kth = voters.shape[0] - rule.quota    # q-th largest == this partition index
    out = {}
    for x in gamma:
        setter_gain = setter - setter[x]
        gains = voters - voters[:, x:x + 1]
        coalition_gain = np.partition(gains, kth, axis=0)[kth]
        value = np.minimum(setter_gain, coalition_gain)
        out[x] = problem._ints.to_fraction(int(value.max()))
    return out
