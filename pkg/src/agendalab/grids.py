"""Generic finite grids over boxes and simplices.

A grid is generic when every player's preferences are strict across its
nodes and every point of the continuum space lies within epsilon of
some node.  Construction: a lattice fine enough that the covering bound
holds with room for jitter, a seeded rational jitter on every node, and
an exact pairwise tie audit that re-jitters offenders.  The audit is
the certificate; the jitter scheme is reproducible from the seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional

from .errors import BudgetExceededError, GridGenericityError, ValidationError
from .problems import CollectiveChoiceProblem
from .spatial import SpatialProfile

_JITTER_BITS = 16
_JITTER_RANGE = 2**_JITTER_BITS


@dataclass(frozen=True)
class BoxSpace:
    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.bounds:
            raise ValidationError("box needs at least one axis")
        for lo, hi in self.bounds:
            if hi <= lo:
                raise ValidationError(f"degenerate box axis [{lo}, {hi}]")

    @staticmethod
    def unit(d: int) -> "BoxSpace":
        return BoxSpace(tuple((Fraction(0), Fraction(1)) for _ in range(d)))

    @property
    def dim(self) -> int:
        return len(self.bounds)


@dataclass(frozen=True)
class SimplexSpace:
    n_voters: int

    def __post_init__(self):
        if self.n_voters < 1:
            raise ValidationError("need at least one voter")

    @property
    def dim(self) -> int:
        return self.n_voters + 1


@dataclass(frozen=True)
class GridBuildResult:
    problem: CollectiveChoiceProblem
    points: tuple[tuple[Fraction, ...], ...]
    epsilon: Fraction
    covering_sq_bound: Fraction      # certified: strictly below epsilon**2
    attempts: int


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def build_grid(space, epsilon, seed: int, profile: Optional[SpatialProfile] = None,
               anchor=None, max_attempts: int = 32, max_points: int = 500_000,
               jitter: bool = True) -> GridBuildResult:
    """Build a generic epsilon-grid problem over a box or simplex.

    Box grids take utilities from a spatial profile; simplex grids are
    divide-the-dollar style, each player's utility being their own
    share.  An anchor point, when given, is included verbatim as a grid
    node.  Failing the tie audit after the allowed re-jitters raises a
    genericity error naming the tied pair and player.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    if isinstance(space, BoxSpace):
        if profile is None:
            raise ValidationError("box grids need a spatial profile for utilities")
        if profile.dim != space.dim:
            raise ValidationError("profile dimension does not match the box")
        return _build_box(space, epsilon, seed, profile, anchor, max_attempts,
                          max_points, jitter)
    if isinstance(space, SimplexSpace):
        if profile is not None:
            raise ValidationError("simplex grids carry their own share utilities")
        return _build_simplex(space, epsilon, seed, anchor, max_attempts,
                              max_points, jitter)
    raise ValidationError(f"unknown space {type(space).__name__}")


# ---------------------------------------------------------------------------
# box grids


def _build_box(space, epsilon, seed, profile, anchor, max_attempts, max_points,
               jitter):
    d = space.dim
    if anchor is not None:
        anchor = tuple(Fraction(c) for c in anchor)
        if len(anchor) != d:
            raise ValidationError("anchor dimension mismatch")
        for c, (lo, hi) in zip(anchor, space.bounds):
            if not lo <= c <= hi:
                raise ValidationError("anchor lies outside the box")
        # a single anchor may already cover the whole box within epsilon
        corner_sq = _max_corner_distance_sq(anchor, space.bounds)
        if corner_sq < epsilon**2:
            points = (anchor,)
            problem = _spatial_grid_problem(profile, points, clean=True)
            return GridBuildResult(problem=problem, points=points, epsilon=epsilon,
                                   covering_sq_bound=corner_sq, attempts=1)

    cells = []
    for lo, hi in space.bounds:
        length = hi - lo
        # smallest k with (length/k)^2 * d < epsilon^2, i.e. spacing < eps/sqrt(d)
        k = isqrt(_ceil_div(length.numerator**2 * d * epsilon.denominator**2,
                            length.denominator**2 * epsilon.numerator**2)) + 1
        cells.append(k)
    total = 1
    for k in cells:
        total *= k
        if total > max_points:
            raise BudgetExceededError("box grid would exceed the point budget",
                                      required=total, budget=max_points)

    spacings = [(hi - lo) / k for (lo, hi), k in zip(space.bounds, cells)]
    centers = []
    for index in range(total):
        coords, rem = [], index
        for (lo, _hi), k, h in zip(space.bounds, cells, spacings):
            coords.append(lo + (2 * (rem % k) + 1) * h / 2)
            rem //= k
        centers.append(tuple(coords))

    rng = random.Random(seed)

    def jitter_node(center):
        if not jitter:
            return center
        out = []
        for c, h in zip(center, spacings):
            t = rng.randrange(-(_JITTER_RANGE - 1), _JITTER_RANGE)
            out.append(c + t * h / (10 * _JITTER_RANGE))
        return tuple(out)

    points = [jitter_node(c) for c in centers]
    frozen = set()
    if anchor is not None:
        points.append(anchor)
        frozen.add(len(points) - 1)

    def utilities(point):
        return tuple(profile.utility(i, point) for i in range(profile.n_voters + 1))

    attempts = _audit_and_rejitter(
        points, frozen, utilities, max_attempts,
        lambda idx: jitter_node(centers[idx]))

    bound = sum((Fraction(3, 5) * h)**2 for h in spacings)
    if bound >= epsilon**2:   # pragma: no cover - excluded by cell sizing
        raise ValidationError("covering bound violated; epsilon too small for budget")
    clean = True
    problem = _spatial_grid_problem(profile, tuple(points), clean=clean)
    return GridBuildResult(problem=problem, points=tuple(points), epsilon=epsilon,
                           covering_sq_bound=bound, attempts=attempts)


def _max_corner_distance_sq(anchor, bounds) -> Fraction:
    total = Fraction(0)
    for c, (lo, hi) in zip(anchor, bounds):
        total += max((c - lo)**2, (hi - c)**2)
    return total


def _spatial_grid_problem(profile, points, clean):
    labels = tuple(f"n{i}" for i in range(len(points)))
    voters = tuple(
        tuple(profile.utility(i, p) for p in points)
        for i in range(profile.n_voters))
    setter = tuple(profile.utility(profile.n_voters, p) for p in points)
    gfa = clean and profile.n_voters % 2 == 1
    return CollectiveChoiceProblem(policies=labels, voter_utilities=voters,
                                   setter_utilities=setter, gfa=gfa)


# ---------------------------------------------------------------------------
# simplex grids


def _build_simplex(space, epsilon, seed, anchor, max_attempts, max_points, jitter):
    n_players = space.dim
    # smallest m with (11/(10m))^2 * players < epsilon^2
    m = isqrt(_ceil_div(121 * n_players * epsilon.denominator**2,
                        100 * epsilon.numerator**2)) + 1
    total = 1
    for i in range(1, n_players):
        total = total * (m + i) // i
    if total > max_points:
        raise BudgetExceededError("simplex grid would exceed the point budget",
                                  required=total, budget=max_points)

    nodes = [tuple(Fraction(u, m) for u in units)
             for units in _compositions(m, n_players)]
    rng = random.Random(seed)
    scale = Fraction(1, 10 * m * _JITTER_RANGE * n_players)

    def jitter_node(node):
        if not jitter:
            return node
        top = min(range(n_players), key=lambda i: (-node[i], i))
        moved = Fraction(0)
        out = list(node)
        for i in range(n_players):
            if i == top:
                continue
            t = rng.randrange(1, _JITTER_RANGE)
            out[i] = node[i] + t * scale
            moved += t * scale
        out[top] = node[top] - moved
        if out[top] <= 0:   # pragma: no cover - top share always dominates the shift
            return node
        return tuple(out)

    points = [jitter_node(p) for p in nodes]
    frozen = set()
    if anchor is not None:
        anchor = tuple(Fraction(c) for c in anchor)
        if len(anchor) != n_players or any(c < 0 for c in anchor) or sum(anchor) != 1:
            raise ValidationError("anchor is not a point of the simplex")
        points.append(anchor)
        frozen.add(len(points) - 1)

    def utilities(point):
        return tuple(point)

    attempts = _audit_and_rejitter(
        points, frozen, utilities, max_attempts,
        lambda idx: jitter_node(nodes[idx]))

    bound = Fraction(121 * n_players, (10 * m)**2)
    labels = tuple(f"n{i}" for i in range(len(points)))
    voters = tuple(tuple(p[i] for p in points) for i in range(space.n_voters))
    setter = tuple(p[space.n_voters] for p in points)
    problem = CollectiveChoiceProblem(
        policies=labels, voter_utilities=voters, setter_utilities=setter,
        gfa=space.n_voters % 2 == 1)
    return GridBuildResult(problem=problem, points=tuple(points), epsilon=epsilon,
                           covering_sq_bound=bound, attempts=attempts)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# the tie audit


def _audit_and_rejitter(points, frozen, utilities, max_attempts, redraw):
    """Exact per-player tie audit; offenders are re-jittered in place."""
    values = [utilities(p) for p in points]
    n_players = len(values[0]) if values else 0
    for attempt in range(1, max_attempts + 1):
        offender = None
        for player in range(n_players):
            order = sorted(range(len(points)), key=lambda i: values[i][player])
            for a, b in zip(order, order[1:]):
                if values[a][player] == values[b][player]:
                    offender = (player, a, b)
                    break
            if offender:
                break
        if offender is None:
            return attempt
        player, a, b = offender
        victim = b if b not in frozen else a
        if victim in frozen:
            raise GridGenericityError(
                f"anchor nodes tie for player {player + 1}", player=player, pair=(a, b))
        points[victim] = redraw(victim)
        values[victim] = utilities(points[victim])
    raise GridGenericityError(
        f"nodes {offender[1]} and {offender[2]} still tie for player "
        f"{offender[0] + 1} after {max_attempts} attempts",
        player=offender[0], pair=(offender[1], offender[2]))
