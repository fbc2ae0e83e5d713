"""Euclidean spatial profiles, the coplanarity test, and witness geometry.

Players evaluate a policy point by (half squared) Euclidean distance to
their ideal points.  The genericity condition checked here — no four
ideal points coplanar in any three-coordinate projection — guarantees
that every point other than the setter's ideal admits an improvement
backed by a strict voter majority.  `spatial_witness` builds one
constructively: it works in the tangent plane of the setter's
indifference surface, tilts toward a majority of projected voter
gradients, then perturbs off the plane along the setter's gradient.
All geometry is exact rational arithmetic; the step-size searches halve
dyadically and the final inequalities are verified exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Optional

from .errors import SpatialDegeneracyError, ValidationError
from .problems import CollectiveChoiceProblem

COORD_DENOM = 2**20

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class SpatialProfile:
    """Ideal points for n voters (first) and the agenda setter (last)."""

    dim: int
    ideal_points: tuple[Point, ...]
    box: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dimension must be at least 1")
        if len(self.ideal_points) < 2:
            raise ValidationError("need at least one voter plus the setter")
        for p in self.ideal_points:
            if len(p) != self.dim:
                raise ValidationError("ideal point dimension mismatch")
        if len(self.box) != self.dim:
            raise ValidationError("box bounds dimension mismatch")

    @property
    def n_voters(self) -> int:
        return len(self.ideal_points) - 1

    @property
    def setter_ideal(self) -> Point:
        return self.ideal_points[-1]

    def utility(self, player: int, point: Point) -> Fraction:
        """-1/2 squared distance from the player's ideal point."""
        ideal = self.ideal_points[player]
        return -sum((a - b) ** 2 for a, b in zip(point, ideal)) / 2


def gen_spatial(d: int, n: int, seed: int, box=None) -> SpatialProfile:
    """Seeded ideal-point profile with coordinates on the 2**-20 grid.

    Identical (d, n, seed, box) inputs reproduce the profile bit for
    bit.  Generation does not enforce genericity; run the coplanarity
    check to audit a draw.
    """
    if n % 2 == 0 or n < 1:
        raise ValidationError("voter count must be odd and positive")
    if d < 1:
        raise ValidationError("dimension must be at least 1")
    if box is None:
        box = tuple((Fraction(0), Fraction(1)) for _ in range(d))
    box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)
    for lo, hi in box:
        if hi <= lo:
            raise ValidationError(f"degenerate box axis [{lo}, {hi}]")
    rng = random.Random(seed)
    points = []
    for _ in range(n + 1):
        coords = []
        for lo, hi in box:
            lo_k = -((-lo.numerator * COORD_DENOM) // lo.denominator)   # ceil
            hi_k = (hi.numerator * COORD_DENOM) // hi.denominator       # floor
            if hi_k < lo_k:
                raise ValidationError(f"degenerate box axis [{lo}, {hi}]")
            coords.append(Fraction(rng.randrange(lo_k, hi_k + 1), COORD_DENOM))
        points.append(tuple(coords))
    return SpatialProfile(dim=d, ideal_points=tuple(points), box=box)


# ---------------------------------------------------------------------------
# coplanarity


def coplanarity_form(p1: Point, p2: Point, p3: Point, p4: Point) -> Fraction:
    """Signed volume form: zero exactly on coplanar 4-tuples in R^3.

    Alternating in its arguments; computed on a shared integer grid so
    large batches stay fast and exact.
    """
    if not len(p1) == len(p2) == len(p3) == len(p4) == 3:
        raise ValidationError("the coplanarity form takes points in R^3")
    scale = lcm(*(c.denominator for p in (p1, p2, p3, p4) for c in p))
    ints = [[c.numerator * (scale // c.denominator) for c in p]
            for p in (p1, p2, p3, p4)]
    u = [ints[1][k] - ints[0][k] for k in range(3)]
    v = [ints[2][k] - ints[0][k] for k in range(3)]
    w = [ints[3][k] - ints[0][k] for k in range(3)]
    det = (u[0] * (v[1] * w[2] - v[2] * w[1])
           - u[1] * (v[0] * w[2] - v[2] * w[0])
           + u[2] * (v[0] * w[1] - v[1] * w[0]))
    return Fraction(det, scale**3)


@dataclass(frozen=True)
class CoplanarityReport:
    passes: bool
    # (dims (a, b, c), players (i, j, k, l) with the setter as index n, value)
    violating_tuple: Optional[tuple[tuple[int, int, int],
                                    tuple[int, int, int, int], Fraction]] = None


def check_noncoplanarity(profile: SpatialProfile) -> CoplanarityReport:
    """Exact determinant test over every projection and player 4-subset.

    Scans dimension triples and player subsets in lexicographic order
    and reports the first violation found.
    """
    if profile.dim < 3:
        raise ValidationError("the non-coplanarity condition needs at least 3 dimensions")
    players = range(len(profile.ideal_points))
    for dims in combinations(range(profile.dim), 3):
        projected = [tuple(p[k] for k in dims) for p in profile.ideal_points]
        for subset in combinations(players, 4):
            value = coplanarity_form(*(projected[i] for i in subset))
            if value == 0:
                return CoplanarityReport(passes=False,
                                         violating_tuple=(dims, subset, value))
    return CoplanarityReport(passes=True)


# ---------------------------------------------------------------------------
# constructive witness


@dataclass(frozen=True)
class ImprovementTrace:
    """Full record of one constructive improvement at a base point."""

    base: Point
    dims: tuple[int, int, int]
    plane_normal: Point                      # setter gradient at the base
    projected_gradients: tuple[tuple[Fraction, Fraction, Fraction], ...]
    direction: tuple[Fraction, Fraction, Fraction]
    epsilon: Fraction
    epsilon_off_plane: Fraction
    beta: Fraction
    midpoint: Point                          # on the tangent plane, majority-preferred
    witness: Point                           # strict gain for setter and coalition
    majority_coalition: frozenset[int]


def _dot(a, b) -> Fraction:
    return sum(x * y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _scale(a, s: Fraction):
    return tuple(x * s for x in a)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _halve_until(start: Fraction, ok, cap: int = 128) -> Fraction:
    value = Fraction(start)
    for _ in range(cap):
        if ok(value):
            return value
        value /= 2
    raise SpatialDegeneracyError(
        "dyadic step search exhausted its halving budget", step="step-size search")


def spatial_witness(profile: SpatialProfile, x: Point) -> ImprovementTrace:
    """Constructive improvement at x for the setter and a strict majority.

    Preconditions: x differs from the setter's ideal and the profile
    passes the coplanarity check (degenerate inputs surface as
    diagnostics naming the failed step).  For more than three dimensions
    the construction runs inside the first coordinate triple where x
    and the setter's ideal differ.
    """
    if len(x) != profile.dim:
        raise ValidationError("query point dimension mismatch")
    x = tuple(Fraction(c) for c in x)
    if x == profile.setter_ideal:
        raise ValidationError("the setter's ideal point admits no improvement")
    if profile.dim < 3:
        raise ValidationError("witness construction needs at least 3 dimensions")

    dims = None
    for cand in combinations(range(profile.dim), 3):
        if any(x[k] != profile.setter_ideal[k] for k in cand):
            dims = cand
            break
    # x != ideal guarantees some differing coordinate, so dims is set
    n = profile.n_voters
    x3 = tuple(x[k] for k in dims)
    ideals3 = [tuple(p[k] for k in dims) for p in profile.ideal_points]
    g_setter = tuple(ideals3[n][k] - x3[k] for k in range(3))
    g_norm_sq = _dot(g_setter, g_setter)

    projections = []
    for i in range(n):
        g_i = tuple(ideals3[i][k] - x3[k] for k in range(3))
        coeff = _dot(g_i, g_setter) / g_norm_sq
        projections.append(_add(g_i, _scale(g_setter, -coeff)))

    lead = next((i for i in range(n) if any(projections[i])), None)
    if lead is None:
        raise SpatialDegeneracyError(
            "all projected voter gradients vanish at the base point",
            step="projected gradients")
    p_lead = projections[lead]
    collinear = {j for j in range(n) if j != lead
                 and _cross(projections[j], p_lead) == (0, 0, 0)}

    omega = _cross(g_setter, p_lead)
    plus = [j for j in range(n)
            if j not in collinear and j != lead and _dot(projections[j], omega) > 0]
    minus = [j for j in range(n)
             if j not in collinear and j != lead and _dot(projections[j], omega) < 0]
    if len(minus) > len(plus):
        omega = _scale(omega, Fraction(-1))
        plus, minus = minus, plus
    coalition = frozenset(plus) | {lead}
    if 2 * len(coalition) < n + 1:
        raise SpatialDegeneracyError(
            "projected gradients split without a strict majority side",
            step="pigeonhole")

    k = 1
    direction = p_lead
    while True:
        direction = _add(_scale(p_lead, Fraction(1, k)),
                         _scale(omega, Fraction(k - 1, k)))
        if all(_dot(projections[j], direction) > 0 for j in coalition):
            break
        k *= 2
        if k > 2**64:
            raise SpatialDegeneracyError(
                "no blend of lead gradient and orthogonal direction works",
                step="direction blend")

    def lift(point3):
        full = list(x)
        for k3, axis in enumerate(dims):
            full[axis] = point3[k3]
        return tuple(full)

    def gains_hold(point3, players) -> bool:
        candidate = lift(point3)
        return all(profile.utility(j, candidate) > profile.utility(j, x)
                   for j in players)

    epsilon = _halve_until(
        Fraction(1),
        lambda e: gains_hold(_add(x3, _scale(direction, e)), coalition))
    midpoint3 = _add(x3, _scale(direction, epsilon))

    eps_off = _halve_until(
        epsilon,
        lambda e: gains_hold(_add(midpoint3, _scale(g_setter, e)), coalition))
    zeta3 = _add(midpoint3, _scale(g_setter, eps_off))

    setter_idx = n

    def witness_ok(b: Fraction) -> bool:
        point3 = _add(_scale(zeta3, b), _scale(x3, 1 - b))
        return (gains_hold(point3, coalition)
                and profile.utility(setter_idx, lift(point3)) > profile.utility(setter_idx, x))

    beta = _halve_until(Fraction(1, 2), witness_ok)
    witness3 = _add(_scale(zeta3, beta), _scale(x3, 1 - beta))

    midpoint = lift(midpoint3)
    witness = lift(witness3)
    normal = tuple(profile.setter_ideal[k] - x[k] for k in range(profile.dim))
    # exact final checks, independent of how the search got here
    assert _dot(tuple(m - b for m, b in zip(midpoint, x)), normal) == 0
    assert profile.utility(setter_idx, witness) > profile.utility(setter_idx, x)
    assert all(profile.utility(j, witness) > profile.utility(j, x) for j in coalition)
    assert 2 * len(coalition) >= n + 1

    return ImprovementTrace(
        base=x, dims=dims, plane_normal=normal,
        projected_gradients=tuple(projections), direction=direction,
        epsilon=epsilon, epsilon_off_plane=eps_off, beta=beta,
        midpoint=midpoint, witness=witness, majority_coalition=coalition)


def spatial_problem(profile: SpatialProfile, points, labels=None,
                    gfa: bool = False) -> CollectiveChoiceProblem:
    """Collective choice problem induced by a finite set of policy points."""
    points = [tuple(Fraction(c) for c in p) for p in points]
    if labels is None:
        labels = tuple(f"p{i}" for i in range(len(points)))
    voters = tuple(
        tuple(profile.utility(i, p) for p in points)
        for i in range(profile.n_voters))
    setter = tuple(profile.utility(profile.n_voters, p) for p in points)
    return CollectiveChoiceProblem(
        policies=tuple(labels), voter_utilities=voters,
        setter_utilities=setter, gfa=gfa)
