from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agendalab import (
    SpatialDegeneracyError,
    SpatialProfile,
    ValidationError,
    check_noncoplanarity,
    coplanarity_form,
    gen_spatial,
    spatial_problem,
    spatial_witness,
)

F = Fraction


def point(*coords):
    return tuple(F(c) for c in coords)


def test_gen_spatial_deterministic():
    a = gen_spatial(3, 3, seed=42)
    b = gen_spatial(3, 3, seed=42)
    assert a == b
    assert a != gen_spatial(3, 3, seed=43)
    for p in a.ideal_points:
        for c in p:
            assert 0 <= c <= 1 and c.denominator <= 2**20


def test_gen_spatial_validation():
    with pytest.raises(ValidationError):
        gen_spatial(3, 4, seed=1)           # even voter count
    with pytest.raises(ValidationError):
        gen_spatial(0, 3, seed=1)
    with pytest.raises(ValidationError):
        gen_spatial(1, 3, seed=1, box=((F(1), F(1)),))   # degenerate axis


def test_coplanarity_form_tetrahedron():
    value = coplanarity_form(point(0, 0, 0), point(1, 0, 0),
                             point(0, 1, 0), point(0, 0, 1))
    assert value == 1


def test_coplanarity_form_planar_square():
    value = coplanarity_form(point(0, 0, 0), point(1, 0, 0),
                             point(0, 1, 0), point(1, 1, 0))
    assert value == 0


def _rank_oracle(p1, p2, p3, p4) -> int:
    """Affine rank of the 4-tuple via fraction Gaussian elimination."""
    rows = [[b - a for a, b in zip(p1, p)] for p in (p2, p3, p4)]
    rank = 0
    for col in range(3):
        pivot = next((r for r in range(rank, 3) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(3):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col] / rows[rank][col]
                rows[r] = [v - factor * w for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(min_value=-4, max_value=4), min_size=12, max_size=12))
def test_form_zero_iff_coplanar(flat):
    pts = [point(*flat[i:i + 3]) for i in range(0, 12, 3)]
    value = coplanarity_form(*pts)
    assert (value == 0) == (_rank_oracle(*pts) <= 2)


def test_form_is_alternating():
    rng = random.Random(5)
    for _ in range(20):
        pts = [point(*(rng.randrange(-5, 6) for _ in range(3))) for _ in range(4)]
        base = coplanarity_form(*pts)
        swapped = coplanarity_form(pts[1], pts[0], pts[2], pts[3])
        assert swapped == -base


def test_check_noncoplanarity_requires_3d():
    profile = gen_spatial(2, 3, seed=1)
    with pytest.raises(ValidationError):
        check_noncoplanarity(profile)


def test_check_noncoplanarity_projection_case():
    # coplanar in dims (0,1,2) but not in (0,1,3)
    pts = (point(0, 0, 0, 0), point(1, 0, 0, 1), point(0, 1, 0, 2),
           point(1, 1, 0, 5))
    profile = SpatialProfile(dim=4, ideal_points=pts,
                             box=((F(0), F(10)),) * 4)
    report = check_noncoplanarity(profile)
    assert not report.passes
    dims, players, value = report.violating_tuple
    assert dims == (0, 1, 2) and players == (0, 1, 2, 3) and value == 0
    proj = [tuple(p[k] for k in (0, 1, 3)) for p in pts]
    assert coplanarity_form(*proj) != 0


def test_check_noncoplanarity_passes_generic_draw():
    assert check_noncoplanarity(gen_spatial(3, 5, seed=7)).passes


# ---------------------------------------------------------------------------
# witness construction


def _verify_trace(profile, x, trace):
    n = profile.n_voters
    assert 2 * len(trace.majority_coalition) >= n + 1
    for j in trace.majority_coalition:
        assert profile.utility(j, trace.witness) > profile.utility(j, x)
    assert profile.utility(n, trace.witness) > profile.utility(n, x)
    shift = tuple(m - b for m, b in zip(trace.midpoint, x))
    assert sum(s * g for s, g in zip(shift, trace.plane_normal)) == 0


def test_witness_tetrahedral_midpoint():
    profile = SpatialProfile(
        dim=3,
        ideal_points=(point(1, 0, 0), point(0, 1, 0), point(0, 0, 1),
                      point(F(1, 5), F(1, 7), F(1, 11))),
        box=tuple((F(-2), F(2)) for _ in range(3)))
    assert check_noncoplanarity(profile).passes
    x = point(F(1, 2), F(1, 2), 0)          # midpoint of two voter ideals
    trace = spatial_witness(profile, x)
    _verify_trace(profile, x, trace)


def test_witness_interior_segment_point():
    profile = gen_spatial(3, 5, seed=12)
    setter = profile.setter_ideal
    x = tuple(c / 3 + s * F(2, 3) for c, s in zip(point(1, 1, 1), setter))
    trace = spatial_witness(profile, x)
    _verify_trace(profile, x, trace)


def test_witness_rejects_setter_ideal():
    profile = gen_spatial(3, 5, seed=3)
    with pytest.raises(ValidationError):
        spatial_witness(profile, profile.setter_ideal)


def test_witness_degenerate_collinear_profile():
    profile = SpatialProfile(
        dim=3,
        ideal_points=(point(1, 1, 1), point(2, 2, 2), point(3, 3, 3),
                      point(0, 0, 0)),
        box=tuple((F(0), F(3)) for _ in range(3)))
    with pytest.raises(SpatialDegeneracyError) as info:
        spatial_witness(profile, point(F(1, 2), F(1, 2), F(1, 2)))
    assert info.value.step == "projected gradients"


def test_witness_high_dimension_slice():
    profile = gen_spatial(4, 5, seed=21)
    assert check_noncoplanarity(profile).passes
    x = point(F(1, 3), F(2, 7), F(3, 5), F(1, 9))
    trace = spatial_witness(profile, x)
    assert len(trace.dims) == 3
    # the witness moves only inside the chosen coordinate slice
    for axis in range(4):
        if axis not in trace.dims:
            assert trace.witness[axis] == x[axis]
    _verify_trace(profile, x, trace)


def test_witness_sampled_points_batch():
    rng = random.Random(9)
    for seed in (100, 101):
        profile = gen_spatial(3, 5, seed=seed)
        if not check_noncoplanarity(profile).passes:
            continue
        for _ in range(25):
            x = tuple(F(rng.randrange(0, 2**12 + 1), 2**12) for _ in range(3))
            if x == profile.setter_ideal:
                continue
            _verify_trace(profile, x, spatial_witness(profile, x))


def test_spatial_problem_wraps_utilities():
    profile = gen_spatial(3, 3, seed=8)
    pts = [point(0, 0, 0), point(1, 1, 1)]
    problem = spatial_problem(profile, pts, labels=("origin", "corner"))
    assert problem.num_policies == 2 and problem.n == 3
    assert problem.setter_utilities[0] == profile.utility(3, pts[0])
