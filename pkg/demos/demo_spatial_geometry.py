"""Spatial politics in three dimensions: genericity and witnesses.

With Euclidean preferences and at least three policy dimensions, any
point other than the setter's ideal admits an improvement preferred by
her and a strict voter majority — provided no four ideal points are
coplanar in any coordinate triple.  The check is an exact determinant
scan; the witness is built constructively in the setter's tangent plane
and verified with exact rational inequalities.
"""

from fractions import Fraction

from agendalab import check_noncoplanarity, gen_spatial, spatial_witness

F = Fraction


def main():
    profile = gen_spatial(3, 5, seed=42)
    print("five voters plus a setter, ideal points on the 2^-20 grid")
    report = check_noncoplanarity(profile)
    print("non-coplanar in every 3-projection:", report.passes)

    x = (F(1, 3), F(1, 4), F(1, 5))
    trace = spatial_witness(profile, x)
    print()
    print("base point:", tuple(str(c) for c in x))
    print("working dims:", trace.dims)
    print("coalition (0-based voters):", sorted(trace.majority_coalition))
    print("step sizes: epsilon =", trace.epsilon,
          "| off-plane =", trace.epsilon_off_plane, "| blend =", trace.beta)
    gain = profile.utility(5, trace.witness) - profile.utility(5, x)
    print("setter gain at the witness (exact):", gain)
    for j in sorted(trace.majority_coalition):
        voter_gain = profile.utility(j, trace.witness) - profile.utility(j, x)
        print(f"voter {j + 1} gain: {voter_gain} > 0: {voter_gain > 0}")

    print()
    failures = 0
    for k in range(500):
        if not check_noncoplanarity(gen_spatial(3, 5, seed=1000 + k)).passes:
            failures += 1
    print(f"500 seeded draws: {failures} coplanarity failures "
          "(degenerate profiles are measure-zero)")


if __name__ == "__main__":
    main()
