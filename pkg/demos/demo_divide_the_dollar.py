"""Divide-the-dollar on a share grid: how the setter grabs everything.

The share-grab operator zeroes out the largest voter share and hands it
to the setter; its third iterate is the dictator allocation for three
voters.  A Markov profile built on it passes the one-shot deviation
audit, and the setter owns the whole dollar within three rounds.  With
capricious tie-breaking — voters favor proposals only in the last two
rounds — she provably gets stuck one grab short.
"""

from agendalab import (
    Allocation,
    DivideDollarGrid,
    GameSpec,
    VotingRule,
    dtd_beta,
    dtd_beta_power,
    dtd_profile,
    play_out,
    verify_profile,
)


def main():
    start = Allocation(units=(4, 2, 1, 1), denom=8)
    print("start:", start.units, "over denominator 8 (setter last)")
    a = start
    for step in range(1, 4):
        a = dtd_beta(a)
        print(f"grab^{step}:", a.units)

    grid = DivideDollarGrid(n=3, m=6)
    rule = VotingRule.simple_majority(3)
    x0 = grid.index(Allocation(units=(3, 2, 1, 0), denom=6))
    print()
    print(f"grid m=6 has {grid.problem.num_policies} allocations; "
          f"default {grid.allocation(x0).units}")

    profile = dtd_profile(3, 6, 3, "non_capricious")
    game = GameSpec(problem=grid.problem, rule=rule, horizon=3, initial_default=x0)
    audit = verify_profile(game, profile)
    print(f"non-capricious profile, T=3: valid={audit.profile_valid}, "
          f"outcome={grid.allocation(play_out(game, profile)).units}")

    for rounds in (4, 5):
        capricious = dtd_profile(3, 6, rounds, "capricious")
        game = GameSpec(problem=grid.problem, rule=rule, horizon=rounds,
                        initial_default=x0)
        audit = verify_profile(game, capricious)
        outcome = grid.allocation(play_out(game, capricious))
        print(f"capricious profile, T={rounds}: valid={audit.profile_valid}, "
              f"outcome={outcome.units} "
              f"(= two grabs of the default: "
              f"{dtd_beta_power(grid.allocation(x0), 2).units})")


if __name__ == "__main__":
    main()
