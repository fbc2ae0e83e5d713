"""Generic grids over a continuum box and the uniform improvement margin.

A continuum spatial problem is discretized to a jittered lattice whose
covering radius is certified below epsilon and whose per-player ties
are audited away.  On a manipulable grid, every improvement iterate
gains at least the uniform margin while far from the optimum, which
turns into a horizon bound: within t_bound rounds the setter is within
delta of her best payoff, from any default.
"""

from fractions import Fraction

from agendalab import (
    BoxSpace,
    VotingRule,
    build_grid,
    gen_spatial,
    is_manipulable,
    phi_iterates,
    uniform_margin,
)

F = Fraction


def main():
    # ideal points above the policy box: all players want more than any
    # feasible policy delivers, so the discretized problem stays manipulable
    ideal_box = tuple((F(9, 8), F(2)) for _ in range(3))
    profile = gen_spatial(3, 5, seed=3, box=ideal_box)
    result = build_grid(BoxSpace.unit(3), F(1, 4), seed=4, profile=profile)
    problem = result.problem
    print(f"grid: {problem.num_policies} nodes, covering^2 bound "
          f"{result.covering_sq_bound} < epsilon^2 = {F(1, 16)}")
    print("all players strict across nodes (audited):", problem.gfa)

    rule = VotingRule.simple_majority(5)
    print("grid manipulable:", is_manipulable(problem, rule).manipulable)

    spread = problem.setter_max - min(problem.setter_utilities)
    delta = spread / 20
    margin = uniform_margin(problem, rule, delta)
    print(f"uniform margin over {len(margin.gamma_set)} delta-suboptimal nodes: "
          f"eta = {margin.eta_delta} (> 0: {margin.lemma_holds})")
    print("round bound from the margin:", margin.t_bound)

    worst = min(range(problem.num_policies),
                key=lambda i: problem.setter_utilities[i])
    path = phi_iterates(problem, rule, worst, 10)
    absorbed = next(i for i in range(len(path) - 1) if path[i + 1] == path[i])
    gap = problem.setter_max - problem.setter_utilities[path[-1]]
    print(f"from the worst default: absorbed after {absorbed} step(s), "
          f"final shortfall {gap} (<= delta: {gap <= delta})")


if __name__ == "__main__":
    main()
