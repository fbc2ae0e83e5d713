from __future__ import annotations

from fractions import Fraction

import pytest

from agendalab import (
    CollectiveChoiceProblem,
    ValidationError,
    VotingRule,
    horizon_classify,
    horizon_payoffs,
    phi_iterates,
    reachability,
    stable_set,
    unimprovable_set,
)
from agendalab.factories import gen_random_gfa
from agendalab.horizons import _enumerate_stable_subsets


def test_reachability_cycle_examples(cycle):
    z = cycle.policy_index("z")
    two = reachability(cycle, z, "two_reachable")
    assert cycle.policies[two.best_for_setter] == "x"
    assert [cycle.policies[i] for i in two.witness_chain] == ["z", "y", "x"]
    full = reachability(cycle, z, "reachable")
    assert cycle.policies[full.best_for_setter] == "w"
    assert [cycle.policies[i] for i in full.witness_chain] == ["z", "y", "x", "w"]
    zero = reachability(cycle, z, "k_reachable", k=0)
    assert zero.members == {z}


def test_reachability_credible_orbit(cycle):
    z = cycle.policy_index("z")
    credible = reachability(cycle, z, "credible")
    assert [cycle.policies[i] for i in credible.witness_chain] == ["z", "y", "x", "w"]


def test_reachability_validation(cycle):
    with pytest.raises(ValidationError):
        reachability(cycle, 0, "k_reachable", k=-1)
    with pytest.raises(ValidationError):
        reachability(cycle, 0, "sideways")


def test_reachability_nesting(small_corpus):
    for problem in small_corpus[:20]:
        for x0 in range(problem.num_policies):
            full = reachability(problem, x0, "reachable").members
            two = reachability(problem, x0, "two_reachable").members
            credible = reachability(problem, x0, "credible").members
            assert two <= full and credible <= full
            best = {mode: reachability(problem, x0, mode).best_for_setter
                    for mode in ("reachable", "two_reachable", "credible")}
            u = problem.setter_utilities
            assert u[best["reachable"]] >= u[best["two_reachable"]]
            assert u[best["reachable"]] >= u[best["credible"]]


def test_chain_steps_are_majority_wins(small_corpus):
    for problem in small_corpus[:10]:
        for x0 in range(problem.num_policies):
            chain = reachability(problem, x0, "reachable").witness_chain
            for a, b in zip(chain, chain[1:]):
                assert problem.strictly_majority_preferred(b, a)


# ---------------------------------------------------------------------------
# stable set


def test_stable_set_cycle(cycle):
    report = stable_set(cycle)
    names = {cycle.policies[i] for i in report.members}
    assert names == {"w", "y"}
    psi = {cycle.policies[k]: cycle.policies[v] for k, v in report.psi_table.items()}
    assert psi == {"w": "w", "x": "w", "y": "y", "z": "y"}
    assert report.uniqueness_certified


def test_stable_set_laws(small_corpus):
    for problem in small_corpus[:30]:
        report = stable_set(problem)
        rule = VotingRule.simple_majority(problem.n)
        members = report.members
        assert unimprovable_set(problem, rule) <= members
        for x in range(problem.num_policies):
            psi = report.psi_table[x]
            assert psi in members
            assert (psi == x) == (x in members)
        # internal stability
        for x in members:
            for y in members:
                if y == x:
                    continue
                assert not (problem.setter_utilities[y] > problem.setter_utilities[x]
                            and problem.strictly_majority_preferred(y, x))
        # external stability
        for x in range(problem.num_policies):
            if x in members:
                continue
            assert any(problem.setter_utilities[y] > problem.setter_utilities[x]
                       and problem.strictly_majority_preferred(y, x)
                       for y in members)


def test_stable_set_matches_enumeration():
    for seed in range(30):
        problem = gen_random_gfa(5, 3, seed=seed)
        report = stable_set(problem)
        assert report.uniqueness_certified
        assert _enumerate_stable_subsets(problem) == [report.members]


def test_stable_set_requires_gfa():
    from agendalab.factories import gen_random_with_ties
    with pytest.raises(ValidationError):
        stable_set(gen_random_with_ties(4, 3, seed=0))


def test_stable_set_skips_certification_above_limit():
    problem = gen_random_gfa(6, 3, seed=4)
    report = stable_set(problem, certify_limit=4)
    assert not report.uniqueness_certified


# ---------------------------------------------------------------------------
# horizon comparison


def test_horizon_payoffs_cycle(cycle):
    y = cycle.policy_index("y")
    rows = horizon_payoffs(cycle, y, [1, 2, 3])
    assert rows.u_table[1] == Fraction(3)      # one round reaches x
    assert rows.u_table[2] == Fraction(4)      # two rounds reach w
    assert rows.u_inf == Fraction(2)           # no deadline stalls at y
    assert rows.u_table[2] > rows.u_table[1] > rows.u_inf

    w = cycle.policy_index("w")
    rows_w = horizon_payoffs(cycle, w, [1, 4])
    assert rows_w.u_table[1] == rows_w.u_table[4] == rows_w.u_inf == Fraction(4)

    z = cycle.policy_index("z")
    rows_z = horizon_payoffs(cycle, z, [1])
    assert rows_z.u_table[1] == rows_z.u_inf == Fraction(2)


def test_horizon_classify_cycle(cycle):
    report = horizon_classify(cycle)
    assert report.case == "a"
    assert cycle.policies[report.witness] == "y"
    assert {cycle.policies[i] for i in report.r_set} == {"w", "x"}
    w = report.witness
    assert report.u_table[(w, 2)] > report.u_table[(w, 1)] > report.u_inf[w]


def test_horizon_classify_case_b():
    # two policies, the majority favors the setter's best: every default
    # reaches the optimum in one step, so the horizon never matters
    problem = CollectiveChoiceProblem(
        policies=("a", "b"),
        voter_utilities=(
            (Fraction(2), Fraction(1)),
            (Fraction(2), Fraction(1)),
            (Fraction(1), Fraction(2)),
        ),
        setter_utilities=(Fraction(2), Fraction(1)),
        gfa=True)
    report = horizon_classify(problem)
    assert report.case == "b" and report.witness is None
    assert report.r_set == frozenset({0, 1})


def test_r_set_dual_computation_agrees(small_corpus):
    for problem in small_corpus:
        report = horizon_classify(problem)        # raises internally on mismatch
        rule = VotingRule.simple_majority(problem.n)
        stuck = unimprovable_set(problem, rule)
        expected = frozenset(
            x for x in range(problem.num_policies)
            if phi_iterates(problem, rule, x, 1)[1] in stuck)
        assert report.r_set == expected


def test_theorem_horizon_inequalities(small_corpus):
    for problem in small_corpus[:25]:
        rule = VotingRule.simple_majority(problem.n)
        psi = stable_set(problem).psi_table
        for x0 in range(problem.num_policies):
            payoffs = [problem.setter_utilities[i]
                       for i in phi_iterates(problem, rule, x0, 10)]
            for a, b in zip(payoffs[1:], payoffs[2:]):
                assert b >= a
            assert payoffs[1] >= problem.setter_utilities[psi[x0]]


def test_manipulable_instances_reach_optimum_credibly(small_corpus):
    # no-commitment restatement: when everything below the optimum is
    # improvable, the improvement orbit tops out from every default
    from agendalab import is_manipulable
    for problem in small_corpus:
        rule = VotingRule.simple_majority(problem.n)
        if not is_manipulable(problem, rule).manipulable:
            continue
        for x0 in range(problem.num_policies):
            best = reachability(problem, x0, "credible").best_for_setter
            assert problem.setter_utilities[best] == problem.setter_max
