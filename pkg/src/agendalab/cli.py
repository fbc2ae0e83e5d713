"""Command-line front end.

Subcommands mirror the library layers: `analyze` (improvability and
manipulability), `solve` (improvement-iterate trajectory), `oracle`
(extensive-form solve / profile verification / protocol equivalence),
`horizon`, `reach`, `spatial`, `grid`, `dist`, `realize`, and
`experiment`.  Results print as JSON (or write to --out).  Exit codes:
0 success, 1 validation error, 2 failed theorem assertion, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .distributions import audit_dp_axioms, gen_distribution
from .engine import equilibrium_outcome, phi_or
from .errors import AgendaLabError, InternalInvariantError, ValidationError
from .grids import BoxSpace, SimplexSpace, build_grid
from .horizons import horizon_classify, horizon_payoffs, reachability, stable_set
from .oracle import GameSpec, protocol_equivalence, solve_spe, verify_profile
from .problems import TournamentSpec, is_manipulable, unimprovable_set
from .rationals import format_rational, parse_rational
from .serialize import (
    load_problem,
    parse_rule,
    problem_to_dict,
    profile_from_dict,
    save_problem,
)
from .spatial import check_noncoplanarity, gen_spatial, spatial_witness
from .suites import SUITES, ExperimentDescriptor, run_suite
from .tournaments import mcgarvey_realize


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    problem = load_problem(args.problem)
    rule = parse_rule(args.rule, problem.n)
    return problem, rule


def _cmd_analyze(args) -> int:
    problem, rule = _load(args)
    stuck = unimprovable_set(problem, rule)
    report = is_manipulable(problem, rule)
    payload = {
        "policies": list(problem.policies),
        "unimprovable": sorted(problem.policies[x] for x in stuck),
        "manipulable": report.manipulable,
        "blocking": sorted(problem.policies[x] for x in report.blocking),
        "one_round_improvements": {
            problem.policies[x]: sorted(problem.policies[y]
                                        for y in phi_or(problem, rule, x))
            for x in range(problem.num_policies)},
    }
    _emit(payload, args.out)
    return 0


def _cmd_solve(args) -> int:
    problem, rule = _load(args)
    x0 = problem.policy_index(args.default)
    trajectory = equilibrium_outcome(problem, rule, x0, args.rounds)
    payload = {
        "default": args.default,
        "rounds": args.rounds,
        "steps": [problem.policies[s] for s in trajectory.steps],
        "outcome": problem.policies[trajectory.outcome],
        "fixed_point_reached_at": trajectory.fixed_point_reached_at,
    }
    _emit(payload, args.out)
    return 0


def _cmd_oracle(args) -> int:
    problem, rule = _load(args)
    x0 = problem.policy_index(args.default)
    if args.oracle_command == "solve":
        protocol = args.protocol
        if args.protocol_file:
            from .serialize import protocol_from_dict
            protocol = protocol_from_dict(
                json.loads(Path(args.protocol_file).read_text()), problem)
        game = GameSpec(problem=problem, rule=rule, horizon=args.rounds,
                        initial_default=x0, protocol=protocol)
        report = solve_spe(game, budget=args.budget)
        payload = {
            "outcome": problem.policies[report.outcome],
            "trace": [{
                "round": s.round, "default": problem.policies[s.default],
                "proposal": problem.policies[s.proposal], "adjourn": s.adjourn,
                "approvers": sorted(i + 1 for i in s.approvers), "passed": s.passed,
            } for s in report.pivotal_trace],
        }
        _emit(payload, args.out)
        return 0
    if args.oracle_command == "verify":
        game = GameSpec(problem=problem, rule=rule, horizon=args.rounds,
                        initial_default=x0)
        profile = profile_from_dict(json.loads(Path(args.profile).read_text()), problem)
        report = verify_profile(game, profile, budget=args.budget)
        payload = {
            "profile_valid": report.profile_valid,
            "violations": [{
                "player": v.player, "round": v.round,
                "default": problem.policies[v.default],
                "deviation": v.deviation, "gain": format_rational(v.gain),
            } for v in report.violations],
        }
        _emit(payload, args.out)
        return 0 if report.profile_valid else 2
    report = protocol_equivalence(problem, rule, args.rounds, x0,
                                  list(args.protocols))
    payload = {
        "all_agree": report.all_agree,
        "iterate_outcome": problem.policies[report.phi_outcome],
        "outcomes": {name: problem.policies[out]
                     for name, out in report.outcomes.items()},
    }
    _emit(payload, args.out)
    return 0 if report.all_agree else 2


def _cmd_horizon(args) -> int:
    problem, _ = _load(args)
    report = horizon_classify(problem)
    payload = {
        "case": report.case,
        "witness": problem.policies[report.witness] if report.witness is not None else None,
        "at_most_once_improvable": sorted(problem.policies[x] for x in report.r_set),
    }
    if args.default is not None:
        rows = horizon_payoffs(problem, problem.policy_index(args.default),
                               args.t_list or [1, 2, 3])
        payload["payoffs"] = {str(t): format_rational(u)
                              for t, u in sorted(rows.u_table.items())}
        payload["payoff_infinite"] = format_rational(rows.u_inf)
    stable = stable_set(problem)
    payload["stable_set"] = sorted(problem.policies[x] for x in stable.members)
    payload["uniqueness_certified"] = stable.uniqueness_certified
    _emit(payload, args.out)
    return 0


def _cmd_reach(args) -> int:
    problem, _ = _load(args)
    report = reachability(problem, problem.policy_index(args.default),
                          args.mode, k=args.k)
    payload = {
        "mode": report.mode,
        "members": sorted(problem.policies[x] for x in report.members),
        "best_for_setter": problem.policies[report.best_for_setter],
        "witness_chain": [problem.policies[x] for x in report.witness_chain],
    }
    _emit(payload, args.out)
    return 0


def _points_payload(profile):
    return [[format_rational(c) for c in p] for p in profile.ideal_points]


def _cmd_spatial(args) -> int:
    if args.spatial_command == "generate":
        profile = gen_spatial(args.dim, args.voters, args.seed)
        _emit({"dim": args.dim, "ideal_points": _points_payload(profile)}, args.out)
        return 0
    data = json.loads(Path(args.profile).read_text())
    from .spatial import SpatialProfile
    points = tuple(tuple(parse_rational(c) for c in p) for p in data["ideal_points"])
    d = int(data["dim"])
    profile = SpatialProfile(
        dim=d, ideal_points=points,
        box=tuple((Fraction(0), Fraction(1)) for _ in range(d)))
    if args.spatial_command == "check":
        report = check_noncoplanarity(profile)
        payload = {"passes": report.passes}
        if report.violating_tuple:
            dims, players, value = report.violating_tuple
            payload["violation"] = {"dims": list(dims), "players": list(players),
                                    "determinant": format_rational(value)}
        _emit(payload, args.out)
        return 0 if report.passes else 2
    point = tuple(parse_rational(c) for c in args.point.split(","))
    trace = spatial_witness(profile, point)
    _emit({
        "witness": [format_rational(c) for c in trace.witness],
        "midpoint": [format_rational(c) for c in trace.midpoint],
        "coalition": sorted(i + 1 for i in trace.majority_coalition),
        "dims": list(trace.dims),
    }, args.out)
    return 0


def _cmd_grid(args) -> int:
    if args.space == "box":
        profile = gen_spatial(args.dim, args.voters, args.seed)
        result = build_grid(BoxSpace.unit(args.dim), parse_rational(args.epsilon),
                            seed=args.seed + 1, profile=profile,
                            max_points=args.budget)
    else:
        result = build_grid(SimplexSpace(args.voters), parse_rational(args.epsilon),
                            seed=args.seed, max_points=args.budget)
    if args.out:
        save_problem(result.problem, args.out)
    payload = {
        "points": result.problem.num_policies,
        "gfa": result.problem.gfa,
        "covering_sq_bound": format_rational(result.covering_sq_bound),
        "epsilon_sq": format_rational(parse_rational(args.epsilon)**2),
        "attempts": result.attempts,
        "written_to": args.out,
    }
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_dist(args) -> int:
    if args.kind == "dtd":
        problem = gen_distribution("dtd", n=args.voters, m=args.m)
    elif args.kind == "pork":
        projects = [tuple(part.split(":")) for part in args.projects.split(";")]
        projects = [(parse_rational(b), parse_rational(c)) for b, c in projects]
        problem = gen_distribution("pork", projects=projects, m=args.m,
                                   n=args.voters)
    else:
        base = load_problem(args.base)
        problem = gen_distribution("transfers", base=base, m=args.m)
    payload = {"policies": problem.num_policies}
    if args.audit:
        audit = audit_dp_axioms(problem)
        payload["audit_passes"] = audit.passes
        payload["scarcity_violations"] = len(audit.scarcity_violations)
        payload["transferability_violations"] = len(audit.transferability_violations)
        payload["clean_policies"] = len(audit.clean_policies(problem.num_policies))
    if args.out:
        save_problem(problem, args.out)
        payload["written_to"] = args.out
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_realize(args) -> int:
    data = json.loads(Path(args.tournament).read_text())
    labels = data["policies"]
    index = {label: i for i, label in enumerate(labels)}
    edges = [(index[w], index[l]) for w, l in data["edges"]]
    tournament = TournamentSpec.from_edges(len(labels), edges)
    setter = [parse_rational(u) for u in args.setter.split(",")]
    problem = mcgarvey_realize(tournament, setter)
    from .tournaments import relabel
    problem = relabel(problem, labels)
    if args.out:
        save_problem(problem, args.out)
    sys.stdout.write(json.dumps({"voters": problem.n,
                                 "written_to": args.out}, indent=2) + "\n")
    return 0


def _cmd_experiment(args) -> int:
    descriptor = ExperimentDescriptor(
        suite=args.suite, seed=args.seed, samples=args.samples,
        max_policies=args.max_policies, max_rounds=args.rounds,
        m=args.m, d=args.dim, epsilon=args.epsilon, delta=args.delta,
        out_dir=args.out)
    record = run_suite(descriptor)
    sys.stdout.write(json.dumps(record.summary, indent=2) + "\n")
    return 0 if record.summary["failed"] == 0 else 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agendalab",
        description="exact engine for sequential agenda-setting games")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default=False, rounds=False):
        p.add_argument("--problem", required=True, help="problem JSON file")
        p.add_argument("--rule", default="majority",
                       help='"majority", "quota:K/N", or a coalition JSON file')
        p.add_argument("--out", default=None)
        if default:
            p.add_argument("--default", required=True, help="initial default label")
        if rounds:
            p.add_argument("--rounds", type=int, required=True)

    p = sub.add_parser("analyze", help="unimprovable set and manipulability")
    common(p)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("solve", help="improvement-iterate trajectory")
    common(p, default=True, rounds=True)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("oracle", help="extensive-form oracle")
    oracle_sub = p.add_subparsers(dest="oracle_command", required=True)
    q = oracle_sub.add_parser("solve")
    common(q, default=True, rounds=True)
    q.add_argument("--protocol", default="amendment")
    q.add_argument("--protocol-file", default=None,
                   help="custom protocol table JSON")
    q.add_argument("--budget", type=int, default=5_000_000)
    q.set_defaults(fn=_cmd_oracle)
    q = oracle_sub.add_parser("verify")
    common(q, default=True, rounds=True)
    q.add_argument("--profile", required=True, help="profile JSON file")
    q.add_argument("--budget", type=int, default=5_000_000)
    q.set_defaults(fn=_cmd_oracle)
    q = oracle_sub.add_parser("equivalence")
    common(q, default=True, rounds=True)
    q.add_argument("--protocols", nargs="+",
                   default=["amendment", "successive", "open_rule"])
    q.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("horizon", help="finite vs infinite horizon payoffs")
    common(p)
    p.add_argument("--default", default=None)
    p.add_argument("--t-list", type=int, nargs="*", default=None)
    p.set_defaults(fn=_cmd_horizon)

    p = sub.add_parser("reach", help="reachability closures")
    common(p, default=True)
    p.add_argument("--mode", default="reachable",
                   choices=["reachable", "two_reachable", "k_reachable", "credible"])
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(fn=_cmd_reach)

    p = sub.add_parser("spatial", help="spatial profiles and witnesses")
    spatial_sub = p.add_subparsers(dest="spatial_command", required=True)
    q = spatial_sub.add_parser("generate")
    q.add_argument("--dim", type=int, default=3)
    q.add_argument("--voters", type=int, default=5)
    q.add_argument("--seed", type=int, default=1)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_spatial)
    q = spatial_sub.add_parser("check")
    q.add_argument("--profile", required=True)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_spatial)
    q = spatial_sub.add_parser("witness")
    q.add_argument("--profile", required=True)
    q.add_argument("--point", required=True, help="comma-separated rationals")
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_spatial)

    p = sub.add_parser("grid", help="generic epsilon-grids")
    p.add_argument("--space", choices=["box", "simplex"], required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--voters", type=int, default=5)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--budget", type=int, default=500_000,
                   help="maximum number of grid points")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_grid)

    p = sub.add_parser("dist", help="distribution problems and the axiom audit")
    p.add_argument("kind", choices=["dtd", "pork", "transfers"])
    p.add_argument("--voters", type=int, default=3)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--projects", default=None, help='pork: "B:C;B:C;..."')
    p.add_argument("--base", default=None, help="transfers: base problem JSON")
    p.add_argument("--audit", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_dist)

    p = sub.add_parser("realize", help="tournament realization")
    p.add_argument("--tournament", required=True,
                   help='JSON {"policies": [...], "edges": [[w,l],...]}')
    p.add_argument("--setter", required=True, help="comma-separated utilities")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_realize)

    p = sub.add_parser("experiment", help="seeded verification suites")
    p.add_argument("suite", choices=list(SUITES))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--max-policies", type=int, default=6)
    p.add_argument("--rounds", type=int, default=4)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--epsilon", default="1/4")
    p.add_argument("--delta", default="1/20")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InternalInvariantError as exc:
        sys.stderr.write(f"internal invariant violation: {exc}\n")
        return 3
    except ValidationError as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return 1
    except AgendaLabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
