"""JSON round-trips for problems, profiles, and oracle reports.

The problem schema:

    {"policies": ["w", ...],
     "voters": [["4", "1/2", ...], ...],
     "agenda_setter": ["4", ...],
     "majority_override": [["winner", "loser"], ...],   # optional
     "gfa": true}

Rationals serialize as reduced "p/q" or integer strings; decimal input
such as "0.5" is accepted and normalized.  Diagnostics carry row/column
locations.  Writing uses canonical field order so files are diffable.
"""

from __future__ import annotations

import json
from pathlib import Path

from .engine import StrategyProfile
from .errors import ValidationError
from .oracle import CustomProtocol
from .problems import CollectiveChoiceProblem, TournamentSpec, VotingRule
from .rationals import format_rational, parse_rational


def problem_to_dict(problem: CollectiveChoiceProblem) -> dict:
    out = {
        "policies": list(problem.policies),
        "voters": [[format_rational(u) for u in row]
                   for row in problem.voter_utilities],
        "agenda_setter": [format_rational(u) for u in problem.setter_utilities],
    }
    if problem.majority_override is not None:
        out["majority_override"] = sorted(
            [problem.policies[w], problem.policies[l]]
            for w, l in problem.majority_override.edges)
    out["gfa"] = problem.gfa
    return out


def problem_from_dict(data: dict) -> CollectiveChoiceProblem:
    if not isinstance(data, dict):
        raise ValidationError("problem document must be a JSON object")
    try:
        labels = list(data["policies"])
        voter_rows = data["voters"]
        setter_row = data["agenda_setter"]
    except KeyError as exc:
        raise ValidationError(f"missing required field {exc.args[0]!r}") from None
    if len(set(labels)) != len(labels):
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        raise ValidationError(f"duplicate policy labels: {dupes}")

    def parse_row(row, where):
        if len(row) != len(labels):
            raise ValidationError(
                f"{where} has {len(row)} entries, expected {len(labels)}")
        out = []
        for col, cell in enumerate(row):
            try:
                out.append(parse_rational(cell))
            except ValidationError as exc:
                raise ValidationError(f"{where}, column {col + 1}: {exc}") from None
        return tuple(out)

    voters = tuple(parse_row(row, f"voter row {i + 1}")
                   for i, row in enumerate(voter_rows))
    setter = parse_row(setter_row, "agenda_setter row")

    override = None
    if data.get("majority_override") is not None:
        index = {label: i for i, label in enumerate(labels)}
        edges = []
        for k, pair in enumerate(data["majority_override"]):
            if len(pair) != 2:
                raise ValidationError(f"override entry {k + 1} is not a pair")
            for label in pair:
                if label not in index:
                    raise ValidationError(
                        f"override entry {k + 1} names unknown policy {label!r}")
            edges.append((index[pair[0]], index[pair[1]]))
        override = TournamentSpec.from_edges(len(labels), edges)

    return CollectiveChoiceProblem(
        policies=tuple(labels), voter_utilities=voters, setter_utilities=setter,
        majority_override=override, gfa=bool(data.get("gfa", False)))


def save_problem(problem: CollectiveChoiceProblem, path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=2) + "\n")


def load_problem(path) -> CollectiveChoiceProblem:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return problem_from_dict(data)


# ---------------------------------------------------------------------------
# voting rules from CLI-style descriptors


def parse_rule(text: str, n: int) -> VotingRule:
    """Rule descriptor: "majority", "quota:K/N", or a JSON coalition file path."""
    body = text.strip()
    if body == "majority":
        return VotingRule.simple_majority(n)
    if body.startswith("quota:"):
        spec = body[len("quota:"):]
        try:
            q_text, n_text = spec.split("/")
            q, rule_n = int(q_text), int(n_text)
        except ValueError:
            raise ValidationError(f"malformed quota descriptor {text!r}") from None
        if rule_n != n:
            raise ValidationError(f"rule is for {rule_n} voters, problem has {n}")
        return VotingRule.quota_rule(n, q)
    path = Path(body)
    if path.exists():
        data = json.loads(path.read_text())
        return VotingRule.explicit(n, data["coalitions"])
    raise ValidationError(f"unrecognized rule descriptor {text!r}")


# ---------------------------------------------------------------------------
# strategy profiles


def profile_to_dict(profile: StrategyProfile,
                    problem: CollectiveChoiceProblem) -> dict:
    """Tabulate a profile over all (round, default) states of its horizon."""
    proposer = []
    votes = []
    m = problem.num_policies
    for t in range(1, profile.horizon + 1):
        for x in range(m):
            a, adjourn = profile.propose(t, x)
            proposer.append([t, problem.policies[x], problem.policies[a], adjourn])
            for cand in range(m):
                for i in range(problem.n):
                    votes.append([i + 1, t, problem.policies[x],
                                  problem.policies[cand],
                                  bool(profile.vote(i, t, x, cand))])
    return {"horizon": profile.horizon, "label": profile.label,
            "proposer": proposer, "votes": votes}


def profile_from_dict(data: dict, problem: CollectiveChoiceProblem) -> StrategyProfile:
    index = {label: i for i, label in enumerate(problem.policies)}
    try:
        horizon = int(data["horizon"])
        proposer_table = {
            (int(t), index[x]): (index[a], bool(adjourn))
            for t, x, a, adjourn in data["proposer"]}
        voter_tables: list[dict] = [dict() for _ in range(problem.n)]
        for voter, t, x, a, vote in data["votes"]:
            voter_tables[int(voter) - 1][(int(t), index[x], index[a])] = bool(vote)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed profile document: {exc!r}") from None
    return StrategyProfile.from_tables(horizon, proposer_table, voter_tables,
                                       label=str(data.get("label", "")))


# ---------------------------------------------------------------------------
# custom adjournment protocols


def protocol_from_dict(data: dict, problem: CollectiveChoiceProblem) -> CustomProtocol:
    """Custom protocol document: {"label": ..., "table": [[t, default,
    [[policy, adjourn], ...]], ...]} with policy labels."""
    index = {label: i for i, label in enumerate(problem.policies)}
    try:
        table = {}
        for t, default, actions in data["table"]:
            table[(int(t), index[default])] = tuple(
                (index[a], bool(adjourn)) for a, adjourn in actions)
        return CustomProtocol(label=str(data.get("label", "custom")), table=table)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed protocol document: {exc!r}") from None


def protocol_to_dict(protocol: CustomProtocol,
                     problem: CollectiveChoiceProblem) -> dict:
    rows = []
    for (t, default), actions in sorted(protocol.table.items()):
        rows.append([t, problem.policies[default],
                     [[problem.policies[a], adjourn] for a, adjourn in actions]])
    return {"label": protocol.label, "table": rows}
