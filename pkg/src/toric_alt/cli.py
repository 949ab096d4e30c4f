"""Command-line front end: validate | decide | roots | exp | graph.

Exit codes: 0 on success (either verdict), 2 for invalid input, 3 for internal
errors such as an exceeded safety cap.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .alternative import FreeCertificate, all_violations, decide
from .bch import LieElement, exp_element
from .closure import RootLieAlgebra, close, graph_of
from .errors import InputError, InternalError
from .lattice import LatticeCone, require_valid_cone, validate_cone
from .roots import DemazureRoot, enumerate_roots, is_demazure_root, lift_root

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3

OPTION_KEYS = {"cap", "max_word_len", "bound", "seed", "group_law_samples"}


@dataclass
class Problem:
    cone: LatticeCone
    roots: list[DemazureRoot]
    options: dict = field(default_factory=dict)


def load_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    return parse_problem(obj)


def parse_problem(obj) -> Problem:
    if not isinstance(obj, dict) or "cone" not in obj:
        raise InputError('problem file must be an object with a "cone" entry')
    unknown = set(obj) - {"cone", "roots", "options"}
    if unknown:
        raise InputError(f"unknown problem keys: {sorted(unknown)}")
    cone = LatticeCone.from_json(obj["cone"])
    raw_roots = obj.get("roots", [])
    if not isinstance(raw_roots, list):
        raise InputError("roots must be a list")
    roots = [DemazureRoot.from_json(r) for r in raw_roots]
    for r in roots:
        if len(r.e) != cone.rank:
            raise InputError(f"root {list(r.e)} has length {len(r.e)}, expected {cone.rank}")
    options = obj.get("options", {}) or {}
    if not isinstance(options, dict):
        raise InputError("options must be an object")
    bad = set(options) - OPTION_KEYS
    if bad:
        raise InputError(f"unknown options: {sorted(bad)}")
    for key, val in options.items():
        if isinstance(val, bool) or not isinstance(val, int):
            raise InputError(f"option {key} must be an integer")
    return Problem(cone, roots, dict(options))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _positive(name: str, value: int | None) -> None:
    if value is not None and value < 1:
        raise InputError(f"{name} must be a positive integer")


def _pick(args_value, problem: Problem, key: str, default):
    if args_value is not None:
        return args_value
    return problem.options.get(key, default)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, out) -> int:
    problem = load_problem(args.problem)
    cone_report = validate_cone(problem.cone)
    root_reports = []
    for r in problem.roots:
        if not 1 <= r.ray <= problem.cone.k:
            root_reports.append({"ray": r.ray, "e": list(r.e), "ok": False, "violations": ["ray index out of range"]})
            continue
        rep = is_demazure_root(problem.cone, r.ray, r.e)
        root_reports.append(
            {"ray": r.ray, "e": list(r.e), "ok": rep.ok, "pairings": list(rep.pairings), "violations": list(rep.violations)}
        )
    ok = cone_report.ok and all(r["ok"] for r in root_reports)
    if args.json:
        out.write(dumps({"ok": ok, "cone": cone_report.to_json(), "roots": root_reports}))
    else:
        for c in cone_report.checks:
            where = f" ray {c.index}" if c.index is not None else ""
            out.write(f"{'pass' if c.ok else 'FAIL'} {c.name}{where}" + (f": {c.detail}" if not c.ok and c.detail else "") + "\n")
        for r in root_reports:
            tail = "" if r["ok"] else ": " + "; ".join(r["violations"])
            out.write(f"{'pass' if r['ok'] else 'FAIL'} root ray {r['ray']} e={r['e']}{tail}\n")
        out.write("valid\n" if ok else "invalid\n")
    return EXIT_OK if ok else EXIT_INPUT


def _summary(verdict) -> str:
    if isinstance(verdict, FreeCertificate):
        return f"free, case {verdict.case.label}, verified W={verdict.verification.max_len}"
    dims = ",".join(str(d) for d in verdict.lcs.dims)
    return f"unipotent, dim={verdict.dim}, class={verdict.lcs.nilpotency_class}, lcs dims {dims}"


def cmd_decide(args, out) -> int:
    problem = load_problem(args.problem)
    cap = _pick(args.cap, problem, "cap", None)
    w = _pick(args.max_word_len, problem, "max_word_len", 8)
    seed = _pick(args.seed, problem, "seed", 0)
    samples = _pick(None, problem, "group_law_samples", 50)
    _positive("cap", cap)
    _positive("max word length", w)
    verdict = decide(problem.cone, problem.roots, cap=cap, max_word_len=w, group_law_samples=samples, seed=seed)
    payload = verdict.to_json()
    if args.all_violations:
        payload["generator_violations"] = [
            {"first": {"ray": a[0], "e": list(a[1])}, "second": {"ray": b[0], "e": list(b[1])}, "c": c, "d": d}
            for a, b, c, d in all_violations(problem.cone, problem.roots)
        ]
    if args.dot:
        if isinstance(verdict, FreeCertificate):
            graph = graph_of(problem.cone, verdict.witness.roots_by_ray)
        else:
            graph = verdict.graph
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(graph.to_dot())
    if args.json:
        out.write(dumps(payload))
    else:
        out.write(_summary(verdict) + "\n")
        if args.all_violations:
            for v in payload["generator_violations"]:
                out.write(
                    f"violation: ray {v['first']['ray']} e={v['first']['e']} / ray {v['second']['ray']} "
                    f"e={v['second']['e']} (c={v['c']}, d={v['d']})\n"
                )
    return EXIT_OK


def cmd_roots(args, out) -> int:
    problem = load_problem(args.problem)
    cone = problem.cone
    bound = _pick(args.bound, problem, "bound", None)
    if bound is None:
        raise InputError("--bound is required")
    require_valid_cone(cone)
    roots = enumerate_roots(cone, args.ray, bound)
    rows = [{"ray": r.ray, "e": list(r.e), "lift": list(lift_root(cone, r).hat_e)} for r in roots]
    if args.json:
        out.write(dumps({"ray": args.ray, "bound": bound, "roots": rows}))
    else:
        for row in rows:
            out.write(f"e={row['e']} lift={row['lift']}\n")
        out.write(f"{len(rows)} roots on ray {args.ray} with |e| <= {bound}\n")
    return EXIT_OK


_TERM = re.compile(r"^\s*(?:([+-]?\s*[0-9]+(?:/[0-9]+)?)\s*\*?\s*)?g([0-9]+)\s*$")


def parse_element(spec: str, problem: Problem) -> LieElement:
    """A JSON term list, or a sum of generator references such as "g2+1/2*g4"."""
    text = spec.strip()
    if text.startswith("["):
        try:
            return LieElement.from_json(json.loads(text))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"cannot parse element JSON: {exc}") from exc
    coords: dict = {}
    pieces = re.split(r"(?=[+-])", text.replace(" ", ""))
    for piece in filter(None, pieces):
        sign = -1 if piece.startswith("-") else 1
        m = _TERM.match(piece.lstrip("+-"))
        if not m:
            raise InputError(f"cannot parse element term {piece!r}")
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        idx = int(m.group(2))
        if not 1 <= idx <= len(problem.roots):
            raise InputError(f"generator g{idx} out of range 1..{len(problem.roots)}")
        r = problem.roots[idx - 1]
        key = (r.ray, r.e)
        coords[key] = coords.get(key, 0) + sign * coeff
    return LieElement(coords)


def _closed_algebra(problem: Problem, cap) -> RootLieAlgebra:
    result = close(problem.cone, problem.roots, cap)
    if not isinstance(result, RootLieAlgebra):
        raise InputError("the generated group is not unipotent (closure found a 2-cycle)")
    return result


def cmd_exp(args, out) -> int:
    problem = load_problem(args.problem)
    cap = _pick(args.cap, problem, "cap", None)
    alg = _closed_algebra(problem, cap)
    element = parse_element(args.element, problem)
    auto = exp_element(alg, element)
    if args.json:
        out.write(dumps(auto.to_json()))
    else:
        out.write(str(auto) + "\n")
    return EXIT_OK


def cmd_graph(args, out) -> int:
    problem = load_problem(args.problem)
    cap = _pick(args.cap, problem, "cap", None)
    result = close(problem.cone, problem.roots, cap)
    if isinstance(result, RootLieAlgebra):
        graph = result.graph
    else:
        graph = graph_of(problem.cone, result.roots_by_ray)
    if args.json:
        out.write(dumps({**graph.to_json(), "acyclic": graph.is_acyclic()}))
    else:
        out.write(graph.to_dot())
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toric-alt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the cone and the roots")
    p.add_argument("problem")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("decide", help="unipotent or free, with a certificate")
    p.add_argument("problem")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dot", metavar="OUT", help="write the commutation graph in DOT format")
    p.add_argument("--max-word-len", type=int, dest="max_word_len")
    p.add_argument("--cap", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--all-violations", action="store_true", dest="all_violations")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("roots", help="enumerate roots on one ray")
    p.add_argument("problem")
    p.add_argument("--ray", type=int, required=True)
    p.add_argument("--bound", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("exp", help="exponential of an element of the closed algebra")
    p.add_argument("problem")
    p.add_argument("--element", required=True)
    p.add_argument("--cap", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_exp)

    p = sub.add_parser("graph", help="commutation graph in DOT format")
    p.add_argument("problem")
    p.add_argument("--cap", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except RecursionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
