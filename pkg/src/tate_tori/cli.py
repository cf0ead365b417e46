"""Command dispatch and deterministic text/JSON output.

    tate-tori cohomology <file> [--degree D] [--json] [--no-fast-path] [--force]
    tate-tori sha        <file> [--json] [--no-fast-path]
    tate-tori report     <file> [--json] [--no-fast-path] [--force]
    tate-tori verify     <file> [--json] [--no-fast-path]

Exit codes: 0 success, 1 computation error (guardrail, order cap), 2
parse/validation error, 3 a verify check failed.  All group orders are
serialized as decimal strings in JSON so downstream consumers never
overflow; output is byte-identical across runs for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from .arith import (
    ArithReport,
    IdentityCheck,
    arith_report,
    sha_group,
    verify_identities,
)
from .abelian import FinAbGroup
from .cohomology import tate_group
from .errors import (
    BadSpec,
    CochainSystemTooLarge,
    ContainmentError,
    InconsistentAssumptions,
    InfiniteCohomology,
    NotCyclic,
    OrderCapExceeded,
    ParseError,
    TorsionQuotient,
)
from .problem import Problem, ProblemInstance, instantiate_problem, parse_problem_file

COMMANDS = ("cohomology", "sha", "report", "verify")

_VALIDATION_ERRORS = (ParseError, BadSpec, InconsistentAssumptions)
_COMPUTE_ERRORS = (
    OrderCapExceeded,
    CochainSystemTooLarge,
    ContainmentError,
    InfiniteCohomology,
    TorsionQuotient,
    NotCyclic,
)

ENV_ORDER_CAP = "TATE_TORI_ORDER_CAP"


def run_command(problem: Problem, command: str, *, degree: Optional[int] = None,
                as_json: bool = False, fast_path: bool = True, force: bool = False,
                order_cap: Optional[int] = None) -> tuple[int, str]:
    """Execute one command against a parsed problem.

    Returns (exit code, output text).  Domain errors are mapped to exit
    codes here so the CLI shell stays trivial.
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    try:
        inst = instantiate_problem(problem, order_cap=order_cap)
        if command == "cohomology":
            return _cmd_cohomology(problem, inst, degree, as_json, fast_path, force)
        if command == "sha":
            return _cmd_sha(problem, inst, as_json, fast_path, force)
        if command == "report":
            return _cmd_report(problem, inst, as_json, fast_path, force)
        return _cmd_verify(problem, inst, as_json, fast_path, force)
    except _VALIDATION_ERRORS as exc:
        return 2, f"error: {exc}"
    except _COMPUTE_ERRORS as exc:
        return 1, f"error: {exc}"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_cohomology(problem, inst, degree, as_json, fast_path, force):
    degrees = [degree] if degree is not None else [-1, 0, 1, 2]
    groups = {
        d: tate_group(inst.lattice, d, fast_path=fast_path, force=force) for d in degrees
    }
    if as_json:
        doc = {
            "group": _group_json(problem, inst),
            "torus": _torus_json(problem, inst),
            "cohomology": {
                str(d): _finab_json(cg.structure) for d, cg in groups.items()
            },
        }
        return 0, _dumps(doc)
    lines = [f"H^{d} = {cg.structure}" for d, cg in groups.items()]
    return 0, "\n".join(lines)


def _cmd_sha(problem, inst, as_json, fast_path, force):
    sha, exact = sha_group(inst.lattice, inst.places, fast_path=fast_path, force=force)
    if as_json:
        doc = {
            "group": _group_json(problem, inst),
            "torus": _torus_json(problem, inst),
            "sha": _finab_json(sha),
            "exact": exact,
        }
        return 0, _dumps(doc)
    qualifier = "exact" if exact else "upper bound; places not certified complete"
    return 0, f"Sha = {sha} ({qualifier})"


def _cmd_report(problem, inst, as_json, fast_path, force):
    report = arith_report(inst.lattice, inst.places, inst.assumptions,
                          fast_path=fast_path, force=force)
    cohomology = {
        str(d): _finab_json(tate_group(inst.lattice, d, fast_path=fast_path, force=force).structure)
        for d in (-1, 0, 1, 2)
    }
    if as_json:
        doc = {
            "group": _group_json(problem, inst),
            "torus": _torus_json(problem, inst),
            "cohomology": cohomology,
            "sha": {**_finab_json(report.sha), "exact": report.sha_is_exact},
            "pic_order": _count_json(report.pic_order),
            "h_defect_order": _count_json(report.h_defect_order),
            "brauer_quotient": {
                **_finab_json(report.brauer_quotient),
                "exact": report.brauer_quotient_is_exact,
            },
            "herbrand": _fraction_json(report.herbrand),
            "tamagawa": _fraction_json(report.tamagawa),
            "local_indices": [
                {"place": place, "order": str(order)} for place, order in report.local_indices
            ],
            "divisibility_notes": list(report.divisibility_notes),
            "checks": [_check_json(c) for c in report.identity_checks],
        }
        return 0, _dumps(doc)
    return 0, _report_text(report)


def _cmd_verify(problem, inst, as_json, fast_path, force):
    checks = verify_identities(inst.lattice, inst.places, fast_path=fast_path, force=force)
    ok = all(c.passed for c in checks)
    if as_json:
        doc = {
            "group": _group_json(problem, inst),
            "torus": _torus_json(problem, inst),
            "checks": [_check_json(c) for c in checks],
        }
        return (0 if ok else 3), _dumps(doc)
    lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.details}" for c in checks]
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return (0 if ok else 3), "\n".join(lines)


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2)


def _group_json(problem: Problem, inst: ProblemInstance) -> dict:
    return {"order": inst.group.order, "generators": list(problem.generators)}


def _torus_json(problem: Problem, inst: ProblemInstance) -> dict:
    return {"spec": problem.torus_text, "rank": inst.lattice.rank}


def _finab_json(g: FinAbGroup) -> dict:
    return {"invariant_factors": list(g.invariant_factors), "order": str(g.order())}


def _count_json(value) -> str:
    return str(value)


def _fraction_json(value):
    if isinstance(value, Fraction):
        return {"num": str(value.numerator), "den": str(value.denominator)}
    return None


def _check_json(c: IdentityCheck) -> dict:
    return {"name": c.name, "pass": c.passed, "details": c.details}


def _report_text(r: ArithReport) -> str:
    lines = [
        f"group: {r.group_descriptor}",
        f"torus: {r.torus_descriptor}",
        f"H^1 = {r.h1}",
        f"H^2 = {r.h2}",
        f"Sha = {r.sha} ({'exact' if r.sha_is_exact else 'upper bound'})",
        f"pic_order = {r.pic_order}",
        f"h_defect_order = {r.h_defect_order}",
        f"brauer_quotient = {r.brauer_quotient} "
        f"({'exact' if r.brauer_quotient_is_exact else 'upper container'})",
        f"herbrand = {r.herbrand}",
        f"tamagawa = {r.tamagawa}",
        "local_indices:",
    ]
    lines.extend(f"  {place} = {order}" for place, order in r.local_indices)
    lines.append("divisibility_notes:")
    lines.extend(f"  - {note}" for note in r.divisibility_notes)
    lines.append("checks:")
    lines.extend(
        f"  {'PASS' if c.passed else 'FAIL'} {c.name}: {c.details}" for c in r.identity_checks
    )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tate-tori",
        description="Tate cohomology and order identities for torus character lattices",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("file", help="problem file (TOML)")
        p.add_argument("--json", action="store_true", help="emit deterministic JSON")
        p.add_argument("--no-fast-path", action="store_true",
                       help="force bar resolution even for cyclic groups")
        p.add_argument("--force", action="store_true",
                       help="ignore the degree-2 system size guardrail")
        if name == "cohomology":
            p.add_argument("--degree", type=int, choices=(-1, 0, 1, 2),
                           help="single degree instead of all four")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    order_cap = None
    env_cap = os.environ.get(ENV_ORDER_CAP)
    if env_cap is not None:
        try:
            order_cap = int(env_cap)
        except ValueError:
            print(f"error: {ENV_ORDER_CAP} must be an integer, got {env_cap!r}", file=sys.stderr)
            return 2
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    try:
        problem = parse_problem_file(text)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    code, output = run_command(
        problem,
        args.command,
        degree=getattr(args, "degree", None),
        as_json=args.json,
        fast_path=not args.no_fast_path,
        force=args.force,
        order_cap=order_cap,
    )
    print(output, file=sys.stdout if code in (0, 3) else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
