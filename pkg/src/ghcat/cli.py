"""Command-line entry point: ghcat <subcommand> ...; JSON on stdout, exit 0 ok, 1 failed check, 2 usage error."""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from .catalog import UnknownEntryError, catalog_get, catalog_list
from .constructions import ConstructionError, accompany_even, accompany_odd, deequivariantize, dual_graph_data, equivariantize
from .cuntz_formal import FormalPreconditionError, FormalResourceError, verify_intertwiners, verify_qsystem_isometry, verify_rho_consistency
from .group import CapabilityError, InvalidGroupError, map_from_permutation, parse_group
from .solution import DEFAULT_TOL, ShapeError, check_qsystem, evaluate_residuals, load_solution, save_solution
from .solver import SolveOptions, classify, solve_all
from .symmetry import SymmetryError, gamma_orbit

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

USAGE_ERRORS = (
    CapabilityError,
    ConstructionError,
    FormalPreconditionError,
    FormalResourceError,
    InvalidGroupError,
    ShapeError,
    SymmetryError,
    UnknownEntryError,
    ValueError,
    OSError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(data) -> None:
    print(json.dumps(data, indent=1))


def _solve_options(args) -> SolveOptions:
    kw = {"restarts": args.restarts, "seed": args.seed, "require_qsystem": args.require_qsystem}
    if args.tol is not None:
        kw["tol_accept"] = args.tol
        kw["tol_polish"] = min(args.tol, SolveOptions.tol_polish)
    return SolveOptions(**kw)


def _write_dir(out: str | None, solutions) -> list[str]:
    if out is None:
        return []
    folder = Path(out)
    folder.mkdir(parents=True, exist_ok=True)
    paths = []
    for s in solutions:
        path = folder / f"{s.name}.json"
        save_solution(s, path)
        paths.append(str(path))
    return paths


def cmd_verify(args) -> int:
    s = load_solution(args.file)
    report = evaluate_residuals(s, args.tol)
    q = check_qsystem(s, args.tol)
    out = {"name": s.name, "residuals": report.to_json(), "q1": q.q1, "q2": q.q2}
    ok = report.passed
    if args.formal:
        if not ok:
            out["formal"] = {"skipped": "residual check failed"}
        else:
            formal = {
                "intertwiners": verify_intertwiners(s, args.formal_tol).to_json(),
                "rho_consistency": verify_rho_consistency(s, args.formal_tol).to_json(),
            }
            if q.q1:
                formal["qsystem_isometry"] = verify_qsystem_isometry(s, args.formal_tol).to_json()
            ok = ok and all(v["passed"] for v in formal.values())
            out["formal"] = formal
    out["passed"] = ok
    _emit(out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_solve(args) -> int:
    G = parse_group(args.group)
    sols = solve_all(G, _solve_options(args))
    sols = [s.replace(meta={"name": f"{G.label}-solution{i}", "source": "solve"}) for i, s in enumerate(sols)]
    paths = _write_dir(args.out, sols)
    _emit({"group": G.to_json(), "count": len(sols), "files": paths, "solutions": [s.to_json() for s in sols]})
    return EXIT_OK


def cmd_classify(args) -> int:
    G = parse_group(args.group)
    records = classify(G, _solve_options(args))
    paths = _write_dir(args.out, [r.representative for r in records])
    _emit({"group": G.to_json(), "count": len(records), "files": paths, "classes": [r.to_json() for r in records]})
    return EXIT_OK


def cmd_orbit(args) -> int:
    _emit(gamma_orbit(load_solution(args.file), args.tol).to_json())
    return EXIT_OK


def cmd_out_group(args) -> int:
    res = gamma_orbit(load_solution(args.file), args.tol)
    _emit(
        {
            "stabilizer_order": res.stabilizer_order,
            "name": res.stabilizer_name,
            "gamma_order": res.gamma_order,
            "orbit_size": len(res.orbit),
            "all_amplitudes_nonzero": res.all_amplitudes_nonzero,
            "upper_bound_only": not res.all_amplitudes_nonzero,
        }
    )
    return EXIT_OK


def cmd_accompany(args) -> int:
    s = load_solution(args.file)
    out = accompany_odd(s) if s.group.is_odd else accompany_even(s)
    report = evaluate_residuals(out)
    if args.out:
        save_solution(out, args.out)
    _emit({"file": args.out, "residuals": report.to_json(), "q1": check_qsystem(out).q1, "solution": out.to_json()})
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_deq(args) -> int:
    s = load_solution(args.file)
    _emit(deequivariantize(s, s.group.idx(args.z)).to_json())
    return EXIT_OK


def parse_permutation(text: str) -> list[int]:
    parts = [p for p in re.split(r"[\s,]+", text.strip().strip("[]()")) if p]
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise InvalidGroupError(f"cannot parse permutation {text!r}") from None


def cmd_eqv(args) -> int:
    s = load_solution(args.file)
    theta = map_from_permutation(s.group, parse_permutation(args.aut))
    _emit(equivariantize(s, theta).to_json())
    return EXIT_OK


def cmd_dual_graph(args) -> int:
    _emit(dual_graph_data(parse_group(args.group)).to_json())
    return EXIT_OK


def _catalog_params(args) -> dict:
    params = {}
    if getattr(args, "s", None) is not None:
        params["s"] = args.s
    if getattr(args, "z", None) is not None:
        params["z"] = args.z
    return params


def cmd_catalog(args) -> int:
    if args.action == "list":
        _emit([{"name": n, "group": catalog_get(n).group.label, "q1": catalog_get(n).expected_q1} for n in catalog_list()])
        return EXIT_OK
    entry = catalog_get(args.name)
    s = entry.construct(**_catalog_params(args))
    if args.action == "show":
        _emit(
            {
                "name": entry.name,
                "group": entry.group.label,
                "closed_forms": entry.closed_forms,
                "expected_q1": entry.expected_q1,
                "notes": entry.notes,
                "solution": s.to_json(),
            }
        )
        return EXIT_OK
    save_solution(s, args.file)
    _emit({"name": entry.name, "file": args.file})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ghcat", description="Generalized Haagerup category data: verify, solve, classify, construct.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="check every equation family on a solution file")
    v.add_argument("file")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--formal", action="store_true", help="also verify the intertwiner identities by rewriting")
    v.add_argument("--formal-tol", type=float, default=1e-10)
    v.set_defaults(func=cmd_verify)

    for name, func, text in (("solve", cmd_solve, "all gauge classes"), ("classify", cmd_classify, "one record per Gamma-orbit")):
        c = sub.add_parser(name, help=text)
        c.add_argument("--group", required=True, help="invariant factors, e.g. 2,2")
        c.add_argument("--restarts", type=int, default=SolveOptions.restarts)
        c.add_argument("--seed", type=int, default=0)
        c.add_argument("--tol", type=float, default=None)
        c.add_argument("--require-qsystem", action="store_true")
        c.add_argument("--out", help="directory for one JSON file per class")
        c.set_defaults(func=func)

    for name, func in (("orbit", cmd_orbit), ("out-group", cmd_out_group)):
        o = sub.add_parser(name)
        o.add_argument("file")
        o.add_argument("--tol", type=float, default=1e-8)
        o.set_defaults(func=func)

    a = sub.add_parser("accompany", help="accompanying solution (odd groups or Z_2m)")
    a.add_argument("file")
    a.add_argument("--out")
    a.set_defaults(func=cmd_accompany)

    d = sub.add_parser("deq", help="de-equivariantization fusion data")
    d.add_argument("file")
    d.add_argument("--z", type=int, required=True)
    d.set_defaults(func=cmd_deq)

    e = sub.add_parser("eqv", help="equivariantization fusion data")
    e.add_argument("file")
    e.add_argument("--aut", required=True, help="automorphism as a permutation of element indices, e.g. 0,2,3,1")
    e.set_defaults(func=cmd_eqv)

    g = sub.add_parser("dual-graph", help="dual principal graph census")
    g.add_argument("--group", required=True)
    g.set_defaults(func=cmd_dual_graph)

    cat = sub.add_parser("catalog", help="explicit solutions")
    cs = cat.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cs.add_parser("list")
    for action in ("show", "export"):
        c = cs.add_parser(action)
        c.add_argument("name")
        if action == "export":
            c.add_argument("file")
        c.add_argument("--s", type=int, choices=(1, -1), help="Z2x2 sign parameter")
        c.add_argument("--z", help="Z2x2 parameter name; use --z=-sqrt_d for negative choices")
    cat.set_defaults(func=cmd_catalog)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ghcat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except USAGE_ERRORS as exc:
        print(f"ghcat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
