"""Command line front end: ``python -m minkval <subcommand> ...``.

Exit codes: 0 success, 1 unexpected error, 2 usage error or unknown
subcommand, 3 malformed input or failed Minkowski conditions, 4 solver
non-convergence (the report is still written), 5 verification failures.

Numeric options can also be set in a TOML file given with ``--config``.
Top-level keys apply to every subcommand, tables named after a
subcommand apply to that one only, and explicit flags always win.
"""
from __future__ import annotations

import argparse
import re
import sys

import numpy as np

from . import formats
from .decomposition import decompose
from .geomcore import sphere_grid
from .harness import SuiteConfig, counterexample_operators, default_operators, run_suite
from .minkowski_solver import (FacetDropoutError, MinkowskiConditionError,
                               NonConvergenceError, SolverConfig, blaschke_sum,
                               solve_minkowski)
from .operators import (KernelPair, bm_homomorphism, composite_operator, identity_operator,
                        pi1_operator, projection_body, projection_operator,
                        reflection_operator, steiner_point, steiner_point_exact)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_ERROR, EXIT_USAGE, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_FAILED = 1, 2, 3, 4, 5


class InputError(Exception):
    """Reported with exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# helpers

def _emit(doc, path):
    text = formats.dumps(doc)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_body(path):
    if str(path).lower().endswith(".off"):
        return formats.read_off(path)
    return formats.body_from_json(formats.read_json(path))


def _directions(args, n):
    if getattr(args, "direction", None):
        try:
            u = np.array([float(x) for x in args.direction.split(",")])
        except ValueError as exc:
            raise InputError(f"bad direction {args.direction!r}") from exc
        if len(u) != n or not np.linalg.norm(u):
            raise InputError(f"direction must be a nonzero vector of length {n}")
        return (u / np.linalg.norm(u))[None, :]
    return sphere_grid(n, args.grid).directions


def _values_doc(U, vals, **extra):
    return {"type": "report", **extra, "directions": U.tolist(),
            "values": np.asarray(vals, float).tolist()}


_COMPOSITE = re.compile(r"^composite\(([^,]+),([^,]+),([^)]+)\)$")


def parse_operator(spec):
    """Operator from a short spec: Pi, I, -I, Pi1, composite(c1,c2,c3)."""
    s = spec.replace(" ", "")
    simple = {"pi": projection_operator, "i": identity_operator, "-i": reflection_operator,
              "pi1": pi1_operator}
    if s.lower() in simple:
        return simple[s.lower()]()
    m = _COMPOSITE.match(s)
    if m:
        try:
            return composite_operator(*(float(x) for x in m.groups()))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    raise InputError(f"unknown operator spec {spec!r}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_hull(args):
    P = _load_body(args.input)
    doc = formats.polytope_to_json(P)
    doc["facets"] = [{"normal": f.normal.tolist(), "offset": f.offset, "area": f.area,
                      "vertices": list(f.vertex_indices)} for f in P.facets]
    _emit(doc, args.output)


def cmd_support(args):
    P = _load_body(args.body)
    U = _directions(args, P.n)
    _emit(_values_doc(U, P.support(U), quantity="support"), args.output)


def cmd_project_body(args):
    _emit(formats.zonotope_to_json(projection_body(_load_body(args.body))), args.output)


def cmd_steiner(args):
    P = _load_body(args.body)
    if args.quadrature:
        s, method = steiner_point(P, sphere_grid(P.n, args.grid)), "quadrature"
    else:
        s, method = steiner_point_exact(P), "external_angles"
    _emit({"type": "report", "quantity": "steiner_point", "method": method,
           "point": s.tolist()}, args.output)


def cmd_pi1(args):
    P = _load_body(args.body)
    if P.n != 3:
        raise InputError("pi1 needs a 3-polytope")
    U = _directions(args, 3)
    _emit(_values_doc(U, pi1_operator()(P, U), quantity="support_pi1"), args.output)


def cmd_bmh(args):
    P = _load_body(args.body)
    kernel = (KernelPair.projection() if args.kernel == "projection"
              else formats.kernel_from_json(formats.read_json(args.kernel)))
    U = _directions(args, P.n)
    _emit(_values_doc(U, bm_homomorphism(kernel)(P, U), quantity="support_bmh"),
          args.output)


def _solver_config(args):
    try:
        return SolverConfig(tol_area=args.tol, max_iter=args.max_iter)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_minkowski_solve(args):
    path = args.measure_file or args.measure
    if path is None:
        raise InputError("no measure given")
    mu = formats.measure_from_json(formats.read_json(path))
    try:
        report = solve_minkowski(mu, _solver_config(args))
    except MinkowskiConditionError as exc:
        raise InputError(f"Minkowski conditions fail: {exc}") from exc
    except FacetDropoutError as exc:
        print(f"minkowski-solve: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    _emit(formats.solve_report_to_json(report), args.output)
    if not report.converged:
        print(f"minkowski-solve: not converged, residual {report.final_residual:.3e}",
              file=sys.stderr)
        return EXIT_NONCONVERGED
    return 0


def cmd_blaschke_sum(args):
    P, Q = _load_body(args.first), _load_body(args.second)
    if P.n != Q.n or not (P.is_full and Q.is_full):
        raise InputError("blaschke-sum needs two full-dimensional bodies of equal dimension")
    try:
        R = blaschke_sum(P, Q, _solver_config(args))
    except NonConvergenceError as exc:
        _emit(formats.solve_report_to_json(exc.report), args.output)
        print(f"blaschke-sum: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    _emit(formats.polytope_to_json(R), args.output)


def cmd_decompose(args):
    K = _load_body(args.body)
    op = parse_operator(args.operator)
    dec = decompose(op, K, sphere_grid(K.n, args.grid), seed=args.seed)
    summary = dec.summary()
    _emit({"type": "report", "operator": op.name,
           "reconstruction_residual": dec.reconstruction_residual(),
           "degrees": {str(j): v for j, v in summary.items()}}, args.output)


SUITES = {
    "default": lambda: default_operators(),
    "empty": lambda: [],
    "broken": lambda: [projection_operator(), counterexample_operators()["volume_scaled"]],
}


def cmd_verify(args):
    if args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    cfg = SuiteConfig(seed=args.seed, grid_resolution=args.grid_resolution,
                      threads=args.threads)
    report = run_suite(SUITES[args.suite](), cfg)
    report = {"type": "report", "suite": args.suite, **report}
    if args.json:
        _emit(report, args.json)
    else:
        for op, checks in report["operators"].items():
            for axiom, r in checks.items():
                status = "pass" if r["passed"] else "FAIL"
                print(f"{status}  {op:<20} {axiom:<16} max residual {r['max_residual']:.3e}")
        for name, r in report["theorem_checks"].items():
            status = "pass" if r["passed"] else "FAIL"
            print(f"{status}  {'':<20} {name:<16} max residual {r['max_residual']:.3e}")
    return 0 if report["passed"] else EXIT_FAILED


# ---------------------------------------------------------------------------
# parser

def build_parser():
    p = _Parser(prog="minkval", description="Minkowski valuations on polytopes")
    p.add_argument("--config", help="TOML file with default option values")
    p.add_argument("--threads", type=int, default=1, help="worker threads for trial loops")
    sub = p.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("-o", "--output", help="output file (default: stdout)")
        return sp

    def dirs(sp):
        sp.add_argument("--direction", help="comma separated direction; default: a grid")
        sp.add_argument("--grid", type=int, default=16, help="sphere grid resolution")

    sp = add("hull", cmd_hull, "convex hull of a point set, with facets")
    sp.add_argument("input", help="polytope JSON or OFF file")
    sp = add("support", cmd_support, "support function values")
    sp.add_argument("body")
    dirs(sp)
    sp = add("project-body", cmd_project_body, "projection body as a zonotope")
    sp.add_argument("body")
    sp = add("steiner", cmd_steiner, "Steiner point")
    sp.add_argument("body")
    sp.add_argument("--quadrature", action="store_true", help="use the sphere quadrature")
    sp.add_argument("--grid", type=int, default=64)
    sp = add("pi1", cmd_pi1, "support of the order-one projection body (n = 3)")
    sp.add_argument("body")
    dirs(sp)
    sp = add("bmh", cmd_bmh, "support of a kernel Blaschke-Minkowski homomorphism")
    sp.add_argument("body")
    sp.add_argument("--kernel", required=True, help="kernel JSON or the word 'projection'")
    dirs(sp)

    def solver(sp):
        sp.add_argument("--tol", type=float, default=1e-8, help="relative area residual")
        sp.add_argument("--max-iter", type=int, default=200)

    sp = add("minkowski-solve", cmd_minkowski_solve, "polytope with prescribed facet areas")
    sp.add_argument("measure_file", nargs="?", help="measure JSON")
    sp.add_argument("--measure", help="measure JSON (alternative to the positional)")
    solver(sp)
    sp = add("blaschke-sum", cmd_blaschke_sum, "Blaschke sum of two polytopes")
    sp.add_argument("first")
    sp.add_argument("second")
    solver(sp)
    sp = add("decompose", cmd_decompose, "homogeneous decomposition of an operator")
    sp.add_argument("--operator", required=True,
                    help="Pi, I, -I, Pi1 or composite(c1,c2,c3)")
    sp.add_argument("--body", required=True)
    sp.add_argument("--grid", type=int, default=16)
    sp.add_argument("--seed", type=int, default=0)
    sp = add("verify", cmd_verify, "randomized axiom checks")
    sp.add_argument("--suite", default="default", help=f"one of {sorted(SUITES)}")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--grid-resolution", type=int, default=12)
    sp.add_argument("--json", help="write the JSON report here")
    return p, sub


def _apply_config(parser, sub, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config, "rb") as fh:
            conf = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise InputError(f"config {known.config}: {exc}") from exc
    flat = {k.replace("-", "_"): v for k, v in conf.items() if not isinstance(v, dict)}
    if "threads" in flat:
        parser.set_defaults(threads=flat["threads"])
    for name, sp in sub.choices.items():
        own = {k.replace("-", "_"): v for k, v in conf.get(name, {}).items()}
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in {**flat, **own}.items() if k in dests})


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub = build_parser()
    try:
        _apply_config(parser, sub, argv)
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise InputError("--threads must be positive")
        return int(args.func(args) or 0)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (InputError, formats.FormatError) as exc:
        print(f"minkval: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # single-line diagnostic for anything unexpected
        print(f"minkval: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
