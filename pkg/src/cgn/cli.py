"""
Command-line interface.

::

    cgn certify FILE | --demo NAME
    cgn solve FILE | --demo NAME [--max-iter N] [--trace PATH] [--verify]
    cgn scalar (--lipschitz K | --smale GAMMA | --custom NAME --R R [--param k=v ...]) --xi XI --alpha ALPHA
    cgn demo NAME | --list

Exit codes: 0 success, 1 a hypothesis fails, 2 invalid input, 3 computation
error, 4 the iteration did not converge within ``max_iter``.
"""

from __future__ import annotations

import argparse
import sys

from . import catalog
from .errors import CGNError, SchemaError
from .io import dumps, load_problem, problem_to_dict
from .majorant import AuxiliaryFunction, Lipschitz, Smale, custom_from_catalog, h3_condition, scalar_sequence
from .regularity import certify
from .solver import Termination, run, trace_csv, verify_majorization

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_SCHEMA = 2
EXIT_COMPUTE = 3
EXIT_MAXITER = 4


def _spec(args):
    if args.demo:
        try:
            return catalog.get_demo(args.demo)
        except KeyError as err:
            raise SchemaError(str(err.args[0])) from None
    if not args.file:
        raise SchemaError("give a problem FILE or --demo NAME")
    return load_problem(args.file)


def _certificate(spec):
    if spec.regularity is None or spec.majorant is None:
        raise SchemaError("certification needs 'regularity' and 'majorant' sections")
    return certify(spec.problem, spec.regularity, spec.majorant, xi=spec.xi, alpha=spec.alpha)


def cmd_certify(args, out):
    spec = _spec(args)
    cert = _certificate(spec)
    doc = cert.to_dict()
    if spec.name:
        doc["name"] = spec.name
    out.write(dumps(doc))
    return EXIT_OK if cert.valid else EXIT_HYPOTHESIS


def cmd_solve(args, out):
    spec = _spec(args)
    max_iter = args.max_iter if args.max_iter is not None else spec.max_iter
    report = run(spec.problem, max_iter=max_iter, rule=spec.rule)
    out.write(report.summary() + "\n")
    check = None
    if args.verify:
        cert = _certificate(spec)
        if cert.scalar is None:
            out.write("majorization: not checked, the certificate has no scalar sequence\n")
        else:
            check = verify_majorization(report, cert)
            out.write(check.summary() + "\n")
    if args.trace:
        trace_csv(report, check, path=args.trace)
    if report.termination is Termination.MAX_ITER:
        return EXIT_MAXITER
    if report.termination is Termination.SUBPROBLEM_ERROR:
        return EXIT_COMPUTE
    return EXIT_OK


def _parse_constant(text, name):
    # accepts "1.5" as well as "K=1.5"
    if "=" in text:
        key, _, text = text.partition("=")
        if key.strip() != name:
            raise argparse.ArgumentTypeError(f"expected {name}=VALUE, got {key}=...")
    return float(text)


def _scalar_model(args):
    if args.lipschitz is not None:
        return Lipschitz(_parse_constant(args.lipschitz, "K"))
    if args.smale is not None:
        return Smale(_parse_constant(args.smale, "gamma"))
    params = {}
    for item in args.param or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise SchemaError(f"--param expects key=value, got {item!r}")
        params[key] = float(val)
    if args.R is None:
        raise SchemaError("--custom needs --R")
    try:
        return custom_from_catalog(args.custom, float(args.R), **params)
    except KeyError as err:
        raise SchemaError(str(err)) from None


def cmd_scalar(args, out):
    try:
        model = _scalar_model(args)
    except (argparse.ArgumentTypeError, ValueError) as err:
        if isinstance(err, CGNError):
            raise
        raise SchemaError(str(err)) from None
    aux = AuxiliaryFunction(args.xi, args.alpha, model)
    lhs, rhs, holds = h3_condition(aux)
    if not holds:
        out.write(f"h3 fails: discriminant condition {lhs:.16g} <= {rhs:.16g} is violated\n")
        return EXIT_HYPOTHESIS
    trace = scalar_sequence(aux, tol=args.tol, max_iter=args.max_iter)
    errs = trace.errors()
    out.write(f"t* = {trace.t_star:.16g}  rate: {'Q-quadratic' if trace.h4_holds else 'Q-linear only'}\n")
    out.write(f"{'k':>3}  {'t_k':>22}  {'t*-t_k':>12}  {'ratio':>10}  {'ratio/err':>10}\n")
    for k, (tk, e) in enumerate(zip(trace.t, errs)):
        if k == 0 or errs[k - 1] <= 0:
            r = q = ""
        else:
            r = f"{e / errs[k - 1]:.6f}"
            q = f"{e / errs[k - 1] ** 2:.6f}"
        out.write(f"{k:>3}  {tk:>22.16g}  {e:>12.4e}  {r:>10}  {q:>10}\n")
    return EXIT_OK


def cmd_demo(args, out):
    if args.list or not args.name:
        for name, fn in catalog.DEMOS.items():
            out.write(f"{name:<12} {fn().description}\n")
        return EXIT_OK
    try:
        spec = catalog.get_demo(args.name)
    except KeyError as err:
        raise SchemaError(str(err.args[0])) from None
    out.write(dumps(problem_to_dict(spec)))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cgn", description="Gauss-Newton solver and convergence certificates for min h(F(x))")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="evaluate the convergence hypotheses and print the certificate as JSON")
    p.add_argument("file", nargs="?")
    p.add_argument("--demo", metavar="NAME", choices=sorted(catalog.DEMOS))
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("solve", help="run the Gauss-Newton iteration")
    p.add_argument("file", nargs="?")
    p.add_argument("--demo", metavar="NAME", choices=sorted(catalog.DEMOS))
    p.add_argument("--max-iter", type=int)
    p.add_argument("--trace", metavar="PATH", help="write the iteration trace as CSV")
    p.add_argument("--verify", action="store_true", help="certify and check the majorization bounds along the run")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("scalar", help="print the scalar majorizing sequence")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--lipschitz", metavar="K")
    g.add_argument("--smale", metavar="GAMMA")
    g.add_argument("--custom", metavar="NAME")
    p.add_argument("--R", help="domain bound for --custom")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-15)
    p.add_argument("--max-iter", type=int, default=100)
    p.set_defaults(func=cmd_scalar)

    p = sub.add_parser("demo", help="print a built-in problem file")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SCHEMA if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except SchemaError as err:
        sys.stderr.write(f"cgn: invalid input: {err}\n")
        return EXIT_SCHEMA
    except (CGNError, ArithmeticError, ValueError) as err:
        sys.stderr.write(f"cgn: computation failed: {err}\n")
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
