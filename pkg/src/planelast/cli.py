"""Command-line interface.

Subcommands: ``example1`` and ``cook`` run the two studies, ``solve``
runs a single problem from a config file, ``alpha`` prints the exponent
for given (h, lambda, d_omega), ``refine-mesh`` refines a mesh file.

Exit status: 0 on success, 1 on usage errors, 2 on numerical failure.
"""

import argparse
import sys

from . import experiments
from .analysis import h1_seminorm_error, l2_error, point_displacement
from .assembly import IllPosedProblemError, SingularElementError
from .mesh import (MeshFormatError, PointNotFoundError, generate_cook_mesh,
                   generate_square_mesh, read_mesh, uniform_refine,
                   write_mesh)
from .problem import (COOK_TIP, COOK_TIP_ALT, compute_alpha,
                      example1_exact_gradient, example1_exact_solution)
from .solver import NotSPDError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


CONFIG_KEYS = ("domain", "side", "n0", "refinements", "lambda", "mu",
               "E", "nu", "alpha", "g", "mesh")


def parse_alpha_policy(text):
    if text in ("star", "one", "balanced"):
        return text
    try:
        return float(text)
    except ValueError:
        raise UsageError("invalid alpha policy %r" % text) from None


def parse_config(path):
    values = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError("%s:%d: expected key=value" % (path, lineno))
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in CONFIG_KEYS:
                raise UsageError("%s:%d: unknown key %r" % (path, lineno, key))
            values[key] = val
    out = {}
    for key, val in values.items():
        if key == "domain":
            if val not in ("square", "cook"):
                raise UsageError("domain must be 'square' or 'cook'")
            out[key] = val
        elif key == "mesh":
            out[key] = val
        elif key in ("n0", "refinements"):
            out[key] = int(val)
        elif key == "alpha":
            out[key] = parse_alpha_policy(val)
        else:
            out[key] = float(val)
    return out


def _add_common(p):
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--outdir", metavar="PATH")
    p.add_argument("--lambda", dest="lambdas", action="append", type=float,
                   metavar="FLOAT")
    p.add_argument("--mu", type=float)
    p.add_argument("--E", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--alpha", type=parse_alpha_policy,
                   metavar="{star|one|FLOAT}")
    p.add_argument("--levels", type=int)
    p.add_argument("--n0", type=int)
    p.add_argument("--g", type=float)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--full-precision", action="store_true")


def build_parser():
    parser = _Parser(prog="planelast",
                     description="Locking-free P1 elasticity solver")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    for name in ("example1", "cook", "solve"):
        p = sub.add_parser(name)
        _add_common(p)

    p = sub.add_parser("alpha")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--d-omega", type=float, required=True)
    p.add_argument("--full-precision", action="store_true")

    p = sub.add_parser("refine-mesh")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--times", type=int, default=1)
    return parser


def _fmt(value, full_precision):
    return repr(float(value)) if full_precision else "%.6g" % value


def _study_config(args, domain):
    cfg = {}
    if args.config:
        cfg = parse_config(args.config)
        if "domain" in cfg and cfg["domain"] != domain:
            raise UsageError("config domain %r does not match the %s command"
                             % (cfg["domain"], domain))
    if "mesh" in cfg:
        raise UsageError("the mesh= key applies to 'solve' only")
    kw = {"domain": domain, "outdir": args.outdir or "results",
          "jobs": args.jobs}
    if domain == "cook":
        kw.update(levels=6, n0=4)
    if "refinements" in cfg:
        kw["levels"] = cfg["refinements"]
    if args.levels is not None:
        kw["levels"] = args.levels
    for key, name in (("n0", "n0"), ("side", "side"), ("mu", "mu"),
                      ("E", "E"), ("nu", "nu"), ("g", "g")):
        if key in cfg:
            kw[name] = cfg[key]
        flag = getattr(args, key, None)
        if flag is not None:
            kw[name] = flag
    if "lambda" in cfg:
        kw["lambdas"] = (cfg["lambda"],)
    if args.lambdas:
        kw["lambdas"] = tuple(args.lambdas)
    if "alpha" in cfg:
        kw["policies"] = (cfg["alpha"],)
    if args.alpha is not None:
        kw["policies"] = (args.alpha,)
    return experiments.StudyConfig(**kw)


def _cmd_example1(args):
    experiments.run_example1(_study_config(args, "square"))
    return 0


def _cmd_cook(args):
    experiments.run_cook(_study_config(args, "cook"))
    return 0


def _cmd_solve(args):
    from .problem import cook_problem, example1_problem

    cfg = parse_config(args.config) if args.config else {}
    domain = cfg.get("domain", "square")
    n0 = args.n0 if args.n0 is not None else cfg.get("n0", 8)
    levels = args.levels if args.levels is not None \
        else cfg.get("refinements", 1)
    policy = args.alpha if args.alpha is not None else cfg.get("alpha", "star")
    full = args.full_precision

    if domain == "square":
        import math
        side = cfg.get("side", math.pi)
        lam = (args.lambdas[-1] if args.lambdas
               else cfg.get("lambda", 1e3))
        mu = args.mu if args.mu is not None else cfg.get("mu", 1.0)
        mesh = generate_square_mesh(side, n0)
    else:
        from .problem import COOK_E, COOK_G, COOK_NU
        E = args.E if args.E is not None else cfg.get("E", COOK_E)
        nu = args.nu if args.nu is not None else cfg.get("nu", COOK_NU)
        g = args.g if args.g is not None else cfg.get("g", COOK_G)
        mesh = generate_cook_mesh(n0)
    if "mesh" in cfg:
        mesh = read_mesh(cfg["mesh"])
    for _ in range(max(levels - 1, 0)):
        mesh = uniform_refine(mesh)

    if domain == "square":
        problem = example1_problem(mesh, lam, mu=mu, alpha_policy=policy)
    else:
        problem = cook_problem(mesh, E=E, nu=nu, g=g, alpha_policy=policy)

    u_h, report, system = experiments.solve_problem(problem)
    print("Nh = %d" % system.dof_map.n_free)
    print("alpha = %s" % _fmt(system.alpha_report.alpha, full))
    print("lambda_pow_alpha = %s" % _fmt(system.alpha_report.lambda_pow_alpha,
                                         full))
    print("iterations = %d" % report.iterations)
    print("relative_residual = %s" % _fmt(report.relative_residual, full))
    if not report.converged:
        print("solver did not converge", file=sys.stderr)
        return 2
    if domain == "square":
        print("l2_error = %s" % _fmt(
            l2_error(u_h, lambda x: example1_exact_solution(x, lam)), full))
        print("h1_error = %s" % _fmt(
            h1_seminorm_error(u_h,
                              lambda x: example1_exact_gradient(x, lam)),
            full))
    else:
        print("u2(48,52) = %s" % _fmt(point_displacement(u_h, COOK_TIP)[1],
                                      full))
        print("u2(48,50) = %s" % _fmt(point_displacement(u_h, COOK_TIP_ALT)[1],
                                      full))
    return 0


def _cmd_alpha(args):
    report = compute_alpha(args.h, args.lam, args.d_omega)
    print(_fmt(report.alpha, args.full_precision))
    return 0


def _cmd_refine(args):
    mesh = read_mesh(args.input)
    if args.times < 0:
        raise UsageError("--times must be nonnegative")
    for _ in range(args.times):
        mesh = uniform_refine(mesh)
    write_mesh(mesh, args.output)
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        handler = {
            "example1": _cmd_example1,
            "cook": _cmd_cook,
            "solve": _cmd_solve,
            "alpha": _cmd_alpha,
            "refine-mesh": _cmd_refine,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except MeshFormatError as exc:
        print("mesh format error: %s" % exc, file=sys.stderr)
        return 1
    except (IllPosedProblemError, NotSPDError, SingularElementError,
            PointNotFoundError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
