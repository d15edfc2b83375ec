"""Command line entry point: ``prodfw {gen,solve,feas,condnum,verify}``.

Exit codes: ``feas`` returns 0 (feasible), 1 (infeasible) or 2 (undecided);
``verify`` returns 1 when a check fails; usage errors exit 3 and I/O errors 4.
"""

import argparse
import json
import sys

from .condition import condition_report
from .experiment import ALGORITHMS, ITERATION_UNITS, run_solver
from .faces import FaceEnumerationError, extreme_indices
from .feasibility import EXIT_CODES, decide_feasibility
from .instances import Instance, generate
from .objective import IntersectionObjective
from .polytope import VPolytope
from .solvers import SolverConfig

EXIT_USAGE = 3
EXIT_IO = 4
STEP_NAMES = {"short": "short_step", "linesearch": "line_search"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path):
    try:
        return Instance.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise OSError(f"cannot read instance {path}: {exc}") from exc


def cmd_gen(args):
    if (args.min_verts is None) != (args.max_verts is None):
        raise UsageError("--min-verts and --max-verts go together")
    rng = None if args.min_verts is None else (args.min_verts, args.max_verts)
    try:
        inst = generate(args.k, args.n, args.seed, args.intersecting, rng)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    inst.save(args.out)
    return 0


def cmd_solve(args):
    inst = _load(args.instance)
    if args.algo == "alm" and inst.k != 2:
        raise UsageError("alm needs an instance with exactly 2 blocks")
    PP = inst.product()
    obj = IntersectionObjective(PP.k, PP.n)
    cfg = SolverConfig(max_iters=args.max_iters, gap_tol=args.gap_tol,
                       step_rule=STEP_NAMES[args.step] if args.step else None)
    trace = run_solver(args.algo, obj, PP, cfg)
    trace.to_csv(args.log)
    print(json.dumps({
        "algo": args.algo,
        "iteration_unit": ITERATION_UNITS[args.algo],
        "step_rule": trace.step_rule,
        "n_iter": trace.n_iter,
        "converged": trace.converged,
        "final_f": trace.final_f,
        "final_gap": trace.final_gap,
    }))
    return 0


def cmd_feas(args):
    inst = _load(args.instance)
    verdict = decide_feasibility(inst, args.eps, SolverConfig(max_iters=args.max_iters))
    print(json.dumps(verdict.to_dict()))
    return EXIT_CODES[verdict.status]


def cmd_condnum(args):
    inst = _load(args.instance)
    if not 0 <= args.block < inst.k:
        raise UsageError(f"--block must be in [0, {inst.k - 1}]")
    P = VPolytope(inst.blocks[args.block])
    idx = extreme_indices(P)
    try:
        report = condition_report(P.subset(idx)).to_dict()
    except FaceEnumerationError as exc:
        raise UsageError(str(exc)) from exc
    # face indices refer to the block's rows in the instance file
    for key in ("argmin_face_pw", "argmin_facet_vf"):
        report[key] = [idx[i] for i in report[key]]
    if args.which != "all":
        keep = {"pw": ("pw", "argmin_face_pw"), "apw": ("apw",),
                "vf": ("vf", "argmin_facet_vf")}[args.which]
        report = {k: report[k] for k in keep}
    print(json.dumps(report))
    return 0


def cmd_verify(args):
    from .verify import run_suite

    results = run_suite(args.seed, quick=not args.full)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def build_parser():
    p = _Parser(prog="prodfw", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--intersecting", action="store_true")
    g.add_argument("--min-verts", type=int)
    g.add_argument("--max-verts", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="minimize the intersection objective and log a trace")
    s.add_argument("--algo", choices=ALGORITHMS, required=True)
    s.add_argument("--instance", required=True)
    s.add_argument("--max-iters", type=int, default=1000)
    s.add_argument("--gap-tol", type=float, default=1e-7)
    s.add_argument("--step", choices=tuple(STEP_NAMES))
    s.add_argument("--log", required=True)
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("feas", help="decide approximate feasibility")
    f.add_argument("--instance", required=True)
    f.add_argument("--eps", type=float, required=True)
    f.add_argument("--max-iters", type=int, default=5000)
    f.set_defaults(func=cmd_feas)

    c = sub.add_parser("condnum", help="condition numbers of one block")
    c.add_argument("--instance", required=True)
    c.add_argument("--block", type=int, required=True, help="0-based block index")
    c.add_argument("--which", choices=("pw", "apw", "vf", "all"), default="all")
    c.set_defaults(func=cmd_condnum)

    v = sub.add_parser("verify", help="run the property suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--full", action="store_true", help="acceptance-size run instead of quick")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"prodfw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"prodfw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"prodfw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
