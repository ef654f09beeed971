"""Command-line surface: single runs, population sizing, sweeps, and an
expression walk-through for hand-written trees.

Exit codes: 0 on success, 1 when a run or sizing fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import harness
from .gp import GpConfig, run_gp
from .pipe import dump_model, run_pipe
from .problems import ProblemSpec, evaluate, express, order_problem, trap_problem
from .trees import default_max_depth, inorder_leaves, parse_tree, validate_tree


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _print_kv(**pairs) -> None:
    for key, value in pairs.items():
        print(f"{key}={_fmt(value)}")


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=("order", "trap"), default="order",
                   help="fitness family (default: order)")
    p.add_argument("--l", type=int, required=True, metavar="N",
                   help="number of complementary terminal pairs")
    p.add_argument("--k", type=int, default=3, metavar="K",
                   help="trap group size (default: 3)")
    p.add_argument("--delta", type=float, default=1.0, metavar="D",
                   help="trap signal parameter in [0,1] (default: 1.0)")
    p.add_argument("--neg-join", action="store_true",
                   help="add the NEG_JOIN function to the alphabet")
    p.add_argument("--junk", type=int, default=0, metavar="N",
                   help="number of unique junk terminals (default: 0)")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-gens", type=int, default=200, metavar="G",
                   help="generation cap per run (default: 200)")
    p.add_argument("--max-depth", type=int, default=None, metavar="D",
                   help="tree depth budget in edges (default: derived from --l)")
    p.add_argument("--seed", type=int, default=0, metavar="S",
                   help="base random seed (default: 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpscale",
        description="Tree GP and prototype-tree recombination on the ORDER and "
        "TRAP benchmark families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one seeded run and print its result")
    run.add_argument("--algo", choices=("gp", "pipe"), required=True)
    _add_problem_flags(run)
    run.add_argument("--pop", type=int, required=True, metavar="N",
                     help="population size (even, >= 2)")
    _add_run_flags(run)
    run.add_argument("--dump-model", action="store_true",
                     help="after a pipe run, print the last prototype-tree model")

    bisect = sub.add_parser("bisect", help="find the minimal population size "
                            "solving all runs, to a 10%% bracket")
    bisect.add_argument("--algo", choices=("gp", "pipe"), required=True)
    _add_problem_flags(bisect)
    _add_run_flags(bisect)
    bisect.add_argument("--runs", type=int, default=harness.DEFAULT_RUNS, metavar="N",
                        help="runs per batch, all of which must succeed (default: 30)")
    bisect.add_argument("--pop-ceiling", type=int, default=harness.DEFAULT_POP_CEILING,
                        metavar="N", help="abort sizing past this population size "
                        f"(default: {harness.DEFAULT_POP_CEILING})")
    bisect.add_argument("--workers", type=int, default=1, metavar="N",
                        help="parallel worker processes per batch (default: 1)")

    sweep = sub.add_parser("sweep", help="size a plan of instances and write "
                           "CSV + SVG reports")
    sweep.add_argument("--plan", choices=harness.PLAN_NAMES, default="order",
                       help="built-in sweep plan (default: order)")
    sweep.add_argument("--algo", choices=("gp", "pipe", "both"), default="both")
    sweep.add_argument("--sizes", type=str, default=None, metavar="A,B,...",
                       help="comma-separated override of the swept sizes "
                       "(junk counts for plan junk-fixed-l)")
    sweep.add_argument("--k", type=int, default=3, metavar="K")
    sweep.add_argument("--delta", type=float, default=1.0, metavar="D")
    sweep.add_argument("--out", type=str, required=True, metavar="DIR",
                       help="output directory for <plan>.csv and <plan>.svg")
    sweep.add_argument("--runs", type=int, default=harness.DEFAULT_RUNS, metavar="N")
    sweep.add_argument("--seed", type=int, default=0, metavar="S")
    sweep.add_argument("--max-gens", type=int, default=200, metavar="G")
    sweep.add_argument("--pop-ceiling", type=int, default=harness.DEFAULT_POP_CEILING,
                       metavar="N")
    sweep.add_argument("--workers", type=int, default=1, metavar="N")

    express_p = sub.add_parser("express", help="parse a tree, print its leaf "
                               "walk, expression vector, and fitness")
    _add_problem_flags(express_p)
    express_p.add_argument("tree", help="prefix tree text, e.g. "
                           "'(JOIN (NEG_JOIN X1 ~X2) J3)'")
    return parser


def _build_problem(args, parser: argparse.ArgumentParser) -> ProblemSpec:
    try:
        if args.problem == "trap":
            return trap_problem(args.l, args.k, args.delta, args.junk, args.neg_join)
        return order_problem(args.l, args.junk, args.neg_join)
    except ValueError as err:
        parser.error(f"--problem/--l/--k/--delta/--junk: {err}")


def _cmd_run(args, parser) -> int:
    problem = _build_problem(args, parser)
    max_depth = args.max_depth
    if max_depth is None:
        max_depth = default_max_depth(args.l)
    try:
        cfg = GpConfig(
            pop_size=args.pop,
            max_depth=max_depth,
            max_generations=args.max_gens,
            seed=args.seed,
        )
    except ValueError as err:
        parser.error(f"--pop/--max-depth/--max-gens: {err}")
    last_model: list = []
    if args.algo == "pipe":
        observer = None
        if args.dump_model:
            def observer(generation, model):
                last_model[:] = [model]
        result = run_pipe(problem, cfg, model_observer=observer)
    else:
        result = run_gp(problem, cfg)
    _print_kv(
        success=result.success,
        evaluations=result.evaluations,
        generations_used=result.generations_used,
        best_fitness=result.best_fitness,
    )
    if args.dump_model and last_model:
        print(dump_model(last_model[0]))
    return 0 if result.success else 1


def _cmd_bisect(args, parser) -> int:
    problem = _build_problem(args, parser)
    try:
        sizing = harness.bisect_population_size(
            problem,
            args.algo,
            args.seed,
            n_runs=args.runs,
            max_depth=args.max_depth,
            max_generations=args.max_gens,
            ceiling=args.pop_ceiling,
            workers=args.workers,
        )
    except harness.SizingFailure as failure:
        for pop_size, ok in failure.history:
            print(f"probe pop_size={pop_size} all_succeeded={_fmt(ok)}")
        _print_kv(
            sizing_failed=True,
            ceiling=failure.ceiling,
            last_pop_size=failure.last_pop_size,
            success_rate=failure.success_rate,
        )
        print(f"error: {failure}", file=sys.stderr)
        return 1
    for pop_size, ok in sizing.history:
        print(f"probe pop_size={pop_size} all_succeeded={_fmt(ok)}")
    _print_kv(
        min_pop_size=sizing.min_pop_size,
        avg_evaluations=sizing.avg_evaluations,
        runs=len(sizing.runs),
    )
    return 0


def _cmd_sweep(args, parser) -> int:
    algorithms = harness.ALGORITHMS if args.algo == "both" else (args.algo,)
    sizes = None
    if args.sizes is not None:
        try:
            sizes = tuple(int(tok) for tok in args.sizes.split(",") if tok)
        except ValueError:
            parser.error(f"--sizes: expected comma-separated integers, got {args.sizes!r}")
        if not sizes:
            parser.error("--sizes: empty size list")
    try:
        plan = harness.build_plan(
            args.plan,
            algorithms=algorithms,
            sizes=sizes,
            k=args.k,
            delta=args.delta,
            seed_base=args.seed,
            n_runs=args.runs,
            max_generations=args.max_gens,
            ceiling=args.pop_ceiling,
        )
    except ValueError as err:
        parser.error(f"--plan/--sizes/--k: {err}")
    rows = harness.scalability_sweep(plan, workers=args.workers, log=print)
    try:
        csv_path, svg_path = harness.emit_report(
            rows, args.out, basename=args.plan, x_field=plan.x_field
        )
    except OSError as err:
        print(f"error: cannot write report: {err}", file=sys.stderr)
        return 1
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    return 0 if all(r.success_rate == 1.0 for r in rows) else 1


def _cmd_express(args, parser) -> int:
    problem = _build_problem(args, parser)
    try:
        tree = parse_tree(args.tree)
        validate_tree(tree, problem.primitives)
    except ValueError as err:
        parser.error(f"tree: {err}")
    leaves = inorder_leaves(tree)
    bits = express(tree, problem.primitives)
    expressed = " ".join(
        (f"X{i + 1}" if bit else f"~X{i + 1}") for i, bit in enumerate(bits)
    )
    print("leaves=" + " ".join(sym for sym, _ in leaves))
    print("negated_flags=" + "".join("1" if neg else "0" for _, neg in leaves))
    print(f"expressed={expressed}")
    print("bits=" + "".join("1" if b else "0" for b in bits))
    _print_kv(fitness=evaluate(tree, problem))
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "bisect": _cmd_bisect,
    "sweep": _cmd_sweep,
    "express": _cmd_express,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return _COMMANDS[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
