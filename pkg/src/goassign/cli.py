"""Command line front end.

Exit status: 0 yes/success, 1 no, 2 usage or parse error, 3 budget
exceeded.  Layer numbers are printed 1-based; the library API is 0-based.
"""

from __future__ import annotations

import argparse
import sys

from . import gadgets, kernels, optimality, solvers
from .mechanisms import BudgetError
from .model import (ParseError, parse_assignment, parse_instance,
                    serialize_assignment, serialize_instance)

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _layer_set(layers):
    return "layers: " + " ".join(str(l + 1) for l in sorted(layers))


def cmd_solve(args):
    inst = parse_instance(_read(args.file))
    res = solvers.solve(inst, strategy=args.strategy, budget=args.budget,
                        jobs=args.jobs)
    if res.answer:
        print("yes")
        sys.stdout.write(serialize_assignment(inst, res.assignment))
        print(_layer_set(res.layers))
    else:
        print("no")
    print(f"# strategy={res.strategy} examined={res.examined} "
          f"time={res.elapsed:.3f}s")
    return EXIT_YES if res.answer else EXIT_NO


def cmd_verify(args):
    inst = parse_instance(_read(args.instance))
    p = parse_assignment(inst, _read(args.assignment))
    layers = optimality.optimal_layers(inst, p)
    ok = len(layers) >= inst.alpha
    print(_layer_set(layers))
    print(f"{inst.alpha}-globally-optimal: {'yes' if ok else 'no'}")
    return EXIT_YES if ok else EXIT_NO


def cmd_explain(args):
    inst = parse_instance(_read(args.instance))
    p = parse_assignment(inst, _read(args.assignment))
    optimal = 0
    for layer in range(inst.ell):
        try:
            witness = optimality.find_layer_violation(inst, layer, p)
        except ValueError:
            offender = next(
                (a, v) for a, v in enumerate(p.alloc)
                if v >= 0 and v not in inst.layers[layer][a])
            print(f"layer {layer + 1}: illegal: "
                  f"{inst.agents[offender[0]]} {inst.items[offender[1]]}")
            continue
        if witness is None:
            optimal += 1
            print(f"layer {layer + 1}: pareto-optimal")
        else:
            print(f"layer {layer + 1}: {witness.render(inst)}")
    return EXIT_YES if optimal >= inst.alpha else EXIT_NO


def cmd_kernelize(args):
    inst = parse_instance(_read(args.file))
    if args.method == "truncate":
        out = kernels.kernel_truncate_lists(inst)
        dropped = sorted(set(inst.items) - set(out.items))
        mapping = " ".join(f"{name}:{inst.item_index(name)}->{new}"
                           for new, name in enumerate(out.items))
        print(f"# item map: {mapping}" if mapping else "# item map: (empty)")
        if dropped:
            print(f"# dropped items: {' '.join(dropped)}")
    else:
        out = kernels.kernel_agent_classes(inst)
        removed = sorted(set(inst.agents) - set(out.agents))
        if removed:
            print(f"# removed agents: {' '.join(removed)}")
    sys.stdout.write(serialize_instance(out))
    return EXIT_YES


_REDUCERS = {
    "3sat": {"three-layer", "four-layer"},
    "pclique": {"alpha", "ell-alpha"},
    "mis": {"alpha", "ell-alpha"},
}
_FROM_ALIASES = {
    "3sat": ("3sat", None),
    "pclique": ("pclique", None),
    "mis": ("mis", None),
    "pclique-alpha": ("pclique", "alpha"),
    "pclique-ell": ("pclique", "ell-alpha"),
    "mis-alpha": ("mis", "alpha"),
    "mis-ell": ("mis", "ell-alpha"),
}


def cmd_reduce(args):
    family, variant = _FROM_ALIASES[args.source]
    if args.variant is not None:
        variant = args.variant
    if variant is None:
        variant = "three-layer" if family == "3sat" else "alpha"
    if variant not in _REDUCERS[family]:
        print(f"error: variant {variant!r} not valid for {family}",
              file=sys.stderr)
        return EXIT_USAGE
    text = _read(args.file)
    if family == "3sat":
        inst = gadgets.reduce_3sat(gadgets.parse_cnf(text), variant=variant)
    elif family == "pclique":
        g = gadgets.parse_grid_graph(text)
        inst = (gadgets.reduce_permutation_clique_alpha(g)
                if variant == "alpha"
                else gadgets.reduce_permutation_clique_ell_alpha(g))
    else:
        g, k = gadgets.parse_colored_graph(text)
        inst = (gadgets.reduce_mis_alpha(g, k) if variant == "alpha"
                else gadgets.reduce_mis_ell_alpha(g, k))
    sys.stdout.write(serialize_instance(inst))
    return EXIT_YES


def cmd_generate(args):
    inst = gadgets.random_instance(
        args.seed, args.agents, args.items, args.layers, args.alpha,
        list_len=(args.min_len, args.max_len if args.max_len is not None
                  else args.items))
    sys.stdout.write(serialize_instance(inst))
    return EXIT_YES


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None,
                        help="override the search-size caps")
    common.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for the permutation sweep")
    common.add_argument("--deterministic", default=True,
                        action=argparse.BooleanOptionalAction,
                        help="report the first certificate in scan order")

    ap = argparse.ArgumentParser(
        prog="goassign",
        description="decide, verify, shrink, and generate multi-layer "
                    "pareto-optimal assignment problems")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common])
    p.add_argument("file")
    p.add_argument("--strategy", default="auto",
                   choices=["auto", "sweep", "subsets", "exhaustive"])
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("instance")
    p.add_argument("assignment")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("explain", parents=[common])
    p.add_argument("instance")
    p.add_argument("assignment")
    p.set_defaults(fn=cmd_explain)

    p = sub.add_parser("kernelize", parents=[common])
    p.add_argument("--method", required=True, choices=["truncate", "classes"])
    p.add_argument("file")
    p.set_defaults(fn=cmd_kernelize)

    p = sub.add_parser("reduce", parents=[common])
    p.add_argument("--from", dest="source", required=True,
                   choices=sorted(_FROM_ALIASES))
    p.add_argument("--variant", default=None,
                   choices=["three-layer", "four-layer", "alpha", "ell-alpha"])
    p.add_argument("file")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("generate", parents=[common])
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--min-len", type=int, default=0)
    p.add_argument("--max-len", type=int, default=None)
    p.set_defaults(fn=cmd_generate)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else EXIT_YES
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
