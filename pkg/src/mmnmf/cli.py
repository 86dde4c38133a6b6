"""Command-line entry point ``nmf``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 monotonicity violation
(``verify`` also exits 3 when any check fails).
"""

import argparse
import json
import logging
import sys

from ._matrix import DomainError, ShapeError
from . import probes
from .costs import CostKind
from .io import load_csv, save_csv
from .solver import DataError, MonotonicityError, NonFiniteCostError, SolverConfig, solve
from .updates import Factorization, perturbed_numerator
from .verify import run_verify_suite

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MONOTONE = 0, 1, 2, 3

log = logging.getLogger("mmnmf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def build_parser():
    p = _Parser(prog="nmf", description="Multiplicative-update NMF and its verification harness.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("factorize", help="factorize a CSV matrix V ~ W H")
    f.add_argument("--input", required=True)
    f.add_argument("--header", action="store_true", help="skip one header line in the input")
    f.add_argument("--rank", required=True, type=int)
    f.add_argument("--cost", required=True, choices=[k.value for k in CostKind])
    f.add_argument("--max-iters", type=int, default=200)
    f.add_argument("--tol", type=_positive_float, default=1e-6)
    f.add_argument("--eps", type=_positive_float, default=1e-12)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--order", choices=["hw", "wh"], default="hw")
    f.add_argument("--init-w")
    f.add_argument("--init-h")
    f.add_argument("--out-w", required=True)
    f.add_argument("--out-h", required=True)
    f.add_argument("--trace")

    ver = sub.add_parser("verify", help="run the numerical self-check battery")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--report")
    ver.add_argument("--perturb-numerator", type=float, default=None, help=argparse.SUPPRESS)

    land = sub.add_parser("landscape", help="tabulate KL and generalized KL along h")
    land.add_argument("--v", required=True, type=_positive_float)
    land.add_argument("--w", required=True, type=_positive_float)
    land.add_argument("--h-min", required=True, type=_positive_float)
    land.add_argument("--h-max", required=True, type=_positive_float)
    land.add_argument("--steps", required=True, type=int)
    land.add_argument("--out", required=True)

    ce = sub.add_parser("counterexamples", help="print the non-convexity counterexamples as JSON lines")
    ce.add_argument("--v", type=_positive_float, default=1.0)
    ce.add_argument("--r", type=int, default=3)
    return p


def cmd_factorize(args):
    if (args.init_w is None) != (args.init_h is None):
        raise UsageError("--init-w and --init-h must be given together")
    try:
        config = SolverConfig(
            rank=args.rank,
            cost=args.cost,
            max_iters=args.max_iters,
            rel_tol=args.tol,
            eps=args.eps,
            seed=args.seed,
            init="provided" if args.init_w else "uniform",
            order=args.order,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    v = load_csv(args.input, header=args.header)
    initial = None
    if args.init_w:
        initial = Factorization(load_csv(args.init_w), load_csv(args.init_h))
    result = solve(v, config, initial)
    save_csv(result.factorization.w, args.out_w)
    save_csv(result.factorization.h, args.out_h)
    if args.trace:
        with open(args.trace, "w") as fh:
            json.dump([t.to_dict() for t in result.trace], fh, indent=1)
    log.info("cost %.6g after %d iterations (converged=%s)", result.final_cost, result.iters_used, result.converged)
    return EXIT_OK


def cmd_verify(args):
    if args.perturb_numerator is not None:
        with perturbed_numerator(args.perturb_numerator):
            report = run_verify_suite(args.seed, args.report)
    else:
        report = run_verify_suite(args.seed, args.report)
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: max_error={c.max_error:.3g} tol={c.tolerance:.3g} {c.detail}".rstrip())
    print(f"{len(report.checks) - len(report.failed())}/{len(report.checks)} checks passed")
    return EXIT_OK if report.passed else EXIT_MONOTONE


def cmd_landscape(args):
    try:
        grid = probes.linear_grid(args.h_min, args.h_max, args.steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    probes.landscape_sample(args.v, args.w, grid).write_csv(args.out)
    return EXIT_OK


def cmd_counterexamples(args):
    if args.r < 1:
        raise UsageError(f"--r must be >= 1, got {args.r}")
    reports = {
        "euclid_scalar": probes.euclid_scalar_counterexample(args.v),
        "euclid_vector": probes.euclid_vector_counterexample(args.v, args.r),
        "kl_scalar": probes.kl_scalar_counterexample(args.v),
        "kl_vector": probes.kl_vector_counterexample(args.v, args.r),
    }
    for name, rep in reports.items():
        print(json.dumps({"name": name, **rep.to_dict()}))
    return EXIT_OK


COMMANDS = {
    "factorize": cmd_factorize,
    "verify": cmd_verify,
    "landscape": cmd_landscape,
    "counterexamples": cmd_counterexamples,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"nmf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MonotonicityError as exc:
        print(f"nmf: monotonicity violation: {exc}", file=sys.stderr)
        return EXIT_MONOTONE
    except (DataError, DomainError, ShapeError, NonFiniteCostError, OSError) as exc:
        print(f"nmf: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
