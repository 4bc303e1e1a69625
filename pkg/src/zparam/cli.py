"""Command-line front end.

Subcommands: ``train`` (one seeded run), ``grid`` (learning-rate search),
``reproduce`` (the full multi-size comparison), ``small-s`` (initial-scale
study), ``gradcheck`` (analytic-vs-numeric gradient validation).  All numeric
work happens in the library modules; this file only parses flags, dispatches,
writes CSVs through the library writers, and prints a short summary.
"""

from __future__ import annotations

import argparse
import os
import sys

from .data import architecture_for, make_autoencoder_dataset
from .experiment import (
    ETA_TABLE,
    ExperimentPlan,
    cell_dir,
    default_plan,
    run_experiment,
    small_s_study,
    write_bundle,
)
from .grad import gradient_check
from .model import dump_params_csv
from .train import (
    DivergenceError,
    TrainConfig,
    default_eta_grid,
    grid_search_eta,
    train_run,
    write_run_csv,
)


def _power_of_two(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"d1 must be an integer, got {text!r}")
    if value < 4 or value & (value - 1) != 0:
        raise argparse.ArgumentTypeError(f"d1 must be a power of two >= 4, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def parse_args(argv) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="zparam",
        description="Train and compare the w- and z-parametrized autoencoders.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, workers=False):
        p.add_argument("--out", default="./results", help="output directory (default ./results)")
        p.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
        if workers:
            p.add_argument("--workers", type=_positive_int, default=1,
                           help="parallel worker processes (default 1)")

    p_train = sub.add_parser("train", help="one seeded training run")
    p_train.add_argument("--d1", type=_power_of_two, required=True)
    p_train.add_argument("--param", choices=("w", "z"), required=True)
    p_train.add_argument("--eta", type=_positive_float, required=True)
    p_train.add_argument("--epochs", type=_positive_int, default=1500)
    p_train.add_argument("--s0", type=_positive_float, default=1.0)
    p_train.add_argument("--full-batch", action="store_true",
                         help="accumulate the epoch's gradients before updating (sensitivity switch)")
    p_train.add_argument("--dump-params", metavar="PATH",
                         help="write the final parameter snapshot to this CSV")
    add_common(p_train)

    p_grid = sub.add_parser("grid", help="learning-rate grid search")
    p_grid.add_argument("--d1", type=_power_of_two, required=True)
    p_grid.add_argument("--param", choices=("w", "z"), required=True)
    p_grid.add_argument("--runs", type=_positive_int, default=20)
    p_grid.add_argument("--epochs", type=_positive_int, default=1500)
    p_grid.add_argument("--s0", type=_positive_float, default=1.0)
    p_grid.add_argument("--eta-grid", type=_float_list, default=None,
                        help="comma-separated learning rates (default: log grid over [1e-3, 1])")
    add_common(p_grid, workers=True)

    p_rep = sub.add_parser("reproduce", help="full multi-size w-vs-z comparison")
    p_rep.add_argument("--d1", type=_power_of_two, default=None,
                       help="restrict to one size (default: 8..128)")
    p_rep.add_argument("--runs", type=_positive_int, default=None,
                       help="override runs per configuration")
    p_rep.add_argument("--epochs", type=_positive_int, default=None,
                       help="override the 1500-epoch default")
    p_rep.add_argument("--eta", type=_positive_float, default=None,
                       help="accepted for symmetry; reproduce always uses the tuned per-size rates")
    add_common(p_rep, workers=True)

    p_small = sub.add_parser("small-s", help="initial-scale study at one size")
    p_small.add_argument("--d1", type=_power_of_two, default=128)
    p_small.add_argument("--s0-list", type=_float_list, default=(1.0, 0.1, 0.0001),
                         help="comma-separated initial scales (default 1.0,0.1,0.0001)")
    p_small.add_argument("--runs", type=_positive_int, default=10)
    p_small.add_argument("--epochs", type=_positive_int, default=1500)
    add_common(p_small, workers=True)

    p_check = sub.add_parser("gradcheck", help="validate analytic gradients numerically")
    p_check.add_argument("--d1", type=_power_of_two, default=8)
    p_check.add_argument("--param", choices=("w", "z"), default=None,
                         help="check one parametrization (default: both)")
    add_common(p_check)

    return parser.parse_args(argv)


def _cmd_train(args) -> int:
    arch = architecture_for(args.d1)
    dataset = make_autoencoder_dataset(args.d1)
    config = TrainConfig(arch, args.param, args.eta, args.epochs, args.seed, args.s0,
                         full_batch=args.full_batch)
    diverged_at = None
    try:
        record = train_run(config, dataset)
    except DivergenceError as exc:
        record = exc.record
        diverged_at = exc.epoch
    directory = cell_dir(args.out, args.d1, args.s0)
    os.makedirs(directory, exist_ok=True)
    path = write_run_csv(record, directory)
    if args.dump_params:
        dump_params_csv(record.final_params, args.dump_params)
    if diverged_at is not None:
        print(f"DIVERGED at epoch {diverged_at}; partial curve in {path}")
        return 1
    print(f"{args.param}-param d1={args.d1} eta={args.eta} s0={args.s0} seed={args.seed}: "
          f"final E = {record.errors[-1]:.6g} after {args.epochs} epochs")
    print(f"curve written to {path}")
    return 0


def _cmd_grid(args) -> int:
    arch = architecture_for(args.d1)
    dataset = make_autoencoder_dataset(args.d1)
    grid = args.eta_grid if args.eta_grid is not None else default_eta_grid()
    try:
        best, table = grid_search_eta(arch, args.param, grid, args.runs, args.epochs,
                                      args.s0, args.seed, dataset, workers=args.workers)
    except RuntimeError as exc:
        print(f"grid search failed: {exc}")
        return 1
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"grid_{args.param}_d{args.d1}.csv")
    with open(path, "w", newline="") as fh:
        fh.write("eta,mean_final_error\n")
        for eta, mean_err in table:
            fh.write(f"{eta!r},{format(mean_err, '.17g')}\n")
    for eta, mean_err in table:
        marker = "  <-- best" if eta == best else ""
        print(f"eta={eta:<12.6g} mean final E={mean_err:.6g}{marker}")
    print(f"best eta for {args.param}-param at d1={args.d1}: {best}")
    print(f"table written to {path}")
    return 0


def _make_plan(args) -> ExperimentPlan:
    plan = default_plan()
    d1_list = (args.d1,) if args.d1 else plan.d1_list
    if args.d1 and args.d1 not in ETA_TABLE:
        raise ValueError(f"no tuned learning rates for d1={args.d1}; choose from {sorted(ETA_TABLE)}")
    runs = {
        d1: (args.runs if args.runs else plan.runs_for(d1)) for d1 in d1_list
    }
    return ExperimentPlan(
        d1_list=d1_list,
        runs_per_config=runs,
        epochs=args.epochs if args.epochs else plan.epochs,
        eta_table={d1: ETA_TABLE[d1] for d1 in d1_list},
        s0_list=plan.s0_list,
    )


def _print_summary(bundle) -> None:
    print(f"{'d1':>4} {'s0':>8} {'max_speedup':>12} {'final_E_w':>12} {'final_E_z':>12}")
    for row in bundle.summary:
        print(f"{row.d1:>4} {row.s0:>8g} {row.max_speedup:>12.4g} "
              f"{row.final_e_w:>12.6g} {row.final_e_z:>12.6g}")
    diverged = sum(r.diverged for r in bundle.results.values())
    if diverged:
        print(f"note: {diverged} diverged run(s) excluded from the averages")


def _cmd_reproduce(args) -> int:
    if args.eta is not None:
        print("note: --eta is ignored; reproduce uses the tuned per-size learning rates")
    try:
        plan = _make_plan(args)
    except ValueError as exc:
        print(f"error: {exc}")
        return 2
    try:
        bundle = run_experiment(plan, base_seed=args.seed, workers=args.workers)
    except RuntimeError as exc:
        print(f"reproduction failed: {exc}")
        return 1
    write_bundle(bundle, args.out)
    _print_summary(bundle)
    print(f"results written under {args.out}")
    return 0


def _cmd_small_s(args) -> int:
    try:
        bundle = small_s_study(args.d1, args.s0_list, args.runs, epochs=args.epochs,
                               base_seed=args.seed, workers=args.workers)
    except RuntimeError as exc:
        print(f"small-s study failed: {exc}")
        return 1
    write_bundle(bundle, args.out)
    _print_summary(bundle)
    print(f"\n{'kind':>4} {'s0':>8} {'final avg E':>12} {'final-epoch var':>16}")
    for (d1, kind, s0), result in sorted(bundle.results.items()):
        var = f"{result.final_epoch_variance:.4g}" if result.final_epoch_variance is not None else "n/a"
        print(f"{kind:>4} {s0:>8g} {result.averaged.errors[-1]:>12.6g} {var:>16}")
    print(f"results written under {args.out}")
    return 0


def _cmd_gradcheck(args) -> int:
    arch = architecture_for(args.d1)
    kinds = (args.param,) if args.param else ("w", "z")
    ok = True
    for kind in kinds:
        constant, err = gradient_check(arch, kind, args.seed, trials=10)
        status = "OK" if err < 1e-6 else "FAIL"
        ok = ok and err < 1e-6
        print(f"{kind}-param d1={args.d1}: constant={constant:.9f} "
              f"max relative error={err:.3g} [{status}]")
    return 0 if ok else 1


_COMMANDS = {
    "train": _cmd_train,
    "grid": _cmd_grid,
    "reproduce": _cmd_reproduce,
    "small-s": _cmd_small_s,
    "gradcheck": _cmd_gradcheck,
}


def run_cli(args) -> int:
    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        target = exc.filename if exc.filename else "output"
        print(f"I/O failure on {target}: {exc.strerror or exc}")
        return 1


def main(argv=None) -> int:
    return run_cli(parse_args(argv if argv is not None else sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main())
