"""Command-line entry point.

Exit codes: 0 success, 1 dataset or runtime failure (or a failed check),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Callable, Sequence

from pydantic import ValidationError

from ..core.settings import get_settings
from ..core.startup import configure_logging
from ..errors import AdaSampleError, ConfigError
from ..model.logistic import ProblemConstants, estimate_constants
from ..schemas.config import TrainRequest, build_train_request, load_config_file
from ..services.bounds_service import bounds_report
from ..services.check_service import CheckService
from ..services.compare_service import CompareService
from ..services.experiment_service import ExperimentService, run_header
from ..services.markov_service import montecarlo_markov_suite

__all__ = ["main", "build_parser"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Hyperparameter grid of the published sweep.
SWEEP_P = "0.05,0.1,0.15,0.2,0.5"
SWEEP_NU = "0.05,0.1,0.15,0.2,0.5"
SWEEP_EPS = "0.001,0.005,0.01,0.02,0.05,0.1"

_REQUEST_DESTS = ("data", "synthetic", "data_seed", "n_features", "out")
_OPTIMIZER_DESTS = (
    "optimizer",
    "p",
    "nu",
    "eps",
    "beta_avg",
    "beta1",
    "beta2",
    "eps_prime",
    "init_batch",
    "max_iters",
    "max_batch",
    "seed",
    "lam",
    "fixed_lr",
    "mode",
    "milestones",
    "probe_iters",
    "eval_every",
    "p_schedule",
    "k_fallback",
    "theta",
    "full_batch",
    "adaptive_batch",
    "rho_source",
    "tolerance",
    "t_bootstrap",
)


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--data", help="LIBSVM file")
    source.add_argument("--synthetic", metavar="N,D,SEP", help="synthetic logistic problem")
    parser.add_argument("--data-seed", type=int, help="seed of the synthetic problem (default: --seed)")
    parser.add_argument("--n-features", type=int, help="widen the feature space to this many columns")


def _add_optimizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with flag values; flags override it")
    parser.add_argument("--optimizer", help="ada-sgd, ada-adam, ada-momentum, sgd-fixed, sgd-norm, sgd-inner, sgd-augmented")
    parser.add_argument("--p", type=float, help="initial test failure probability")
    parser.add_argument("--nu", type=float)
    parser.add_argument("--eps", type=float)
    parser.add_argument("--beta-avg", type=float)
    parser.add_argument("--beta1", type=float)
    parser.add_argument("--beta2", type=float)
    parser.add_argument("--eps-prime", type=float)
    parser.add_argument("--init-batch", type=int)
    parser.add_argument("--max-iters", type=int)
    parser.add_argument("--max-batch", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--lambda", dest="lam", help="regularization weight or 'auto' (1/N)")
    parser.add_argument("--fixed-lr", type=float)
    parser.add_argument("--mode", choices=["per-iteration", "per_iteration", "milestone"])
    parser.add_argument("--milestones", help="comma-separated iterations")
    parser.add_argument("--probe-iters", type=int)
    parser.add_argument("--eval-every", type=int)
    parser.add_argument("--p-schedule", choices=["geometric", "inverse-square", "inverse_square"])
    parser.add_argument("--k-fallback", type=int, help="fallback median window")
    parser.add_argument("--theta", type=float, help="baseline test threshold (default nu)")
    parser.add_argument("--full-batch", action="store_true", default=None)
    parser.add_argument("--fixed-batch", dest="adaptive_batch", action="store_false", default=None)
    parser.add_argument("--rho-source", choices=["running-average", "running_average", "exact"])
    parser.add_argument("--tolerance", type=float)
    parser.add_argument("--t-bootstrap", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adasample",
        description="Adaptive sampling and step-size SGD for regularized logistic regression.",
    )
    parser.add_argument("--log-level", help="overrides ADASAMPLE_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="run one optimizer and write its metrics CSV")
    _add_data_flags(train)
    _add_optimizer_flags(train)
    train.add_argument("--out", help="metrics CSV path")
    train.set_defaults(handler=cmd_train)

    check = commands.add_parser("check", help="compare oracles with finite differences")
    _add_data_flags(check)
    check.add_argument("--lambda", dest="lam", help="regularization weight or 'auto'")
    check.add_argument("--states", type=int)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--tolerance", type=float)
    check.add_argument("--corrupt-gradient", action="store_true", help="inject a gradient fault")
    check.set_defaults(handler=cmd_check)

    bounds = commands.add_parser("bounds", help="idealized batch sizes and linear rates")
    _add_data_flags(bounds)
    bounds.add_argument("--lambda", dest="lam", help="used with --data/--synthetic")
    bounds.add_argument("--kappa", type=float, help="sets M = kappa * m")
    bounds.add_argument("--m", type=float, default=1.0)
    bounds.add_argument("--M", dest="M_upper", type=float)
    bounds.add_argument("--gamma", type=float, default=0.0)
    bounds.add_argument("--n", type=int, default=1, help="dimension in the Hessian bound")
    bounds.add_argument("--p", type=float, default=0.1)
    bounds.add_argument("--eps", type=float, default=0.01)
    bounds.add_argument("--nu", type=float, default=0.1)
    bounds.add_argument("--delta", type=float, default=0.1)
    bounds.add_argument("--G", dest="G_bound", type=float, default=1.0)
    bounds.add_argument("--g-norm", type=float, default=1.0)
    bounds.add_argument("--iterations", type=int, default=1)
    bounds.add_argument("--seed", type=int, default=0)
    bounds.set_defaults(handler=cmd_bounds)

    compare = commands.add_parser("compare", help="paired runs of several variants")
    _add_data_flags(compare)
    _add_optimizer_flags(compare)
    compare.add_argument("--variants", nargs="*", default=None, metavar="NAME[@LR|@median]")
    compare.add_argument("--out-dir", default="compare")
    compare.set_defaults(handler=cmd_compare)

    sweep = commands.add_parser("sweep", help="grid search over p, nu and eps")
    _add_data_flags(sweep)
    _add_optimizer_flags(sweep)
    sweep.add_argument("--p-values", type=_float_list, default=_float_list(SWEEP_P))
    sweep.add_argument("--nu-values", type=_float_list, default=_float_list(SWEEP_NU))
    sweep.add_argument("--eps-values", type=_float_list, default=_float_list(SWEEP_EPS))
    sweep.add_argument("--out-dir", default="sweep")
    sweep.set_defaults(handler=cmd_sweep)

    markov = commands.add_parser("markov", help="Monte-Carlo check of the angle-test guarantee")
    markov.add_argument("--trials", type=int, default=10_000)
    markov.add_argument("--p", type=float, default=0.1)
    markov.add_argument("--nu", type=float, default=0.1)
    markov.add_argument("--seed", type=int, default=0)
    markov.set_defaults(handler=cmd_markov)
    return parser


def _train_request(args: argparse.Namespace) -> TrainRequest:
    settings = get_settings()
    file_values: dict[str, Any] = {"eval_every": settings.eval_every}
    if args.config:
        file_values.update(load_config_file(args.config))
    overrides = {dest: getattr(args, dest, None) for dest in (*_REQUEST_DESTS, *_OPTIMIZER_DESTS)}
    return build_train_request(file_values, overrides)


def _parse_lambda(text: str | None) -> float | None:
    if text is None or text.strip().lower() == "auto":
        return None
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"--lambda must be a number or 'auto', got {text!r}") from exc


def _standalone_dataset(args: argparse.Namespace, default_synthetic: str | None):
    service = ExperimentService()
    synthetic = args.synthetic or (None if args.data else default_synthetic)
    if args.data is None and synthetic is None:
        return None
    seed = args.data_seed if args.data_seed is not None else args.seed
    request = TrainRequest(
        data=args.data, synthetic=synthetic, data_seed=seed, n_features=args.n_features
    )
    return service.load_dataset(request)


def cmd_train(args: argparse.Namespace) -> int:
    request = _train_request(args)
    service = ExperimentService()
    data = service.load_dataset(request)
    result = service.train(request, data)
    print(result.header)
    log = result.log
    print(
        f"final_loss={log.final_loss:.17g} iterations={log.iterations} status={log.status} "
        f"gamma={log.gamma:.6g}"
    )
    if result.csv_path is not None:
        print(f"metrics={result.csv_path}")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    data = _standalone_dataset(args, "1000,10,2.0")
    report = CheckService().run(
        data,
        lam=_parse_lambda(args.lam),
        states=args.states,
        seed=args.seed,
        tolerance=args.tolerance,
        corrupt_gradient=args.corrupt_gradient,
    )
    print(f"max_grad_rel_error={report.grad_error:.3e}")
    print(f"max_hvp_rel_error={report.hvp_error:.3e}")
    print(f"states={report.states} tolerance={report.tolerance:g} {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_bounds(args: argparse.Namespace) -> int:
    data = _standalone_dataset(args, None)
    if data is not None:
        lam = _parse_lambda(args.lam)
        constants = estimate_constants(data, 1.0 / data.n_samples if lam is None else lam)
        constants = constants.with_gamma(args.gamma)
    else:
        if args.kappa is not None and args.M_upper is not None:
            raise ConfigError("give either --kappa or --M, not both")
        M_upper = args.M_upper if args.M_upper is not None else (args.kappa or 1.0) * args.m
        try:
            constants = ProblemConstants(args.m, M_upper, M_upper, args.gamma)
        except AdaSampleError as exc:
            raise ConfigError(str(exc)) from exc
    report = bounds_report(
        constants,
        n=args.n,
        p=args.p,
        eps=args.eps,
        nu=args.nu,
        delta=args.delta,
        G_bound=args.G_bound,
        g_norm=args.g_norm,
        iterations=args.iterations,
    )
    for line in report.lines():
        print(line)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    if not args.variants:
        raise ConfigError("compare needs at least one --variants entry")
    request = _train_request(args)
    service = ExperimentService()
    data = service.load_dataset(request)
    print(run_header(request.optimizer, data, _lambda_of(request, data)))
    rows = CompareService().compare(request.optimizer, data, args.variants, args.out_dir)
    _print_summary(rows)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    request = _train_request(args)
    service = ExperimentService()
    data = service.load_dataset(request)
    print(run_header(request.optimizer, data, _lambda_of(request, data)))
    rows = CompareService().sweep(
        request.optimizer,
        data,
        args.out_dir,
        p_values=args.p_values,
        nu_values=args.nu_values,
        eps_values=args.eps_values,
    )
    _print_summary(rows)
    return EXIT_OK


def cmd_markov(args: argparse.Namespace) -> int:
    report = montecarlo_markov_suite(args.trials, args.p, args.nu, args.seed)
    print(
        f"batch_size={report.batch_size} expected_sin2={report.expected_sin2:.3e} "
        f"frequency={report.frequency:.4f} bound={report.bound:.4f} "
        f"{'PASS' if report.passed else 'FAIL'}"
    )
    return EXIT_OK if report.passed else EXIT_FAILURE


def _lambda_of(request: TrainRequest, data) -> float:
    lam = request.optimizer.lam
    return 1.0 / data.n_samples if lam is None else lam


def _print_summary(rows) -> None:
    print("name,final_loss,total_samples,median_step,iterations,status")
    for row in rows:
        print(
            f"{row.name},{row.final_loss:.10g},{row.total_samples},"
            f"{row.median_step:.6g},{row.iterations},{row.status}"
        )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.log_level)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (ConfigError, ValidationError) as exc:
        print(f"adasample: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AdaSampleError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"adasample: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
