"""Command line interface: ``alpr {gen,fit,predict,eval,grid,trace}``."""
from __future__ import annotations

import argparse
import logging
import sys

from ..classify import accuracy, build_model, predict_batch
from ..core import SolverConfig
from ..solver import fit
from ..synthetic import ThreeRingSpec, generate
from .experiment import DEFAULT_GRID, METHODS, ExperimentSpec, grid_search, run_experiment, select_baseline_lambda
from .io import atomic_write, export_trace, load_csv, load_model, save_csv, save_model, write_report


def _solver_flags(p):
    d = SolverConfig()
    g = p.add_argument_group("solver")
    g.add_argument("--lambda1", type=float, default=d.lambda1)
    g.add_argument("--lambda2", type=float, default=d.lambda2)
    g.add_argument("--rho", type=float, default=d.rho)
    g.add_argument("--knn-init", type=int, default=d.knn_init)
    g.add_argument("--max-iters", type=int, default=d.max_iters)
    g.add_argument("--rel-tol", type=float, default=d.rel_tol)
    g.add_argument("--epsilon-dist", type=float, default=d.epsilon_dist)
    g.add_argument("--epsilon-row", type=float, default=d.epsilon_row)
    g.add_argument("--seed", type=int, default=d.seed)


def _config(args) -> SolverConfig:
    return SolverConfig(lambda1=args.lambda1, lambda2=args.lambda2, max_iters=args.max_iters,
                        rel_tol=args.rel_tol, knn_init=args.knn_init, epsilon_dist=args.epsilon_dist,
                        epsilon_row=args.epsilon_row, rho=args.rho, seed=args.seed)


def _experiment_flags(p):
    p.add_argument("--data", help="CSV dataset (label,f1,...,fm); omit to use synthetic rings")
    p.add_argument("--amplitude", type=float, default=20.0, help="noise amplitude of synthetic rings")
    p.add_argument("--samples-per-class", type=int, default=1000)
    p.add_argument("--train-per-class", type=int, default=500)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--baseline-lambda", type=float, default=0.1)
    p.add_argument("--report", help="write the report CSV here")
    p.add_argument("--jobs", type=int, default=1)
    _solver_flags(p)


def _spec(args) -> ExperimentSpec:
    source = args.data or ThreeRingSpec(samples_per_class=args.samples_per_class,
                                        noise_amplitude=args.amplitude, seed=args.seed)
    grid = tuple(float(v) for v in args.grid.split(",")) if getattr(args, "grid", None) else DEFAULT_GRID
    return ExperimentSpec(source=source, train_per_class=args.train_per_class, repeats=args.repeats,
                          seed=args.seed, config=_config(args),
                          methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
                          baseline_lambda=args.baseline_lambda, grid=grid,
                          holdout=getattr(args, "holdout", 0.0))


def _print_summary(report, out):
    for method, mean in report.summary().items():
        runs = report.accuracies[method]
        secs = report.fit_seconds.get(method)
        timing = f"  ({sum(secs) / len(secs):.3f} s/fit)" if secs else ""
        print(f"{method:>8s}  mean={mean:8.4f}  runs={len(runs)}{timing}", file=out)


def cmd_gen(args):
    ds = generate(ThreeRingSpec(args.samples_per_class, args.amplitude, args.radial_sigma, args.seed))
    save_csv(ds, args.out)
    print(f"wrote {ds.n_samples} samples, {ds.n_features} features to {args.out}")


def cmd_fit(args):
    ds = load_csv(args.data)
    result = fit(ds, _config(args))
    save_model(build_model(result), args.model)
    if args.trace:
        export_trace(result, args.trace)
    sel = int((result.projection.row_norms >= args.rho).sum())
    print(f"iterations={result.iterations_run} objective={result.objective_trace[-1]:.10g} "
          f"selected_features={sel}/{ds.n_features}")


def cmd_predict(args):
    model = load_model(args.model)
    ds = load_csv(args.data, class_count=int(model.train_labels.max()), check=False)
    pred = predict_batch(model, ds.features)
    if args.out:
        atomic_write(args.out, "\n".join(str(int(p)) for p in pred) + "\n")
    print(f"accuracy={accuracy(pred, ds.labels):.4f}")


def cmd_eval(args):
    spec = _spec(args)
    report = run_experiment(spec, n_jobs=args.jobs)
    _print_summary(report, sys.stdout)
    if args.report:
        write_report(report, args.report)


def cmd_grid(args):
    spec = _spec(args)
    l1, l2, report = grid_search(spec, n_jobs=args.jobs)
    print(f"lambda1={l1:g} lambda2={l2:g}")
    params = {"lambda1": l1, "lambda2": l2}
    for method in ("ridge", "relsr"):
        if method in spec.methods:
            lam = select_baseline_lambda(spec, method)
            params["baseline_lambda"] = lam
            print(f"{method} lambda={lam:g}")
    if args.report:
        final = run_experiment(spec, params=params, n_jobs=args.jobs)
        _print_summary(final, sys.stdout)
        write_report(final, args.report)
    if args.grid_report:
        write_report(report, args.grid_report)


def cmd_trace(args):
    result = fit(load_csv(args.data), _config(args))
    export_trace(result, args.out)
    print(f"wrote {len(result.objective_trace)} trace rows to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alpr", description="ALPR: sparse regression with adaptive within-class neighbor graphs")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write synthetic three-ring data as CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--amplitude", type=float, default=20.0)
    p.add_argument("--samples-per-class", type=int, default=1000)
    p.add_argument("--radial-sigma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fit", help="fit ALPR on a CSV and save the model")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--trace", help="also export the objective trace CSV")
    _solver_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="label a CSV with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="write predicted labels, one per line")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="repeated-split comparison of methods")
    _experiment_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="two-pass lambda grid search, then evaluate")
    _experiment_flags(p)
    p.add_argument("--grid", help="comma-separated candidate values for both lambdas")
    p.add_argument("--holdout", type=float, default=0.0,
                   help="fraction of each training split held out for validation (0: score on test)")
    p.add_argument("--grid-report", help="write per-cell accuracies here")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("trace", help="fit and export the per-sweep objective trace")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:
        print(f"alpr {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
