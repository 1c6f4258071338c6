"""Mean test accuracy of ALPR, ridge, ReLSR and 1-NN on the Th1/Th2 rings.

ALPR lambdas come from the two-pass grid search; ridge/ReLSR lambdas from a
one-dimensional sweep over the same grid.

    python3 scripts/ring_table.py --repeats 5 --out-dir runs/
"""
import argparse
import time
from dataclasses import replace
from pathlib import Path

from alpr.harness import ExperimentSpec, grid_search, run_experiment, select_baseline_lambda, write_report
from alpr.synthetic import TH1, TH2, generate


def run(name, source, args):
    ds = generate(source)
    spec = ExperimentSpec(source, args.train_per_class, repeats=args.repeats, seed=args.seed,
                          holdout=args.holdout)
    t0 = time.perf_counter()
    l1, l2, cells = grid_search(spec, ds, n_jobs=args.jobs)
    means, params = {}, {}
    for method in ("ridge", "relsr"):
        lam = select_baseline_lambda(spec, method, ds)
        rep = run_experiment(replace(spec, methods=(method,)), ds, params={"baseline_lambda": lam}, n_jobs=args.jobs)
        means[method], params[method] = rep.mean(method), f"lambda={lam:g}"
    rep = run_experiment(replace(spec, methods=("alpr", "nc")), ds, params={"lambda1": l1, "lambda2": l2},
                         n_jobs=args.jobs)
    means.update(rep.summary())
    params["alpr"] = f"lambda1={l1:g} lambda2={l2:g}"
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_report(rep, out / f"{name}_report.csv")
        write_report(cells, out / f"{name}_grid.csv")
    print(f"{name}  ({time.perf_counter() - t0:.1f} s)")
    for method in ("ridge", "relsr", "nc", "alpr"):
        print(f"  {method:>6s}  {means[method]:7.2f}  {params.get(method, '')}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--train-per-class", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--holdout", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir")
    args = p.parse_args()
    run("Th1", TH1, args)
    run("Th2", TH2, args)


if __name__ == "__main__":
    main()
