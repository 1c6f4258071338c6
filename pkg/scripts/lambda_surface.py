"""Full lambda1 x lambda2 accuracy table for ALPR on one ring dataset.

    python3 scripts/lambda_surface.py --amplitude 20 --repeats 3
"""
import argparse
from dataclasses import replace

import numpy as np

from alpr.classify import accuracy, build_model, predict_batch
from alpr.core import SolverConfig
from alpr.harness.experiment import DEFAULT_GRID
from alpr.solver import fit
from alpr.synthetic import ThreeRingSpec, generate, split


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--amplitude", type=float, default=20.0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--train-per-class", type=int, default=500)
    args = p.parse_args()
    ds = generate(ThreeRingSpec(noise_amplitude=args.amplitude))
    splits = [split(ds, args.train_per_class, s) for s in range(args.repeats)]
    print("lambda1 \\ lambda2 " + " ".join(f"{v:>8g}" for v in DEFAULT_GRID))
    for l1 in DEFAULT_GRID:
        row = []
        for l2 in DEFAULT_GRID:
            accs = []
            for s, (train, test) in enumerate(splits):
                cfg = SolverConfig(lambda1=l1, lambda2=l2, seed=s)
                model = build_model(fit(train, cfg))
                if model.n_selected == 0:
                    accs.append(np.nan)
                    continue
                accs.append(accuracy(predict_batch(model, test.features), test.labels))
            row.append(np.mean(accs))
        print(f"{l1:>17g} " + " ".join(f"{a:8.2f}" for a in row))


if __name__ == "__main__":
    main()
