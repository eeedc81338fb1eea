"""Stationary benchmark: NMSE learning curves for every algorithm.

Streams a synthetic kinematics-style regression problem through the exact
online GP, the KRLS weight view, and the whole gradient family, evaluating
test-set NMSE as the models grow. Writes ``learning_curve.csv`` (schema:
``algorithm,step,nmse_db``) and, when matplotlib is importable, a PNG of
the curves.

Usage::

    python3 scripts/stationary_benchmark.py --out results/stationary
    python3 scripts/stationary_benchmark.py --n 500 --seeds 1 --no-plot
"""

import argparse
import os
import sys

import numpy as np

from okreg import (
    BetaKlms,
    KernelSpec,
    Klms,
    Knlms,
    OnlineGP,
    Qklms,
    gen_kinematics_like,
    matched_eta,
)
from okreg.evaluation import LearningCurve, run_online_experiment, write_learning_curves


# -- experiment ------------------------------------------------------------------


def model_factories(spec):
    return {
        "gp": lambda: OnlineGP(spec),
        "klms": lambda: Klms(spec, eta=matched_eta(spec)),
        "qklms": lambda: Qklms(spec, eta=matched_eta(spec), quant_radius=0.1),
        "knlms": lambda: Knlms(spec),
        "beta:0": lambda: BetaKlms(spec, beta=0.0),
        "beta:0.5": lambda: BetaKlms(spec, beta=0.5),
        "beta:1": lambda: BetaKlms(spec, beta=1.0),
    }


def run(args):
    spec = KernelSpec(
        lengthscale=args.lengthscale,
        signal_variance=1.0,
        noise_variance=args.noise_variance,
    )
    per_alg = {name: [] for name in model_factories(spec)}
    steps = None
    for seed in range(args.seeds):
        train, test = gen_kinematics_like(seed, args.n, args.n_test, d=args.dim)
        for name, make in model_factories(spec).items():
            curve = run_online_experiment(
                make(), train, test, args.eval_every, label=name
            )
            per_alg[name].append(curve)
            steps = curve.steps
    # average across seeds in linear mse space, then back to dB
    curves = []
    for name, runs in sorted(per_alg.items()):
        linear = np.mean([10.0 ** (c.values / 10.0) for c in runs], axis=0)
        db = 10.0 * np.log10(linear)
        curves.append(LearningCurve(name, [(int(s), float(v)) for s, v in zip(steps, db)]))
    return curves


# -- output ----------------------------------------------------------------------


def maybe_plot(curves, path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plot", file=sys.stderr)
        return
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for c in curves:
        ax.plot(c.steps, c.values, marker=".", label=c.algorithm)
    ax.set_xlabel("training step")
    ax.set_ylabel("test NMSE (dB)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000, help="training steps")
    ap.add_argument("--n-test", type=int, default=1000, help="test points")
    ap.add_argument("--dim", type=int, default=4, help="input dimension")
    ap.add_argument("--seeds", type=int, default=3, help="independent streams")
    ap.add_argument("--eval-every", type=int, default=50)
    ap.add_argument("--lengthscale", type=float, default=0.4)
    ap.add_argument("--noise-variance", type=float, default=0.1)
    ap.add_argument("--out", default="results/stationary", help="output directory")
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args(argv)

    curves = run(args)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "learning_curve.csv")
    write_learning_curves(curves, csv_path)
    print(f"wrote {csv_path}")
    for c in curves:
        print(f"  {c.algorithm:>8s}: final NMSE {c.final:+.2f} dB")
    if not args.no_plot:
        maybe_plot(curves, os.path.join(args.out, "learning_curve.png"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
