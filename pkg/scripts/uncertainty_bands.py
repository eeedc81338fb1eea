"""Uncertainty bands: how the three variance rules respond to data.

Fits growing prefixes of a 1-D stream and traces the predictive standard
deviation of the exact GP posterior against the two closed-form bands
(beta 0: frozen at the prior; beta 1: inflating with coverage). Writes
``uncertainty.csv`` (schema: ``algorithm,prefix,x,mean,std``) and, when
matplotlib is importable, a band plot per prefix.

Usage::

    python3 scripts/uncertainty_bands.py --out results/uncertainty
    python3 scripts/uncertainty_bands.py --prefixes 5,15,40 --n 40
"""

import argparse
import os
import sys

import numpy as np

from okreg import KernelSpec, gen_kinematics_like
from okreg.evaluation import run_uncertainty_trace, write_uncertainty_traces


# -- experiment ------------------------------------------------------------------


def run(args):
    train, _ = gen_kinematics_like(args.seed, args.n, 1, d=1)
    spec = KernelSpec(
        lengthscale=args.lengthscale,
        signal_variance=1.0,
        noise_variance=args.noise_variance,
    )
    grid = np.linspace(args.grid_lo, args.grid_hi, args.grid_size)
    prefixes = tuple(int(p) for p in args.prefixes.split(","))
    traces = run_uncertainty_trace(train, spec, grid, prefix_sizes=prefixes)
    return train, spec, prefixes, traces


# -- output ----------------------------------------------------------------------


def maybe_plot(train, spec, prefixes, traces, path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plot", file=sys.stderr)
        return
    by_key = {(t.algorithm, t.prefix): t for t in traces}
    prior = float(np.sqrt(spec.noise_variance + spec.signal_variance))
    fig, axes = plt.subplots(
        1, len(prefixes), figsize=(4.0 * len(prefixes), 3.6), sharey=True
    )
    axes = np.atleast_1d(axes)
    for ax, m in zip(axes, prefixes):
        gp = by_key[("gp", m)]
        b1 = by_key[("beta:1", m)]
        ax.plot(gp.grid, gp.mean, "k-", linewidth=1.0, label="shared mean")
        ax.fill_between(
            gp.grid, gp.mean - gp.std, gp.mean + gp.std, alpha=0.35, label="gp band"
        )
        ax.plot(b1.grid, b1.mean + b1.std, "r--", linewidth=0.9, label="beta:1 band")
        ax.plot(b1.grid, b1.mean - b1.std, "r--", linewidth=0.9)
        ax.axhline(prior, color="gray", linestyle=":", linewidth=0.9, label="prior std")
        ax.plot(
            train.inputs[:m, 0], train.targets[:m], "k.", markersize=4, label="data"
        )
        ax.set_title(f"prefix {m}")
        ax.set_xlabel("x")
    axes[0].set_ylabel("prediction")
    axes[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=25, help="observations to draw")
    ap.add_argument("--prefixes", default="3,8,25", help="comma-separated prefix sizes")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid-size", type=int, default=101)
    ap.add_argument("--grid-lo", type=float, default=-1.2)
    ap.add_argument("--grid-hi", type=float, default=1.2)
    ap.add_argument("--lengthscale", type=float, default=0.3)
    ap.add_argument("--noise-variance", type=float, default=0.1)
    ap.add_argument("--out", default="results/uncertainty", help="output directory")
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args(argv)

    train, spec, prefixes, traces = run(args)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "uncertainty.csv")
    write_uncertainty_traces(traces, csv_path)
    print(f"wrote {csv_path}")
    for t in traces:
        print(
            f"  {t.algorithm:>6s} prefix {t.prefix:>3d}: "
            f"std range [{float(t.std.min()):.3f}, {float(t.std.max()):.3f}]"
        )
    if not args.no_plot:
        maybe_plot(train, spec, prefixes, traces, os.path.join(args.out, "uncertainty.png"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
