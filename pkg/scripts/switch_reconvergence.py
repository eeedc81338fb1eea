"""Regime-switch benchmark: error spike and recovery after a channel swap.

Streams a nonlinear tanh-saturated channel whose linear taps are swapped
mid-stream, averages instantaneous squared error across seeded replicates,
and writes ``reconvergence.csv`` (schema: ``algorithm,step,mean_sq_error_db``
with a ``# switch_at=...`` metadata row). With matplotlib installed also
writes a PNG with the switch marked.

Usage::

    python3 scripts/switch_reconvergence.py --out results/switch
    python3 scripts/switch_reconvergence.py --seeds 2 --n 400 --switch-at 200
"""

import argparse
import os
import sys

from okreg import (
    BetaKlms,
    KernelSpec,
    Klms,
    Knlms,
    OnlineGP,
    Qklms,
    default_switch_scenario,
    matched_eta,
)
from okreg.evaluation import run_reconvergence, write_reconvergence_curves


# -- experiment ------------------------------------------------------------------


def model_factories(spec):
    return {
        "gp": lambda: OnlineGP(spec, budget=300, admission_threshold=1e-6),
        "klms": lambda: Klms(spec, eta=matched_eta(spec)),
        "qklms": lambda: Qklms(spec, eta=matched_eta(spec), quant_radius=0.1),
        "knlms": lambda: Knlms(spec, eta=1.0, coherence_mu0=1.0),
        "beta:0": lambda: BetaKlms(spec, beta=0.0),
        "beta:1": lambda: BetaKlms(spec, beta=1.0),
    }


def run(args):
    spec = KernelSpec(
        lengthscale=args.lengthscale,
        signal_variance=1.0,
        noise_variance=args.noise_variance,
    )
    scenario = default_switch_scenario(
        seed=args.seed, n_total=args.n, switch_at=args.switch_at
    )
    curves, _ = run_reconvergence(
        scenario,
        model_factories(spec),
        n_seeds=args.seeds,
        smooth_window=args.smooth_window,
    )
    return scenario, curves


# -- output ----------------------------------------------------------------------


def maybe_plot(scenario, curves, path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plot", file=sys.stderr)
        return
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for c in curves:
        ax.plot(c.steps, c.mse_db, label=c.algorithm, linewidth=1.0)
    ax.axvline(scenario.switch_at, color="k", linestyle="--", alpha=0.5, label="switch")
    ax.set_xlabel("step")
    ax.set_ylabel("smoothed squared error (dB)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000, help="total stream length")
    ap.add_argument("--switch-at", type=int, default=500, help="channel swap step")
    ap.add_argument("--seeds", type=int, default=5, help="independent replicates")
    ap.add_argument("--seed", type=int, default=0, help="base scenario seed")
    ap.add_argument("--smooth-window", type=int, default=20)
    ap.add_argument("--lengthscale", type=float, default=0.7)
    ap.add_argument("--noise-variance", type=float, default=0.01)
    ap.add_argument("--out", default="results/switch", help="output directory")
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args(argv)

    scenario, curves = run(args)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "reconvergence.csv")
    write_reconvergence_curves(
        curves,
        csv_path,
        metadata={
            "switch_at": scenario.switch_at,
            "n_total": scenario.n_total,
            "seeds": args.seeds,
        },
    )
    print(f"wrote {csv_path}")
    for c in curves:
        pre = float(c.mean_sq_error[args.switch_at - 50 : args.switch_at].mean())
        post = float(c.mean_sq_error[args.switch_at : args.switch_at + 11].mean())
        print(f"  {c.algorithm:>8s}: pre-switch mse {pre:.2e}, spike {post:.2e}")
    if not args.no_plot:
        maybe_plot(scenario, curves, os.path.join(args.out, "reconvergence.png"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
