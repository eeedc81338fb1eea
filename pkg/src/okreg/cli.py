"""Command-line benchmark harness.

Subcommands:

* ``compare``      stationary learning curves for a set of algorithms
* ``reconverge``   channel-switch robustness curves
* ``uncertainty``  predictive bands over a 1-D grid for growing prefixes
* ``verify``       consistency checks between paired formulations

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 I/O error, 4 numerical error.

Every flag can also come from a ``--config`` file of ``key=value``
lines (keys are the flag names without the leading dashes); explicit
flags override the file.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .base import ConfigError, CsvFormatError, NumericalError
from .datasets import (
    RegressionSet,
    default_switch_scenario,
    gen_kinematics_like,
    load_csv,
    standardize_inputs,
)
from .evaluation import (
    LearningCurve,
    run_online_experiment,
    run_reconvergence,
    run_uncertainty_trace,
    write_learning_curves,
    write_reconvergence_curves,
    write_uncertainty_traces,
)
from .kernels import KernelSpec
from .klms import BetaKlms, Klms, Knlms, Qklms, matched_eta
from .online_gp import OnlineGP
from .snapshot import save_state
from .verify import format_results, run_all_checks

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

_BOOL_FLAGS = {"--dump-state", "--header", "--standardize"}


# -- config-file merging ------------------------------------------------


def _config_flags(path: str) -> list[str]:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    flags: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            flag = "--" + key.strip().replace("_", "-")
            value = value.strip()
            if flag in _BOOL_FLAGS:
                if value.lower() in ("1", "true", "yes", "on"):
                    flags.append(flag)
                elif value.lower() in ("0", "false", "no", "off"):
                    pass
                else:
                    raise ConfigError(
                        f"{path}:{lineno}: boolean flag {flag} got {value!r}"
                    )
            else:
                flags.extend([flag, value])
    return flags


def _merge_config(argv: list[str]) -> list[str]:
    """Expand --config FILE into flags placed before the explicit ones."""
    if not argv:
        return argv
    cmd, rest = argv[0], argv[1:]
    path = None
    cleaned: list[str] = []
    i = 0
    while i < len(rest):
        a = rest[i]
        if a == "--config":
            if i + 1 >= len(rest):
                raise ConfigError("--config needs a path")
            path = rest[i + 1]
            i += 2
            continue
        if a.startswith("--config="):
            path = a.split("=", 1)[1]
            i += 1
            continue
        cleaned.append(a)
        i += 1
    if path is None:
        return argv
    return [cmd] + _config_flags(path) + cleaned


# -- model construction ---------------------------------------------------


def _build_spec(args) -> KernelSpec:
    try:
        return KernelSpec(
            lengthscale=args.kernel_lengthscale,
            signal_variance=args.kernel_variance,
            noise_variance=args.noise_var,
            jitter=args.jitter,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_eta(value, spec: KernelSpec, default):
    v = default if value is None else value
    if isinstance(v, str):
        if v == "matched":
            return matched_eta(spec)
        try:
            return float(v)
        except ValueError:
            raise ConfigError(f"--eta must be a number or 'matched', got {v!r}") from None
    return float(v)


def _build_model(token: str, spec: KernelSpec, args):
    name, _, param = token.partition(":")
    name = name.strip()
    param = param.strip()
    try:
        if name == "gp":
            if param:
                raise ConfigError(f"gp takes no parameter, got {token!r}")
            return OnlineGP(
                spec,
                budget=args.budget,
                admission_threshold=args.admission_threshold,
            )
        if name == "klms":
            return Klms(spec, eta=_resolve_eta(args.eta, spec, "matched"))
        if name == "qklms":
            return Qklms(
                spec,
                eta=_resolve_eta(args.eta, spec, "matched"),
                quant_radius=args.quant_radius,
            )
        if name == "knlms":
            eps = args.eps_reg if args.eps_reg is not None else spec.noise_variance
            return Knlms(
                spec,
                eta=_resolve_eta(args.eta, spec, 1.0),
                eps_reg=eps,
                coherence_mu0=args.coherence_mu0,
            )
        if name == "beta":
            try:
                b = float(param) if param else args.beta
            except ValueError:
                raise ConfigError(f"bad beta value in {token!r}") from None
            return BetaKlms(spec, beta=b)
    except ValueError as exc:
        raise ConfigError(f"{token!r}: {exc}") from exc
    raise ConfigError(f"unknown algorithm: {token!r}")


def _parse_tokens(algs: str) -> list[str]:
    tokens = [t.strip() for t in algs.split(",") if t.strip()]
    if not tokens:
        raise ConfigError("--algs must name at least one algorithm")
    if len(set(tokens)) != len(tokens):
        raise ConfigError("--algs contains duplicates")
    return tokens


def _state_path(out: Path, token: str) -> Path:
    return out / f"state_{token.replace(':', '-')}.txt"


# -- data sourcing --------------------------------------------------------


def _load_csv_checked(args, d: int) -> RegressionSet:
    if not os.path.exists(args.csv):
        raise ConfigError(f"csv file not found: {args.csv}")
    data = load_csv(args.csv, d, header=args.header)
    if args.standardize:
        data = standardize_inputs(data)
    return data


def _compare_data(args, seed: int):
    n = args.n
    n_test = args.n_test if args.n_test is not None else n
    if args.csv is not None:
        if args.dim is None:
            raise ConfigError("--csv requires --dim")
        data = _load_csv_checked(args, args.dim)
        if len(data) < n + n_test:
            raise ConfigError(
                f"csv has {len(data)} usable rows, need {n + n_test}"
            )
        perm = np.random.default_rng([seed, 3]).permutation(len(data))
        train = RegressionSet(
            data.inputs[perm[:n]], data.targets[perm[:n]], name=data.name, seed=seed
        )
        test = RegressionSet(
            data.inputs[perm[n : n + n_test]],
            data.targets[perm[n : n + n_test]],
            name=data.name,
            seed=seed,
        )
        return train, test
    d = args.dim if args.dim is not None else 4
    return gen_kinematics_like(seed, n, n_test, d=d)


# -- subcommands ------------------------------------------------------------


def cmd_compare(args) -> int:
    spec = _build_spec(args)
    tokens = _parse_tokens(args.algs)
    if args.seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    linear: dict[str, np.ndarray] = {}
    steps: dict[str, np.ndarray] = {}
    final_models: dict = {}
    for seed in range(args.seeds):
        train, test = _compare_data(args, seed)
        for tok in tokens:
            model = _build_model(tok, spec, args)
            curve = run_online_experiment(
                model, train, test, args.eval_every, label=tok
            )
            lin = 10.0 ** (curve.values / 10.0)
            if tok not in linear:
                linear[tok] = lin
                steps[tok] = curve.steps
            else:
                linear[tok] += lin
            if seed == args.seeds - 1:
                final_models[tok] = model
    curves = []
    with np.errstate(divide="ignore"):
        for tok in tokens:
            db = 10.0 * np.log10(linear[tok] / args.seeds)
            curves.append(
                LearningCurve(tok, list(zip(steps[tok].tolist(), db.tolist())))
            )
    csv_path = out / "learning_curve.csv"
    write_learning_curves(curves, csv_path)
    if args.dump_state:
        for tok, model in final_models.items():
            save_state(model, _state_path(out, tok))
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_reconverge(args) -> int:
    spec = _build_spec(args)
    tokens = _parse_tokens(args.algs)
    try:
        scenario = default_switch_scenario(
            seed=0,
            n_total=args.n,
            switch_at=args.switch_at,
            channel_len=args.channel_len,
            noise_std=args.noise_std,
            embedding_dim=args.embedding_dim,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    factories = {tok: (lambda tok=tok: _build_model(tok, spec, args)) for tok in tokens}
    curves, last_models = run_reconvergence(
        scenario, factories, n_seeds=args.seeds, smooth_window=args.smooth_window
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "reconvergence.csv"
    write_reconvergence_curves(
        curves,
        csv_path,
        metadata={
            "switch_at": scenario.switch_at,
            "n_total": scenario.n_total,
            "seeds": args.seeds,
            "smooth_window": args.smooth_window,
            "noise_std": scenario.noise_std,
            "embedding_dim": scenario.embedding_dim,
            "channel_len": args.channel_len,
        },
    )
    if args.dump_state:
        for tok, model in last_models.items():
            save_state(model, _state_path(out, tok))
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_uncertainty(args) -> int:
    spec = _build_spec(args)
    if args.csv is not None:
        data = _load_csv_checked(args, 1)
    else:
        data, _ = gen_kinematics_like(0, args.n, 1, d=1)
    try:
        prefixes = tuple(int(p) for p in args.prefixes.split(",") if p.strip())
    except ValueError:
        raise ConfigError("--prefixes must be comma-separated integers") from None
    if not prefixes:
        raise ConfigError("--prefixes must name at least one prefix size")
    if args.grid_size < 2 or args.grid_max <= args.grid_min:
        raise ConfigError("grid must span a positive range with >= 2 points")
    grid = np.linspace(args.grid_min, args.grid_max, args.grid_size)
    traces = run_uncertainty_trace(data, spec, grid, prefixes)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "uncertainty.csv"
    write_uncertainty_traces(traces, csv_path)
    if args.dump_state:
        m = max(prefixes)
        gp = OnlineGP(spec, admission_threshold=1e-12)
        b0 = BetaKlms(spec, 0.0)
        b1 = BetaKlms(spec, 1.0)
        for i in range(m):
            for model in (gp, b0, b1):
                model.update(data.inputs[i], data.targets[i])
        save_state(gp, _state_path(out, "gp"))
        save_state(b0, _state_path(out, "beta:0"))
        save_state(b1, _state_path(out, "beta:1"))
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_all_checks(
        seed=args.seed, tol=args.tol, noise_mismatch=args.inject_noise_mismatch
    )
    print(format_results(results))
    if all(r.passed for r in results):
        return EXIT_OK
    return EXIT_VERIFY


# -- parser ----------------------------------------------------------------


def _kernel_parent(lengthscale: float, noise_var: float) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("kernel")
    g.add_argument("--kernel-lengthscale", type=float, default=lengthscale,
                   help=f"Gaussian kernel lengthscale (default {lengthscale})")
    g.add_argument("--kernel-variance", type=float, default=1.0,
                   help="kernel signal variance (default 1.0)")
    g.add_argument("--noise-var", type=float, default=noise_var,
                   help=f"observation-noise variance (default {noise_var})")
    g.add_argument("--jitter", type=float, default=None,
                   help="Gram diagonal jitter (default 1e-10 * signal variance)")
    return p


def _common_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", default="okreg-out", help="output directory")
    p.add_argument("--dump-state", action="store_true",
                   help="also write model state snapshots into --out")
    p.add_argument("--config", default=None,
                   help="key=value file of flag defaults; explicit flags override")
    return p


def _alg_parent(default_algs: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("algorithms")
    g.add_argument("--algs", default=default_algs,
                   help="comma list from: gp, klms, qklms, knlms, beta:<value> "
                        f"(default {default_algs!r})")
    g.add_argument("--eta", default=None,
                   help="learning rate, or 'matched' for 1/(noise+signal variance); "
                        "defaults: klms/qklms matched, knlms 1.0")
    g.add_argument("--beta", type=float, default=1.0,
                   help="beta for bare 'beta' tokens (default 1.0)")
    g.add_argument("--eps-reg", type=float, default=None,
                   help="knlms regularizer (default: the noise variance)")
    g.add_argument("--quant-radius", type=float, default=0.0,
                   help="qklms quantization radius (default 0.0)")
    g.add_argument("--coherence-mu0", type=float, default=1.0,
                   help="knlms admission threshold as a fraction of the signal "
                        "variance; 1.0 admits everything (default 1.0)")
    g.add_argument("--budget", type=int, default=None,
                   help="gp dictionary budget; oldest centers are evicted")
    g.add_argument("--admission-threshold", type=float, default=1e-8,
                   help="gp novelty gate on gamma2 (default 1e-8)")
    return p


def _csv_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("data")
    g.add_argument("--csv", default=None, help="read observations from a CSV file")
    g.add_argument("--header", action="store_true", help="skip the first CSV row")
    g.add_argument("--standardize", action="store_true",
                   help="standardize input columns to zero mean, unit std")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="okreg",
        description="Online kernel regression benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "compare",
        help="stationary learning curves on shared data",
        parents=[_common_parent(), _kernel_parent(0.4, 0.1), _alg_parent(
            "gp,beta:0,beta:1,klms,knlms"), _csv_parent()],
    )
    p.add_argument("--gen", choices=["kin-like"], default="kin-like",
                   help="synthetic generator when --csv is not given")
    p.add_argument("--dim", type=int, default=None,
                   help="input dimension (default 4 for the generator; required with --csv)")
    p.add_argument("--n", type=int, default=1000, help="training-stream length")
    p.add_argument("--n-test", type=int, default=None,
                   help="test-set size (default: same as --n)")
    p.add_argument("--seeds", type=int, default=1,
                   help="number of replicate datasets to average over")
    p.add_argument("--eval-every", type=int, default=50,
                   help="steps between test-set evaluations")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser(
        "reconverge",
        help="channel-switch robustness curves",
        parents=[_common_parent(), _kernel_parent(0.7, 0.01),
                 _alg_parent("klms,qklms,knlms,beta:0,beta:1")],
    )
    p.add_argument("--n", type=int, default=1000, help="series length")
    p.add_argument("--switch-at", type=int, default=500,
                   help="step at which the channel switches")
    p.add_argument("--seeds", type=int, default=5, help="replicates to average")
    p.add_argument("--smooth-window", type=int, default=20,
                   help="trailing window for the dB curves")
    p.add_argument("--noise-std", type=float, default=0.01,
                   help="observation noise std of the series")
    p.add_argument("--embedding-dim", type=int, default=4,
                   help="number of past outputs used as the input vector")
    p.add_argument("--channel-len", type=int, default=4, help="FIR channel length")
    p.set_defaults(func=cmd_reconverge)

    p = sub.add_parser(
        "uncertainty",
        help="predictive bands on a 1-D grid for growing prefixes",
        parents=[_common_parent(), _kernel_parent(0.3, 0.1), _csv_parent()],
    )
    p.add_argument("--gen", choices=["kin-like"], default="kin-like",
                   help="synthetic generator when --csv is not given")
    p.add_argument("--n", type=int, default=25, help="number of observations")
    p.add_argument("--prefixes", default="3,8,25",
                   help="comma list of prefix sizes (default 3,8,25)")
    p.add_argument("--grid-size", type=int, default=101)
    p.add_argument("--grid-min", type=float, default=-1.2)
    p.add_argument("--grid-max", type=float, default=1.2)
    p.set_defaults(func=cmd_uncertainty)

    p = sub.add_parser(
        "verify",
        help="consistency checks between paired formulations",
        parents=[_common_parent()],
    )
    p.add_argument("--tol", type=float, default=None,
                   help="override every check's tolerance")
    p.add_argument("--seed", type=int, default=0, help="rng seed for the checks")
    p.add_argument("--inject-noise-mismatch", type=float, default=1.0,
                   help="negative control: rescales one side of the knlms/beta "
                        "pairing; any value other than 1.0 must fail")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        argv = _merge_config(argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CsvFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except np.linalg.LinAlgError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
