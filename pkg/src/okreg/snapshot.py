"""Flat text snapshots of model state.

Layout: a ``# okreg-state v1`` banner, ``key=value`` scalar lines
(kernel spec first, then model parameters), then array blocks opened by
``[name]`` with one comma-separated row per line.  Floats are written
with repr(), which round-trips exactly, so load(dump(model)) reproduces
every array bit for bit.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .kernels import Dictionary, KernelFamily, KernelSpec
from .klms import BetaKlms, Klms, KlmsModel, Knlms, Qklms
from .online_gp import OnlineGP

__all__ = ["dump_state", "load_state", "save_state", "load_state_file", "fingerprint"]

_BANNER = "# okreg-state v1"


def _f(v) -> str:
    return repr(float(v))


def _scalar_lines(spec: KernelSpec) -> list[str]:
    return [
        f"family={spec.family.value}",
        f"lengthscale={_f(spec.lengthscale)}",
        f"signal_variance={_f(spec.signal_variance)}",
        f"noise_variance={_f(spec.noise_variance)}",
        f"jitter={_f(spec.jitter)}",
    ]


def _matrix_block(name: str, arr: np.ndarray) -> list[str]:
    lines = [f"[{name}]"]
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    for row in arr:
        lines.append(",".join(_f(v) for v in row))
    return lines


def _vector_block(name: str, arr) -> list[str]:
    lines = [f"[{name}]"]
    for v in np.asarray(arr, dtype=float).ravel():
        lines.append(_f(v))
    return lines


def _dict_block(d: Dictionary) -> list[str]:
    lines = ["[dict]"]
    for i in range(len(d)):
        coords = ",".join(_f(v) for v in d.point(i))
        lines.append(f"{d.ids[i]},{coords}")
    return lines


def dump_state(model) -> str:
    if isinstance(model, OnlineGP):
        lines = [_BANNER, "model=online_gp"]
        lines += _scalar_lines(model.spec)
        lines.append(f"budget={'none' if model.budget is None else model.budget}")
        lines.append(f"admission_threshold={_f(model.admission_threshold)}")
        lines.append(f"next_id={model.dictionary.next_id}")
        lines += _dict_block(model.dictionary)
        lines += _vector_block("targets", model.targets)
        lines += _vector_block("mu", model.mu)
        lines += _matrix_block("sigma", model.sigma)
        lines += _matrix_block("q_inv", model.q_inv)
        return "\n".join(lines) + "\n"
    if isinstance(model, KlmsModel):
        lines = [_BANNER, "model=klms", f"variant={model.variant}"]
        lines += _scalar_lines(model.spec)
        if isinstance(model, (Klms, Qklms, Knlms)):
            lines.append(f"eta={_f(model.eta)}")
        if isinstance(model, Qklms):
            lines.append(f"quant_radius={_f(model.quant_radius)}")
        if isinstance(model, Knlms):
            lines.append(f"eps_reg={_f(model.eps_reg)}")
            lines.append(f"coherence_mu0={_f(model.coherence_mu0)}")
        if isinstance(model, BetaKlms):
            lines.append(f"beta={_f(model.beta)}")
            mu0 = model.coherence_mu0
            lines.append(f"coherence_mu0={'none' if mu0 is None else _f(mu0)}")
        lines.append(f"next_id={model.dictionary.next_id}")
        lines += _dict_block(model.dictionary)
        lines += _vector_block("alpha", model.alpha)
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot snapshot object of type {type(model).__name__}")


def _parse(text: str):
    scalars: dict[str, str] = {}
    blocks: dict[str, list[list[float]]] = {}
    current: list[list[float]] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            current = []
            blocks[name] = current
            continue
        if current is None:
            key, _, value = line.partition("=")
            scalars[key.strip()] = value.strip()
        else:
            current.append([float(p) for p in line.split(",")])
    return scalars, blocks


def _block_matrix(blocks, name: str, n: int) -> np.ndarray:
    rows = blocks.get(name, [])
    if n == 0:
        return np.zeros((0, 0))
    return np.asarray(rows, dtype=float).reshape(n, n)


def _block_vector(blocks, name: str) -> np.ndarray:
    rows = blocks.get(name, [])
    return np.asarray([r[0] for r in rows], dtype=float)


def load_state(text: str):
    """Inverse of dump_state; raises ValueError on malformed input."""
    scalars, blocks = _parse(text)
    if "model" not in scalars:
        raise ValueError("snapshot is missing the model line")
    spec = KernelSpec(
        lengthscale=float(scalars["lengthscale"]),
        signal_variance=float(scalars["signal_variance"]),
        noise_variance=float(scalars["noise_variance"]),
        jitter=float(scalars["jitter"]),
        family=KernelFamily(scalars.get("family", "gaussian")),
    )
    dict_rows = blocks.get("dict", [])
    ids = [int(r[0]) for r in dict_rows]
    points = [r[1:] for r in dict_rows]
    next_id = int(scalars.get("next_id", len(ids)))
    if points:
        dictionary = Dictionary.restore(points, ids, next_id)
    else:
        dictionary = Dictionary()
        dictionary._next_id = next_id

    kind = scalars["model"]
    if kind == "online_gp":
        n = len(dictionary)
        budget = scalars.get("budget", "none")
        return OnlineGP.from_components(
            spec,
            dictionary,
            _block_vector(blocks, "mu"),
            _block_matrix(blocks, "sigma", n),
            _block_matrix(blocks, "q_inv", n),
            targets=_block_vector(blocks, "targets"),
            budget=None if budget == "none" else int(budget),
            admission_threshold=float(scalars["admission_threshold"]),
        )
    if kind == "klms":
        variant = scalars["variant"]
        if variant == "klms":
            model = Klms(spec, eta=float(scalars["eta"]))
        elif variant == "qklms":
            model = Qklms(
                spec,
                eta=float(scalars["eta"]),
                quant_radius=float(scalars["quant_radius"]),
            )
        elif variant == "knlms":
            model = Knlms(
                spec,
                eta=float(scalars["eta"]),
                eps_reg=float(scalars["eps_reg"]),
                coherence_mu0=float(scalars["coherence_mu0"]),
            )
        elif variant == "beta":
            mu0 = scalars.get("coherence_mu0", "none")
            model = BetaKlms(
                spec,
                beta=float(scalars["beta"]),
                coherence_mu0=None if mu0 == "none" else float(mu0),
            )
        else:
            raise ValueError(f"unknown klms variant: {variant}")
        model.dictionary = dictionary
        model.alpha = _block_vector(blocks, "alpha")
        if model.alpha.size != len(dictionary):
            raise ValueError("alpha length does not match the dictionary size")
        return model
    raise ValueError(f"unknown model kind: {kind}")


def save_state(model, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_state(model))


def load_state_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return load_state(fh.read())


def fingerprint(model) -> str:
    """Stable hash of the full model state."""
    return hashlib.sha256(dump_state(model).encode("utf-8")).hexdigest()
