"""Built-in test functions with their regularity metadata."""

from __future__ import annotations

import math

import numpy as np

from .operators import TargetFunction

__all__ = ["CORPUS", "DESCRIPTIONS", "get", "spot_check"]

_RUNGE_LIP = 3.0 * math.sqrt(3.0) / 8.0  # max |d/dt 1/(1+t^2)|, attained at t = 1/sqrt(3)

CORPUS: dict[str, TargetFunction] = {
    f.label: f
    for f in [
        TargetFunction(np.ones_like, "one", known_lipschitz=(1.0, 1.0), sup_norm=1.0),
        TargetFunction(lambda t: t, "id", known_lipschitz=(1.0, 1.0), growth_degree=1),
        TargetFunction(lambda t: t * t, "square", growth_degree=2),
        TargetFunction(np.sin, "sin", known_lipschitz=(1.0, 1.0), sup_norm=1.0),
        TargetFunction(lambda t: np.exp(-t), "exp_neg", known_lipschitz=(1.0, 1.0), sup_norm=1.0),
        TargetFunction(lambda t: 1.0 / (1.0 + t * t), "runge", known_lipschitz=(_RUNGE_LIP, 1.0), sup_norm=1.0),
        TargetFunction(lambda t: np.abs(t - 1.0), "abs1", known_lipschitz=(1.0, 1.0), growth_degree=1),
        TargetFunction(
            lambda t: np.sqrt(np.abs(t - 1.0)), "sqrtabs1", known_lipschitz=(1.0, 0.5), growth_degree=1
        ),
    ]
}

DESCRIPTIONS = {
    "one": "1",
    "id": "t",
    "square": "t^2",
    "sin": "sin(t)",
    "exp_neg": "exp(-t)",
    "runge": "1/(1+t^2)",
    "abs1": "|t-1|",
    "sqrtabs1": "|t-1|^(1/2)",
}


def spot_check(f: TargetFunction, seed: int = 0, pairs: int = 1000, span: float = 20.0) -> None:
    """Test the declared metadata of ``f`` on random pairs in ``[0, span]``.

    Raises ``ValueError`` on the first violated claim.
    """
    rng = np.random.default_rng(seed)
    s = rng.uniform(0.0, span, pairs)
    # Half the pairs are close together, where Holder bounds are tight.
    t = np.where(np.arange(pairs) % 2 == 0, rng.uniform(0.0, span, pairs), s + rng.exponential(1e-3, pairs))
    fs, ft = f(s), f(t)
    tol = 1e-12 * (1.0 + np.maximum(np.abs(fs), np.abs(ft)))
    if f.known_lipschitz is not None:
        M, beta = f.known_lipschitz
        bad = np.abs(fs - ft) > M * np.abs(s - t) ** beta + tol
        if bad.any():
            i = int(np.argmax(bad))
            raise ValueError(f"{f.label}: Lipschitz claim fails at s={s[i]!r}, t={t[i]!r}")
    if f.sup_norm is not None and (np.abs(fs) > f.sup_norm + tol).any():
        raise ValueError(f"{f.label}: sup-norm claim fails")
    if f.growth_degree is not None and (np.abs(fs) > f.growth_const * (1 + s) ** f.growth_degree + tol).any():
        raise ValueError(f"{f.label}: growth claim fails")


def get(label: str, seed: int = 0) -> TargetFunction:
    """Look up a corpus entry and spot-check its metadata."""
    try:
        f = CORPUS[label]
    except KeyError:
        raise KeyError(f"unknown function {label!r}; choose from {', '.join(CORPUS)}") from None
    spot_check(f, seed)
    return f
