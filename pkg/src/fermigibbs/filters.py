"""Frequency-domain filter functions and their detailed-balance factorisation.

Every filter is of the form fhat(nu) = q(nu) * exp(-beta*nu/4) with
q(-nu) = conj(q(nu)), which is what makes the resulting Lindbladian
self-adjoint in the KMS inner product of the thermal state. The Gaussian
filter has q(nu) = exp(-beta^2 nu^2 / 8); the Metropolis-type filter has a
compactly supported q built from a smooth bump function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_METROPOLIS_SUPPORT = 10.0

# the bump underflows before |x| reaches 1; guard the division
_BUMP_EDGE = 1.0 - 1e-12


def bump(x):
    """Smooth bump exp(-1/(5(1-x^2))) on (-1, 1), zero outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < _BUMP_EDGE
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (5.0 * (1.0 - xi * xi)))
    return out if out.ndim else float(out)


def gaussian_q(nu, beta: float):
    nu = np.asarray(nu, dtype=float)
    return np.exp(-(beta * nu) ** 2 / 8.0)


def gaussian_filter(nu, beta: float):
    """Gaussian filter exp(-(beta*nu + 1)^2/8 + 1/8).

    Evaluated through the combined exponent so that large |beta*nu| only
    underflows (never overflows).
    """
    nu = np.asarray(nu, dtype=float)
    return np.exp(-((beta * nu + 1.0) ** 2) / 8.0 + 0.125)


def metropolis_q(nu, beta: float, support: float):
    if support <= 0:
        raise ValueError(f"support must be positive, got {support}")
    nu = np.asarray(nu, dtype=float)
    return np.exp(-np.sqrt(1.0 + (beta * nu) ** 2)) * bump(nu / support)


def metropolis_filter(nu, beta: float, support: float):
    """Metropolis-type filter exp(-sqrt(1+beta^2 nu^2)) w(nu/S) exp(-beta nu/4).

    Vanishes identically for |nu| >= S. The combined exponent
    -sqrt(1 + (beta nu)^2) - beta nu / 4 is bounded above by zero, so the
    evaluation cannot overflow.
    """
    if support <= 0:
        raise ValueError(f"support must be positive, got {support}")
    nu = np.asarray(nu, dtype=float)
    w = bump(nu / support)
    return np.exp(-np.sqrt(1.0 + (beta * nu) ** 2) - beta * nu / 4.0) * w


def coherent_weight(nu, beta: float):
    """Weight (i/2) tanh(beta*nu/4) of the coherent (Lamb-shift-like) term."""
    nu = np.asarray(nu, dtype=float)
    return 0.5j * np.tanh(beta * nu / 4.0)


@dataclass(frozen=True)
class FilterSpec:
    """A concrete filter: its kind, inverse temperature and callables.

    ``q`` and ``fhat`` are vectorised over numpy arrays and satisfy
    fhat(nu) = q(nu) exp(-beta*nu/4) for the built-in kinds.
    """

    kind: str  # "gaussian" | "metropolis" | "custom"
    beta: float
    q: Callable
    fhat: Callable
    support: float | None = None

    def tilde_weight(self, nu):
        """fhat(nu) * exp(+beta*nu/4) = q(nu), the numerically stable form."""
        return self.q(nu)


def gaussian_spec(beta: float) -> FilterSpec:
    return FilterSpec(
        kind="gaussian",
        beta=beta,
        q=lambda nu: gaussian_q(nu, beta),
        fhat=lambda nu: gaussian_filter(nu, beta),
    )


def metropolis_spec(beta: float, support: float = DEFAULT_METROPOLIS_SUPPORT) -> FilterSpec:
    if support <= 0:
        raise ValueError(f"support must be positive, got {support}")
    return FilterSpec(
        kind="metropolis",
        beta=beta,
        q=lambda nu: metropolis_q(nu, beta, support),
        fhat=lambda nu: metropolis_filter(nu, beta, support),
        support=support,
    )


def custom_spec(q: Callable, beta: float, support: float | None = None) -> FilterSpec:
    return FilterSpec(
        kind="custom",
        beta=beta,
        q=q,
        fhat=lambda nu, _q=q: _q(nu) * np.exp(-beta * np.asarray(nu, dtype=float) / 4.0),
        support=support,
    )


def evenized_spec(base: FilterSpec) -> FilterSpec:
    """Symmetrised filter fhat_even(nu) = (fhat(nu) + fhat(-nu))/2.

    Deliberately breaks the detailed-balance factorisation; with an even
    filter the identity matrix becomes a fixed point of the dissipator,
    which is what the degeneracy probes of the atomic limit test.
    """
    beta = base.beta

    def fhat(nu):
        return 0.5 * (base.fhat(nu) + base.fhat(-np.asarray(nu, dtype=float)))

    def q(nu):
        return fhat(nu) * np.exp(beta * np.asarray(nu, dtype=float) / 4.0)

    return FilterSpec(kind="custom", beta=beta, q=q, fhat=fhat, support=base.support)


def filter_spec(kind: str, beta: float, support: float | None = None) -> FilterSpec:
    """Construct a filter by name ("gaussian" or "metropolis")."""
    if kind == "gaussian":
        return gaussian_spec(beta)
    if kind == "metropolis":
        return metropolis_spec(beta, DEFAULT_METROPOLIS_SUPPORT if support is None else support)
    raise ValueError(f"unknown filter kind {kind!r}")
