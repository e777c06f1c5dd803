"""Benchmark distributions: ill-conditioned Gaussians and the rough well."""

from __future__ import annotations

import numpy as np

from .core import ContractError, TargetModel


class AnisotropicGaussian(TargetModel):
    """Zero-mean Gaussian with diagonal covariance ``diag(variances)``.

    Leapfrog with unit mass is equivariant under rotations, so the diagonal
    form gives the same sampler statistics as any rotated covariance with
    these eigenvalues.
    """

    def __init__(self, variances, name: str = "gaussian"):
        variances = np.atleast_1d(np.asarray(variances, dtype=float))
        if variances.ndim != 1 or not np.all(variances > 0):
            raise ContractError("variances must be a vector of positive reals")
        self.variances = variances
        self.precision = 1.0 / variances
        self.scales = np.sqrt(variances)
        self.dim = variances.size
        self.name = name

    @classmethod
    def log_linear(cls, dim: int, max_variance: float, name: str = "gaussian"):
        """Variances spaced evenly in log from 1 to ``max_variance``."""
        if dim == 1:
            return cls([1.0], name=name)
        return cls(np.logspace(0.0, np.log10(max_variance), dim), name=name)

    def energy(self, x):
        x = self._check_dim(x)
        return 0.5 * np.einsum("...i,i,...i->...", x, self.precision, x)

    def gradient(self, x):
        x = self._check_dim(x)
        return x * self.precision

    def exact_sample(self, rng, size=None):
        shape = (() if size is None else tuple(np.atleast_1d(size))) + (self.dim,)
        return rng.standard_normal(shape) * self.scales

    def __repr__(self):
        return f"AnisotropicGaussian(dim={self.dim}, variances=[{self.variances[0]:g} .. {self.variances[-1]:g}])"


class RoughWell(TargetModel):
    """Broad isotropic quadratic bowl with a cosine ripple along every axis.

    ``E(x) = |x|^2 / (2 sigma1^2) + sum_i cos(pi x_i / sigma2)``
    """

    def __init__(self, sigma1: float = 100.0, sigma2: float = 2.0, dim: int = 2,
                 name: str = "rough-well"):
        if not (sigma1 > 0 and sigma2 > 0):
            raise ContractError("sigma1 and sigma2 must be positive")
        if dim < 1:
            raise ContractError("dim must be positive")
        self.sigma1 = float(sigma1)
        self.sigma2 = float(sigma2)
        self.dim = int(dim)
        self.name = name

    def energy(self, x):
        x = self._check_dim(x)
        quad = np.einsum("...i,...i->...", x, x) / (2.0 * self.sigma1**2)
        return quad + np.cos(np.pi * x / self.sigma2).sum(axis=-1)

    def gradient(self, x):
        x = self._check_dim(x)
        k = np.pi / self.sigma2
        return x / self.sigma1**2 - k * np.sin(k * x)

    def initial_sample(self, rng, size=None):
        """Over-dispersed start ``N(0, sigma1^2 I)``; needs burn-in before use."""
        shape = (() if size is None else tuple(np.atleast_1d(size))) + (self.dim,)
        return rng.standard_normal(shape) * self.sigma1

    def __repr__(self):
        return f"RoughWell(sigma1={self.sigma1:g}, sigma2={self.sigma2:g}, dim={self.dim})"


# catalog name -> (label used in tables, factory)
_CATALOG = {
    "gauss2d": ("2d Gaussian", lambda: AnisotropicGaussian([1.0, 1e6], name="gauss2d")),
    "gauss100d": ("100d Gaussian", lambda: AnisotropicGaussian.log_linear(100, 1e6, name="gauss100d")),
    "gauss2d-grid": ("2d Gaussian (1e5)", lambda: AnisotropicGaussian([1.0, 1e5], name="gauss2d-grid")),
    "rough-well": ("2d Rough Well", lambda: RoughWell(100.0, 2.0, name="rough-well")),
}


def standard_targets() -> dict:
    """Fresh instances of every benchmark target keyed by catalog name."""
    return {name: factory() for name, (_, factory) in _CATALOG.items()}


def get_target(name: str) -> TargetModel:
    try:
        return _CATALOG[name][1]()
    except KeyError:
        raise KeyError(f"unknown target {name!r}; available: {', '.join(_CATALOG)}") from None


def target_label(name: str) -> str:
    return _CATALOG[name][0]
