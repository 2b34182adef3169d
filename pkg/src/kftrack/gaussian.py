"""Multivariate normal density evaluation and seeded sampling.

The negative log density is the quantity of record; ``density`` is just
``exp(-neg_log_density)`` and is allowed to underflow to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mat
from .errors import DomainError, ShapeError
from .rng import SeededRng

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianParams:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean, cov = mat.matrix(self.mean), mat.matrix(self.cov)
        if mean.shape[1] != 1:
            raise ShapeError(f"mean must be a column vector, got {mean.shape}")
        if cov.shape != (mean.shape[0], mean.shape[0]):
            raise ShapeError(f"cov shape {cov.shape} does not match mean {mean.shape}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class LikelihoodResult:
    density: float
    neg_log_density: float


def _check_cov(cov: np.ndarray) -> None:
    if not mat.is_symmetric(cov, 1e-9):
        raise DomainError("covariance is not symmetric within 1e-9")
    if not mat.is_spd(cov, 1e-12):
        raise DomainError("covariance is not positive definite")


def _normalizer(cov: np.ndarray) -> tuple[np.ndarray, float]:
    """Inverse covariance and the constant part of the negative log density."""
    _check_cov(cov)
    det = mat.mat_det(cov)
    if not det > 0.0:
        raise DomainError(f"covariance determinant {det!r} is not positive")
    k = cov.shape[0]
    return mat.mat_inverse(cov), 0.5 * k * LOG_2PI + 0.5 * math.log(det)


def _evaluate(dx: np.ndarray, inv_cov: np.ndarray, const: float) -> list[LikelihoodResult]:
    # dx holds one deviation per column; evaluated column by column so every
    # branch runs the identical float sequence for a given point
    out = []
    for i in range(dx.shape[1]):
        d = dx[:, i:i + 1]
        e = 0.5 * float(np.sum(d * (inv_cov @ d))) + const
        out.append(LikelihoodResult(math.exp(-e), e))
    return out


def gauss_pdf(x, params: GaussianParams) -> LikelihoodResult:
    """Density of a single point under ``N(params.mean, params.cov)``."""
    x = mat.matrix(x)
    if x.shape != params.mean.shape:
        raise ShapeError(f"point shape {x.shape} does not match mean {params.mean.shape}")
    inv_cov, const = _normalizer(params.cov)
    return _evaluate(x - params.mean, inv_cov, const)[0]


def gauss_pdf_batch(points, mean, cov) -> list[LikelihoodResult]:
    """Evaluate each column of ``points`` (d x N) against one Gaussian."""
    params = GaussianParams(mean, cov)
    points = mat.matrix(points)
    if points.shape[0] != params.dim:
        raise ShapeError(f"points have {points.shape[0]} rows, mean has {params.dim}")
    inv_cov, const = _normalizer(params.cov)
    return _evaluate(points - params.mean, inv_cov, const)


def gauss_pdf_many_means(x, means, cov) -> list[LikelihoodResult]:
    """Evaluate one point ``x`` (d x 1) against each column of ``means``."""
    x = mat.matrix(x)
    means = mat.matrix(means)
    cov = mat.matrix(cov)
    if x.shape[1] != 1:
        raise ShapeError(f"x must be a column vector, got {x.shape}")
    if means.shape[0] != x.shape[0] or cov.shape != (x.shape[0], x.shape[0]):
        raise ShapeError(
            f"incompatible shapes: x {x.shape}, means {means.shape}, cov {cov.shape}"
        )
    inv_cov, const = _normalizer(cov)
    return _evaluate(x - means, inv_cov, const)


def sample_gaussian(rng: SeededRng, params: GaussianParams) -> np.ndarray:
    """Draw ``mean + L z`` with ``L`` the Cholesky factor of the covariance.

    ``z`` is filled in index order from ``rng.standard_normal()``.  Any
    strictly positive definite covariance is accepted, however small.
    """
    if not mat.is_symmetric(params.cov, 1e-9):
        raise DomainError("covariance is not symmetric within 1e-9")
    try:
        low = mat.cholesky(params.cov)
    except ArithmeticError as exc:
        raise DomainError(f"cannot sample: {exc}") from exc
    z = np.array(rng.standard_normals(params.dim)).reshape(-1, 1)
    return params.mean + low @ z
