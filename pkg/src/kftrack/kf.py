"""Linear Kalman filter: prediction and measurement update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mat
from .errors import DomainError, ShapeError
from .gaussian import GaussianParams, LikelihoodResult, gauss_pdf

SYM_TOL = 1e-9
PSD_PIVOT_TOL = -1e-9
Q_PIVOT_TOL = -1e-12


@dataclass(frozen=True)
class StateSpaceModel:
    """Constant matrices of ``x_k = A x_{k-1} + B u_k + w``, ``y_k = H x_k + v``.

    ``Q`` and ``R`` are the covariances of ``w`` and ``v``.  ``B`` may have any
    number of columns.
    """

    A: np.ndarray
    B: np.ndarray
    H: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "H", "Q", "R"):
            object.__setattr__(self, name, mat.matrix(getattr(self, name)))
        n = self.A.shape[0]
        m = self.H.shape[0]
        if self.A.shape != (n, n):
            raise ShapeError(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != n:
            raise ShapeError(f"B has {self.B.shape[0]} rows, expected {n}")
        if self.H.shape[1] != n:
            raise ShapeError(f"H has {self.H.shape[1]} columns, expected {n}")
        if self.Q.shape != (n, n):
            raise ShapeError(f"Q must be {n}x{n}, got {self.Q.shape}")
        if self.R.shape != (m, m):
            raise ShapeError(f"R must be {m}x{m}, got {self.R.shape}")
        if not mat.is_symmetric(self.Q, SYM_TOL) or not mat.is_spd(self.Q, Q_PIVOT_TOL):
            raise DomainError("Q must be symmetric positive semidefinite")
        if not mat.is_symmetric(self.R, SYM_TOL) or not mat.is_spd(self.R, mat.PIVOT_TOL):
            raise DomainError("R must be symmetric positive definite")

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def meas_dim(self) -> int:
        return self.H.shape[0]

    @property
    def control_dim(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean, cov = mat.matrix(self.mean), mat.matrix(self.cov)
        if mean.shape[1] != 1:
            raise ShapeError(f"state mean must be a column vector, got {mean.shape}")
        if cov.shape != (mean.shape[0], mean.shape[0]):
            raise ShapeError(f"state cov {cov.shape} does not match mean {mean.shape}")
        if not mat.is_symmetric(cov, SYM_TOL):
            raise DomainError("state covariance is not symmetric within 1e-9")
        if min(mat.cholesky_pivots(cov)) < PSD_PIVOT_TOL:
            raise DomainError("state covariance is not positive semidefinite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class UpdateDiagnostics:
    innovation: np.ndarray
    innovation_cov: np.ndarray
    gain: np.ndarray
    predicted_measurement: np.ndarray
    likelihood: LikelihoodResult


def kf_predict(state: GaussianState, model: StateSpaceModel, u) -> GaussianState:
    u = mat.matrix(u)
    if state.mean.shape[0] != model.state_dim:
        raise ShapeError(f"state has dimension {state.mean.shape[0]}, model {model.state_dim}")
    if u.shape != (model.control_dim, 1):
        raise ShapeError(f"control input must be {model.control_dim}x1, got {u.shape}")
    A = model.A
    mean = mat.mat_add(mat.mat_mul(A, state.mean), mat.mat_mul(model.B, u))
    cov = mat.symmetrize(
        mat.mat_add(mat.mat_mul(A, mat.mat_mul(state.cov, mat.mat_transpose(A))), model.Q)
    )
    return GaussianState(mean, cov)


def kf_update(
    predicted: GaussianState, y, model: StateSpaceModel
) -> tuple[GaussianState, UpdateDiagnostics]:
    y = mat.matrix(y)
    if y.shape != (model.meas_dim, 1):
        raise ShapeError(f"measurement must be {model.meas_dim}x1, got {y.shape}")
    if predicted.mean.shape[0] != model.state_dim:
        raise ShapeError(
            f"state has dimension {predicted.mean.shape[0]}, model {model.state_dim}"
        )
    H, P = model.H, predicted.cov
    Ht = mat.mat_transpose(H)
    im = mat.mat_mul(H, predicted.mean)
    v = mat.mat_sub(y, im)
    s = mat.symmetrize(mat.mat_add(mat.mat_mul(H, mat.mat_mul(P, Ht)), model.R))
    k = mat.mat_mul(P, mat.mat_mul(Ht, mat.mat_inverse(s)))
    mean = mat.mat_add(predicted.mean, mat.mat_mul(k, v))
    cov = mat.symmetrize(mat.mat_sub(P, mat.mat_mul(k, mat.mat_mul(s, mat.mat_transpose(k)))))
    lh = gauss_pdf(y, GaussianParams(im, s))
    return GaussianState(mean, cov), UpdateDiagnostics(v, s, k, im, lh)


def kf_step(
    state: GaussianState, u, y, model: StateSpaceModel
) -> tuple[GaussianState, UpdateDiagnostics]:
    return kf_update(kf_predict(state, model, u), y, model)
