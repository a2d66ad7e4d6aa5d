"""Reduced-basis polynomial regression used to estimate fitness inside a
cluster of noisy samples.

Three model bases, chosen by how many samples are available: constant,
linear, and diagonal quadratic (intercept, per-coordinate linear and
squared terms; no cross terms). Fitting standardizes coordinates for
conditioning and applies a small ridge penalty to the non-intercept
coefficients so degenerate sample sets stay well-posed; stored
coefficients are mapped back to the original coordinates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ModelKind", "RegressionModel", "select_kind", "fit", "predict", "predict_many"]


class ModelKind(enum.Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    DIAG_QUADRATIC = "diag_quadratic"


@dataclass(frozen=True)
class RegressionModel:
    """Fitted polynomial surrogate.

    ``coefficients`` are in original coordinates, laid out as
    ``[b0]``, ``[b0, b1..bD]`` or ``[b0, b1..bD, g1..gD]`` depending on
    ``kind``. ``center``/``scale`` record the standardization used during
    fitting (kept for inspection; prediction does not need them).
    """

    kind: ModelKind
    coefficients: np.ndarray
    lam: float
    center: np.ndarray
    scale: np.ndarray

    @property
    def dimension(self) -> int:
        return self.center.shape[0]


def select_kind(sample_count, d, quadratic_min_samples_factor=1.0):
    """Richest basis the sample count supports.

    Diagonal quadratic needs ``factor * (2D + 2)`` samples, linear needs
    ``D + 2``, anything less falls back to constant.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    if sample_count >= math.ceil(quadratic_min_samples_factor * (2 * d + 2)):
        return ModelKind.DIAG_QUADRATIC
    if sample_count >= d + 2:
        return ModelKind.LINEAR
    return ModelKind.CONSTANT


def _design(z, kind):
    n = z.shape[0]
    ones = np.ones((n, 1))
    if kind is ModelKind.CONSTANT:
        return ones
    if kind is ModelKind.LINEAR:
        return np.hstack([ones, z])
    return np.hstack([ones, z, z * z])


def fit(xs, ys, kind, lam=1e-6):
    """Ridge least-squares fit of the chosen basis.

    Minimizes ``sum((y - model(x))^2) + lam * ||beta||^2`` with the
    intercept unpenalized, on coordinates standardized to the sample mean
    and spread (spread of a degenerate coordinate is taken as 1). Solved
    as an augmented least-squares problem, which stays stable for
    condition numbers well past 1e8 and any ``lam >= 0``.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.ndim != 2 or ys.ndim != 1 or xs.shape[0] != ys.shape[0]:
        raise ValueError("expected xs of shape (n, D) and ys of shape (n,)")
    if xs.shape[0] < 1:
        raise ValueError("samples must be nonempty")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("samples contain non-finite values")
    if lam < 0:
        raise ValueError("lam must be nonnegative")

    d = xs.shape[1]
    center = xs.mean(axis=0)
    scale = xs.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    z = (xs - center) / scale

    a = _design(z, kind)
    p = a.shape[1]
    if lam > 0 and p > 1:
        pen = math.sqrt(lam) * np.eye(p)[1:]  # intercept row excluded
        a = np.vstack([a, pen])
        ys = np.concatenate([ys, np.zeros(p - 1)])
    beta, *_ = np.linalg.lstsq(a, ys, rcond=None)

    coef = _destandardize(beta, kind, center, scale, d)
    if not np.all(np.isfinite(coef)):
        raise ValueError("regression produced non-finite coefficients")
    return RegressionModel(kind, coef, float(lam), center, scale)


def _destandardize(beta, kind, center, scale, d):
    """Map standardized-space coefficients back to original coordinates."""
    if kind is ModelKind.CONSTANT:
        return beta.copy()
    b0 = beta[0]
    bl = beta[1 : d + 1]
    if kind is ModelKind.LINEAR:
        lin = bl / scale
        return np.concatenate([[b0 - np.dot(lin, center)], lin])
    bq = beta[d + 1 :]
    quad = bq / (scale * scale)
    lin = bl / scale - 2.0 * quad * center
    const = b0 - np.dot(bl / scale, center) + np.dot(quad, center * center)
    return np.concatenate([[const], lin, quad])


def predict_many(model, xs):
    """Vectorized prediction over rows of ``xs``."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != model.dimension:
        raise ValueError(f"expected shape (n, {model.dimension}), got {xs.shape}")
    c = model.coefficients
    d = model.dimension
    out = np.full(xs.shape[0], c[0])
    if model.kind is not ModelKind.CONSTANT:
        out = out + xs @ c[1 : d + 1]
    if model.kind is ModelKind.DIAG_QUADRATIC:
        out = out + (xs * xs) @ c[d + 1 :]
    return out


def predict(model, x):
    """Model value at a single point; pure and deterministic."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.dimension:
        raise ValueError(f"expected a length-{model.dimension} vector, got shape {x.shape}")
    return float(predict_many(model, x[None, :])[0])
