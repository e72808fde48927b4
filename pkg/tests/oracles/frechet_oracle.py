"""Straight-line Fréchet distance oracle using scipy's matrix square root.

Independent of the engine's eigendecomposition route: standardizes over
the pooled rows, fits mean/covariance directly, and takes the cross-term
square root with ``scipy.linalg.sqrtm``.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg


def oracle_frechet(rows_a, rows_b, epsilon: float = 1e-6) -> float:
    a = np.asarray(rows_a, dtype=float)
    b = np.asarray(rows_b, dtype=float)
    pooled = np.vstack([a, b])
    mu = pooled.mean(axis=0)
    sd = pooled.std(axis=0)
    sd = np.where(sd < 1e-12, 1.0, sd)
    a = (a - mu) / sd
    b = (b - mu) / sd

    mean_a = a.mean(axis=0)
    mean_b = b.mean(axis=0)
    dim = a.shape[1]
    cov_a = np.cov(a, rowvar=False, bias=True) + epsilon * np.eye(dim)
    cov_b = np.cov(b, rowvar=False, bias=True) + epsilon * np.eye(dim)

    cross = linalg.sqrtm(cov_a @ cov_b)
    if np.iscomplexobj(cross):
        cross = cross.real
    diff = mean_a - mean_b
    return float(diff @ diff + np.trace(cov_a + cov_b - 2.0 * cross))


def oracle_frechet_raw(mean_a, cov_a, mean_b, cov_b, epsilon: float = 1e-6) -> float:
    mean_a = np.asarray(mean_a, dtype=float)
    mean_b = np.asarray(mean_b, dtype=float)
    dim = mean_a.shape[0]
    cov_a = np.asarray(cov_a, dtype=float) + epsilon * np.eye(dim)
    cov_b = np.asarray(cov_b, dtype=float) + epsilon * np.eye(dim)
    cross = linalg.sqrtm(cov_a @ cov_b)
    if np.iscomplexobj(cross):
        cross = cross.real
    diff = mean_a - mean_b
    return float(diff @ diff + np.trace(cov_a + cov_b - 2.0 * cross))
