"""Shared dense-algebra helpers with one scale-aware singularity rule."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

# A symmetric PSD system counts as degenerate when its smallest Cholesky
# pivot drops below this fraction of trace/dim.
PIVOT_RTOL = 1e-10


def spd_cholesky(a: np.ndarray) -> np.ndarray | None:
    """Lower Cholesky factor of a symmetric PSD matrix, or None when the
    matrix is singular under the scale-aware pivot rule."""
    d = a.shape[0]
    if d == 0:
        return np.zeros((0, 0))
    try:
        c = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return None
    pivots = np.diag(c) ** 2
    if pivots.min() < PIVOT_RTOL * np.trace(a) / d:
        return None
    return c


def chol_solve(c: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b given the lower Cholesky factor c of a."""
    if c.shape[0] == 0:
        return np.zeros_like(b)
    y = solve_triangular(c, b, lower=True)
    return solve_triangular(c.T, y, lower=False)


def chol_inverse(c: np.ndarray) -> np.ndarray:
    inv = chol_solve(c, np.eye(c.shape[0]))
    return (inv + inv.T) / 2.0


def chol_logdet(c: np.ndarray) -> float:
    if c.shape[0] == 0:
        return 0.0
    return float(2.0 * np.sum(np.log(np.diag(c))))
