"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

The active backend is resolved once per process from the GBN_BACKEND
environment variable:

    GBN_BACKEND=numba   use the jitted kernels (error if numba is absent)
    GBN_BACKEND=numpy   force the pure-numpy fallback
    GBN_BACKEND=auto    numba when importable, numpy otherwise (default)

``set_backend()`` overrides the choice at runtime; the benchmark script
uses it to time both paths inside one process.  Both paths of
``ancestral_fill`` perform the same per-element operation sequence, so
simulated datasets are bit-identical across backends; the accumulation
kernels differ only by summation order (BLAS vs explicit loops).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised via GBN_BACKEND=numpy
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


_BACKEND: str | None = None


def _resolve(name: str) -> str:
    if name in ("", "auto"):
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}; use 'numba', 'numpy' or 'auto'")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("GBN_BACKEND=numba requested but numba is not importable")
    return name


def active_backend() -> str:
    """Name of the backend that will run the next kernel call."""
    global _BACKEND
    if _BACKEND is None:
        _BACKEND = _resolve(os.environ.get("GBN_BACKEND", "auto").strip().lower())
    return _BACKEND


def set_backend(name: str | None) -> None:
    """Select 'numba', 'numpy' or 'auto'; None re-reads GBN_BACKEND."""
    global _BACKEND
    _BACKEND = None if name is None else _resolve(str(name).strip().lower())


# ---------------------------------------------------------------------------
# ancestral sampling
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _ancestral_fill_nb(x, z, topo, par_ptr, par_idx, par_w, m, sigma,
                       cmask, cval):
    n = x.shape[0]
    p = topo.shape[0]
    for k in range(n):
        for t in range(p):
            j = topo[t]
            if cmask[k, j]:
                x[k, j] = cval[k, j]
            else:
                acc = m[j]
                for q in range(par_ptr[j], par_ptr[j + 1]):
                    acc = acc + par_w[q] * x[k, par_idx[q]]
                x[k, j] = acc + sigma[j] * z[k, j]


def _ancestral_fill_np(x, z, topo, par_ptr, par_idx, par_w, m, sigma,
                       cmask, cval):
    n = x.shape[0]
    for j in topo:
        acc = np.full(n, m[j])
        for q in range(par_ptr[j], par_ptr[j + 1]):
            acc = acc + par_w[q] * x[:, par_idx[q]]
        x[:, j] = np.where(cmask[:, j], cval[:, j], acc + sigma[j] * z[:, j])


def ancestral_fill(z, topo, par_ptr, par_idx, par_w, m, sigma, cmask, cval):
    """Generate rows of a linear Gaussian DAG model, node by node.

    Parameters
    ----------
    z : ndarray (n, p)
        Standard normal draws; entries at clamped positions are ignored.
    topo : ndarray (p,) of int64
        0-based node labels, parents before children.
    par_ptr, par_idx, par_w : flattened parent lists
        CSR-style layout: the parents of node j are
        par_idx[par_ptr[j]:par_ptr[j+1]] with weights par_w at the same
        slots, ascending by parent label.
    m, sigma : ndarray (p,)
        Intercepts and noise standard deviations.
    cmask, cval : ndarray (n, p)
        Which entries are clamped, and to what value.

    Returns
    -------
    x : ndarray (n, p)
        Sampled rows; clamped entries carry cval exactly.
    """
    x = np.zeros_like(z)
    fn = _ancestral_fill_nb if active_backend() == "numba" else _ancestral_fill_np
    fn(x, z, topo, par_ptr, par_idx, par_w, m, sigma, cmask, cval)
    return x


# ---------------------------------------------------------------------------
# per-node centering statistics
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _masked_mean_gram_nb(x, mask):
    n_rows, p = x.shape
    cnt = 0
    mean = np.zeros(p)
    gram = np.zeros((p, p))
    for k in range(n_rows):
        if mask[k]:
            cnt += 1
            for a in range(p):
                mean[a] += x[k, a]
    if cnt == 0:
        return cnt, mean, gram
    for a in range(p):
        mean[a] /= cnt
    for k in range(n_rows):
        if mask[k]:
            for a in range(p):
                ya = x[k, a] - mean[a]
                for b in range(a, p):
                    gram[a, b] += ya * (x[k, b] - mean[b])
    for a in range(p):
        for b in range(a + 1, p):
            gram[b, a] = gram[a, b]
    return cnt, mean, gram


def _masked_mean_gram_np(x, mask):
    sub = x[mask]
    cnt = sub.shape[0]
    p = x.shape[1]
    if cnt == 0:
        return 0, np.zeros(p), np.zeros((p, p))
    mean = sub.mean(axis=0)
    yc = sub - mean
    gram = yc.T @ yc
    return cnt, mean, (gram + gram.T) / 2.0


def masked_mean_gram(x, mask):
    """Count, column means and centered scatter of the rows where mask holds.

    gram = sum over selected rows k of (x_k - mean)(x_k - mean)^T.
    """
    fn = _masked_mean_gram_nb if active_backend() == "numba" else _masked_mean_gram_np
    return fn(x, mask)


@njit(cache=True, nogil=True)
def _masked_residual_ss_nb(x, mask, mean, j, par_idx, par_w):
    ss = 0.0
    for k in range(x.shape[0]):
        if mask[k]:
            r = x[k, j] - mean[j]
            for q in range(par_idx.shape[0]):
                r -= par_w[q] * (x[k, par_idx[q]] - mean[par_idx[q]])
            ss += r * r
    return ss


def _masked_residual_ss_np(x, mask, mean, j, par_idx, par_w):
    sub = x[mask]
    r = sub[:, j] - mean[j]
    for q in range(par_idx.shape[0]):
        r = r - par_w[q] * (sub[:, par_idx[q]] - mean[par_idx[q]])
    return float(r @ r)


def masked_residual_ss(x, mask, mean, j, par_idx, par_w):
    """Sum of squared centered regression residuals at node j over the
    rows where mask holds: sum ((x_j - mean_j) - sum_i w_i (x_i - mean_i))^2."""
    fn = (_masked_residual_ss_nb if active_backend() == "numba"
          else _masked_residual_ss_np)
    return float(fn(x, mask, mean, int(j), par_idx, par_w))
