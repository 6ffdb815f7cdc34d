"""Array kernels behind the public API.

Each kernel has a numba implementation and a pure-numpy twin with identical
semantics. The numba path is used when numba imports cleanly and the
environment variable ``CREDITBACKBONE_DISABLE_NUMBA`` is unset (or "0").
Both twins are importable under ``NUMBA_KERNELS`` / ``NUMPY_KERNELS`` so the
test-suite and the benchmark can compare them directly.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

ENV_FLAG = "CREDITBACKBONE_DISABLE_NUMBA"

# Above this degree p-values are formed in log space (underflow).
LOG_SPACE_DEGREE = 1000


def _numba_requested() -> bool:
    return os.environ.get(ENV_FLAG, "0").strip().lower() in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# numpy twins
# ---------------------------------------------------------------------------


def _np_accumulate(index, weights, n):
    strength = np.bincount(index, weights=weights, minlength=n).astype(np.float64)
    degree = np.bincount(index, minlength=n).astype(np.int64)
    return strength, degree


def _np_disparity_pvalues(x, k):
    x = np.asarray(x, dtype=np.float64)
    k = np.asarray(k, dtype=np.int64)
    p = np.ones(x.shape, dtype=np.float64)
    logp = np.zeros(x.shape, dtype=np.float64)
    e = (k - 1).astype(np.float64)
    small = (k >= 2) & (k <= LOG_SPACE_DEGREE)
    big = k > LOG_SPACE_DEGREE
    with np.errstate(divide="ignore"):
        p[small] = np.power(1.0 - x[small], e[small])
        logp[small] = np.log(p[small])
        logp[big] = e[big] * np.log1p(-x[big])
        p[big] = np.exp(logp[big])
    return p, logp


def _np_bh_cutoff(sorted_p, theta_b):
    n = sorted_p.shape[0]
    if n == 0:
        return 0
    ranks = np.arange(1, n + 1, dtype=np.float64)
    ok = np.flatnonzero(sorted_p < ranks * theta_b)
    return int(ok[-1] + 1) if ok.size else 0


def _np_component_labels(n, u, v):
    labels = np.arange(n, dtype=np.int64)
    if u.size == 0:
        return labels
    while True:
        prev = labels.copy()
        m = np.minimum(labels[u], labels[v])
        np.minimum.at(labels, u, m)
        np.minimum.at(labels, v, m)
        # pointer jumping until stable
        labels = labels[labels]
        if np.array_equal(labels, prev):
            return labels


def _np_minmax_sums(wa, wb):
    return float(np.minimum(wa, wb).sum()), float(np.maximum(wa, wb).sum())


NUMPY_KERNELS = SimpleNamespace(
    name="numpy",
    accumulate=_np_accumulate,
    disparity_pvalues=_np_disparity_pvalues,
    bh_cutoff=_np_bh_cutoff,
    component_labels=_np_component_labels,
    minmax_sums=_np_minmax_sums,
)


# ---------------------------------------------------------------------------
# numba twins
# ---------------------------------------------------------------------------


def _build_numba_kernels():
    from numba import njit

    @njit(cache=True)
    def accumulate(index, weights, n):
        strength = np.zeros(n, dtype=np.float64)
        degree = np.zeros(n, dtype=np.int64)
        for i in range(index.shape[0]):
            j = index[i]
            strength[j] += weights[i]
            degree[j] += 1
        return strength, degree

    @njit(cache=True)
    def disparity_pvalues(x, k):
        n = x.shape[0]
        p = np.ones(n, dtype=np.float64)
        logp = np.zeros(n, dtype=np.float64)
        for i in range(n):
            ki = k[i]
            if ki < 2:
                continue
            e = float(ki - 1)
            if ki <= LOG_SPACE_DEGREE:
                p[i] = np.power(1.0 - x[i], e)
                logp[i] = np.log(p[i])
            else:
                logp[i] = e * np.log1p(-x[i])
                p[i] = np.exp(logp[i])
        return p, logp

    @njit(cache=True)
    def bh_cutoff(sorted_p, theta_b):
        t_max = 0
        for i in range(sorted_p.shape[0]):
            if sorted_p[i] < float(i + 1) * theta_b:
                t_max = i + 1
        return t_max

    @njit(cache=True)
    def _find(parent, a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            nxt = parent[a]
            parent[a] = root
            a = nxt
        return root

    @njit(cache=True)
    def component_labels(n, u, v):
        parent = np.arange(n, dtype=np.int64)
        for i in range(u.shape[0]):
            ra = _find(parent, u[i])
            rb = _find(parent, v[i])
            if ra == rb:
                continue
            # smaller index becomes root: labels equal the component minimum
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
        labels = np.empty(n, dtype=np.int64)
        for i in range(n):
            labels[i] = _find(parent, i)
        return labels

    @njit(cache=True)
    def _minmax(wa, wb):
        lo = 0.0
        hi = 0.0
        for i in range(wa.shape[0]):
            a = wa[i]
            b = wb[i]
            if a < b:
                lo += a
                hi += b
            else:
                lo += b
                hi += a
        return lo, hi

    def minmax_sums(wa, wb):
        lo, hi = _minmax(np.ascontiguousarray(wa, dtype=np.float64),
                         np.ascontiguousarray(wb, dtype=np.float64))
        return float(lo), float(hi)

    def accumulate_checked(index, weights, n):
        return accumulate(np.ascontiguousarray(index, dtype=np.int64),
                          np.ascontiguousarray(weights, dtype=np.float64), int(n))

    def disparity_pvalues_checked(x, k):
        return disparity_pvalues(np.ascontiguousarray(x, dtype=np.float64),
                                 np.ascontiguousarray(k, dtype=np.int64))

    def bh_cutoff_checked(sorted_p, theta_b):
        return int(bh_cutoff(np.ascontiguousarray(sorted_p, dtype=np.float64),
                             float(theta_b)))

    def component_labels_checked(n, u, v):
        return component_labels(int(n), np.ascontiguousarray(u, dtype=np.int64),
                                np.ascontiguousarray(v, dtype=np.int64))

    return SimpleNamespace(
        name="numba",
        accumulate=accumulate_checked,
        disparity_pvalues=disparity_pvalues_checked,
        bh_cutoff=bh_cutoff_checked,
        component_labels=component_labels_checked,
        minmax_sums=minmax_sums,
    )


try:
    NUMBA_KERNELS = _build_numba_kernels()
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_KERNELS = None


def active() -> SimpleNamespace:
    """Kernel set selected by the environment flag (re-read on every call)."""
    if NUMBA_KERNELS is not None and _numba_requested():
        return NUMBA_KERNELS
    return NUMPY_KERNELS
