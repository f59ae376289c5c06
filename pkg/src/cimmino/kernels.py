"""Hot numeric kernels with two interchangeable backends.

The two inner loops that dominate runtime -- the cyclic Jacobi rotation
sweep and the reflection-iteration driver -- are compiled with numba when
it is available.  A pure-numpy twin of each kernel implements the exact
same pivot order and per-element arithmetic, so results agree to rounding
level between backends.

Backend selection happens once at import time:

* numba installed and importable  -> numba kernels (default)
* ``CIMMINO_DISABLE_NUMBA=1``     -> numpy kernels
* numba missing                   -> numpy kernels

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

import os

import numpy as np

ENV_FLAG = "CIMMINO_DISABLE_NUMBA"

_disabled = os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError(f"numba disabled via {ENV_FLAG}")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

# Iteration driver status codes shared by both backends.
STATUS_CONVERGED = 0
STATUS_MAX_ITERATIONS = 1
STATUS_DIVERGED = 2


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver sweeps
# ---------------------------------------------------------------------------

def _jacobi_cycle_numpy(a, v, thresh_sq, max_sweeps):
    """Row-cyclic Jacobi sweeps on symmetric ``a``, accumulating rotations in ``v``.

    Mutates ``a`` and ``v`` in place.  Terminates when the squared
    off-diagonal Frobenius norm drops to ``thresh_sq``.  Returns
    ``(sweeps_used, off_norm, converged)``.
    """
    n = a.shape[0]
    offdiag = ~np.eye(n, dtype=bool)
    off_sq = float(np.sum(a[offdiag] ** 2))
    sweeps = 0
    while off_sq > thresh_sq and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # Two-sided rotation: columns first, then rows (same element
                # order as the numba twin).
                akp = a[:, p].copy()
                akq = a[:, q].copy()
                a[:, p] = c * akp - s * akq
                a[:, q] = s * akp + c * akq
                apk = a[p, :].copy()
                aqk = a[q, :].copy()
                a[p, :] = c * apk - s * aqk
                a[q, :] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                vkp = v[:, p].copy()
                vkq = v[:, q].copy()
                v[:, p] = c * vkp - s * vkq
                v[:, q] = s * vkp + c * vkq
        sweeps += 1
        off_sq = float(np.sum(a[offdiag] ** 2))
    return sweeps, float(np.sqrt(off_sq)), off_sq <= thresh_sq


def _jacobi_cycle_loops(a, v, thresh_sq, max_sweeps):
    # Same algorithm as the numpy twin, written as scalar loops for numba.
    n = a.shape[0]
    off_sq = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                off_sq += a[i, j] * a[i, j]
    sweeps = 0
    while off_sq > thresh_sq and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        sweeps += 1
        off_sq = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off_sq += a[i, j] * a[i, j]
    return sweeps, np.sqrt(off_sq), off_sq <= thresh_sq


# ---------------------------------------------------------------------------
# Reflection-iteration driver
# ---------------------------------------------------------------------------

def _iterate_numpy(a, b, coef, x0, hist, resnorms, stop_abs, sentinel):
    """Run the simultaneous-reflection update until a stop condition fires.

    ``coef`` holds w_i / ||a_i||^2.  ``hist``/``resnorms`` are preallocated
    with ``max_iter + 1`` rows and are filled with the iterates x^(0..k) and
    their residual norms.  Returns ``(k, status)`` where ``k + 1`` rows of
    ``hist`` are valid.
    """
    max_iter = hist.shape[0] - 1
    x = x0.copy()
    k = 0
    while True:
        r = b - a @ x
        res = float(np.sqrt(np.sum(r * r)))
        hist[k] = x
        resnorms[k] = res
        if res <= stop_abs:
            return k, STATUS_CONVERGED
        if np.sqrt(np.sum(x * x)) > sentinel:
            return k, STATUS_DIVERGED
        if k == max_iter:
            return k, STATUS_MAX_ITERATIONS
        # np.add.reduce over axis 0 accumulates rows in ascending order,
        # matching the deterministic reduction contract of the loop twin.
        x = x + np.add.reduce((coef * r)[:, None] * a, axis=0)
        k += 1


def _iterate_loops(a, b, coef, x0, hist, resnorms, stop_abs, sentinel):
    n = x0.shape[0]
    max_iter = hist.shape[0] - 1
    x = x0.copy()
    r = np.empty(n)
    k = 0
    while True:
        res_sq = 0.0
        x_sq = 0.0
        for i in range(n):
            acc = b[i]
            for j in range(n):
                acc -= a[i, j] * x[j]
            r[i] = acc
            res_sq += acc * acc
            x_sq += x[i] * x[i]
            hist[k, i] = x[i]
        res = np.sqrt(res_sq)
        resnorms[k] = res
        if res <= stop_abs:
            return k, STATUS_CONVERGED
        if np.sqrt(x_sq) > sentinel:
            return k, STATUS_DIVERGED
        if k == max_iter:
            return k, STATUS_MAX_ITERATIONS
        # Projection terms reduced in ascending row order (deterministic).
        step = np.zeros(n)
        for i in range(n):
            ci = coef[i] * r[i]
            for j in range(n):
                step[j] += ci * a[i, j]
        for j in range(n):
            x[j] = x[j] + step[j]
        k += 1


if HAS_NUMBA:
    _jacobi_cycle_numba = njit(cache=True)(_jacobi_cycle_loops)
    _iterate_numba = njit(cache=True)(_iterate_loops)
    jacobi_cycle = _jacobi_cycle_numba
    iterate = _iterate_numba
else:
    jacobi_cycle = _jacobi_cycle_numpy
    iterate = _iterate_numpy


def backend_name() -> str:
    """Active backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if HAS_NUMBA else "numpy"
