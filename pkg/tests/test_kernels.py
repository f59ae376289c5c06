"""Backend parity: the numba kernels and their pure-numpy twins must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from cimmino import kernels

needs_numba = pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba not active")


def _run_jacobi(fn, b, tol=1e-12, max_sweeps=100):
    work = b.copy()
    basis = np.eye(b.shape[0])
    thresh_sq = (tol * tol) * float(np.sum(b * b))
    sweeps, off, converged = fn(work, basis, thresh_sq, max_sweeps)
    return work, basis, sweeps, off, converged


@needs_numba
@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_jacobi_backends_agree(n):
    rng = np.random.default_rng(n)
    m = rng.standard_normal((n, n))
    b = (m + m.T) / 2.0
    a_np, v_np, s_np, off_np, c_np = _run_jacobi(kernels._jacobi_cycle_numpy, b)
    a_nb, v_nb, s_nb, off_nb, c_nb = _run_jacobi(kernels._jacobi_cycle_numba, b)
    assert c_np and c_nb
    assert s_np == s_nb
    assert np.allclose(np.diag(a_np), np.diag(a_nb), rtol=0.0, atol=1e-13)
    assert np.allclose(v_np, v_nb, rtol=0.0, atol=1e-13)


@needs_numba
def test_jacobi_backends_agree_on_eigenvalues_of_reference():
    b = np.array([[1.0, 0.8], [0.8, 1.0]])
    a_np, _, _, _, _ = _run_jacobi(kernels._jacobi_cycle_numpy, b)
    a_nb, _, _, _, _ = _run_jacobi(kernels._jacobi_cycle_numba, b)
    assert np.array_equal(np.sort(np.diag(a_np)), np.sort(np.diag(a_nb)))


def _run_iterate(fn, a, b, coef, x0, max_iter, stop_abs, sentinel=1e150):
    hist = np.empty((max_iter + 1, x0.size))
    resn = np.empty(max_iter + 1)
    k, status = fn(a, b, coef, x0, hist, resn, stop_abs, sentinel)
    return hist[: k + 1], resn[: k + 1], status


@needs_numba
def test_iterate_backends_agree_on_reference_system():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.array([3.0, 3.0])
    coef = np.ones(2) / 5.0
    x0 = np.zeros(2)
    stop_abs = 1e-10 * (1.0 + float(np.linalg.norm(b)))
    h_np, r_np, s_np = _run_iterate(kernels._iterate_numpy, a, b, coef, x0, 200, stop_abs)
    h_nb, r_nb, s_nb = _run_iterate(kernels._iterate_numba, a, b, coef, x0, 200, stop_abs)
    assert s_np == s_nb == kernels.STATUS_CONVERGED
    assert h_np.shape == h_nb.shape
    assert np.allclose(h_np, h_nb, rtol=0.0, atol=1e-12)
    assert np.allclose(r_np, r_nb, rtol=0.0, atol=1e-12)


@needs_numba
@pytest.mark.parametrize("seed", range(4))
def test_iterate_backends_agree_on_random_systems(seed):
    rng = np.random.default_rng(500 + seed)
    n = int(rng.integers(2, 6))
    a = rng.standard_normal((n, n))
    b = rng.standard_normal(n)
    coef = rng.uniform(0.1, 1.0, size=n) / np.sum(a * a, axis=1)
    x0 = rng.standard_normal(n)
    stop_abs = 1e-8 * (1.0 + float(np.linalg.norm(b)))
    h_np, r_np, s_np = _run_iterate(kernels._iterate_numpy, a, b, coef, x0, 50, stop_abs)
    h_nb, r_nb, s_nb = _run_iterate(kernels._iterate_numba, a, b, coef, x0, 50, stop_abs)
    assert s_np == s_nb
    assert h_np.shape == h_nb.shape
    scale = 1.0 + float(np.max(np.abs(h_np)))
    assert np.max(np.abs(h_np - h_nb)) <= 1e-11 * scale


@needs_numba
def test_iterate_backends_agree_on_divergence():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.array([3.0, 3.0])
    coef = 2.0 * np.ones(2) / 5.0  # doubled weights: rho = 2.6
    x0 = np.zeros(2)
    for fn in (kernels._iterate_numpy, kernels._iterate_numba):
        _, _, status = _run_iterate(fn, a, b, coef, x0, 10_000, 1e-10 * 5.24)
        assert status == kernels.STATUS_DIVERGED


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, CIMMINO_DISABLE_NUMBA="1")
    code = (
        "from cimmino import kernels, LinearSystem, solve, Termination\n"
        "assert not kernels.HAS_NUMBA\n"
        "assert kernels.backend_name() == 'numpy'\n"
        "assert kernels.iterate is kernels._iterate_numpy\n"
        "t = solve(LinearSystem([[2.,1.],[1.,2.]],[3.,3.]), max_iter=150)\n"
        "assert t.terminated is Termination.CONVERGED\n"
    )
    subprocess.run([sys.executable, "-c", code], check=True, env=env)


def test_backend_name_reports_active_path():
    assert kernels.backend_name() in ("numba", "numpy")
    assert (kernels.backend_name() == "numba") == kernels.HAS_NUMBA
