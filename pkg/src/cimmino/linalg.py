"""Minimal dense linear algebra: validated vectors/matrices and a symmetric
eigendecomposition based on cyclic Jacobi rotations."""

from dataclasses import dataclass

import numpy as np

from . import kernels

# Relative asymmetry admitted before the eigensolver rejects its input.
ASYMMETRY_TOL = 1e-12
DEFAULT_EIGEN_TOL = 1e-12
DEFAULT_MAX_SWEEPS = 100


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes."""


class JacobiConvergenceError(RuntimeError):
    """Jacobi sweeps hit the sweep cap before reaching the target tolerance."""

    def __init__(self, off_norm: float, sweeps: int):
        self.off_norm = off_norm
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi eigensolver did not converge in {sweeps} sweeps; "
            f"best off-diagonal norm {off_norm:.3e}"
        )


def as_vector(values) -> np.ndarray:
    """Validate and freeze a 1-D float64 vector (finite entries, length >= 1)."""
    v = np.array(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    v.setflags(write=False)
    return v


def as_matrix(values) -> np.ndarray:
    """Validate and freeze a 2-D float64 matrix (finite entries, >= 1x1)."""
    m = np.array(values, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    m.setflags(write=False)
    return m


def matvec(m, v) -> np.ndarray:
    """Matrix-vector product with an explicit shape check."""
    m = as_matrix(m)
    v = as_vector(v)
    if m.shape[1] != v.size:
        raise DimensionMismatchError(
            f"matrix has {m.shape[1]} columns but vector has length {v.size}"
        )
    return m @ v


def norm2(v) -> float:
    """Euclidean norm."""
    v = as_vector(v)
    return float(np.sqrt(np.sum(v * v)))


def inner(u, v) -> float:
    """Euclidean inner product; lengths must match."""
    u = as_vector(u)
    v = as_vector(v)
    if u.size != v.size:
        raise DimensionMismatchError(
            f"inner product of lengths {u.size} and {v.size}"
        )
    return float(np.dot(u, v))


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues in ascending order with the matching orthogonal column basis.

    ``eigenvectors[:, i]`` is the unit eigenvector paired with
    ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int
    off_norm: float

    @property
    def n(self) -> int:
        return self.eigenvalues.size


def symmetric_eigen(b, tol: float = DEFAULT_EIGEN_TOL,
                    max_sweeps: int = DEFAULT_MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by row-cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm falls to
    ``tol * ||B||_F`` or ``max_sweeps`` is reached.  The input must be
    symmetric to within ``1e-12 * (1 + max|B|)`` per entry; it is then
    symmetrized as (B + B^T)/2 so rounding drift cannot leak complex
    eigenvalues.  Deterministic for identical input.

    Parameters
    ----------
    b : array_like
        Square symmetric matrix.
    tol : float
        Relative off-diagonal target, > 0.
    max_sweeps : int
        Sweep cap; exceeding it raises ``JacobiConvergenceError`` carrying
        the best off-diagonal norm reached.

    Returns
    -------
    EigenDecomposition
        Eigenvalues ascending (ties adjacent), eigenvector columns aligned.
    """
    b = as_matrix(b)
    n, m = b.shape
    if n != m:
        raise DimensionMismatchError(f"eigendecomposition needs a square matrix, got {n}x{m}")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_sweeps < 1:
        raise ValueError(f"max_sweeps must be >= 1, got {max_sweeps}")
    scale = 1.0 + float(np.max(np.abs(b)))
    asym = float(np.max(np.abs(b - b.T)))
    if asym > ASYMMETRY_TOL * scale:
        raise ValueError(
            f"matrix is not symmetric: max |B_ij - B_ji| = {asym:.3e} "
            f"exceeds {ASYMMETRY_TOL * scale:.3e}"
        )
    work = (b + b.T) / 2.0
    basis = np.eye(n)
    frob_sq = float(np.sum(work * work))
    thresh_sq = (tol * tol) * frob_sq
    sweeps, off_norm, converged = kernels.jacobi_cycle(work, basis, thresh_sq, max_sweeps)
    if not converged:
        raise JacobiConvergenceError(float(off_norm), sweeps)
    diag = np.diag(work).copy()
    order = np.argsort(diag, kind="stable")
    eigenvalues = diag[order]
    eigenvectors = basis[:, order]
    eigenvalues.setflags(write=False)
    eigenvectors.setflags(write=False)
    return EigenDecomposition(eigenvalues, eigenvectors, sweeps, float(off_norm))
