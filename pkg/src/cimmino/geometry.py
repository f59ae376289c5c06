"""Hyperplanes, reflections, rank-one projections, and the inter-normal angle.

A row a_i of the system matrix together with the right-hand side entry b_i
defines the affine hyperplane {x : <a_i, x> = b_i}.  Everything here is a
pure function on immutable values.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_vector

UNIT_NORM_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Affine hyperplane {x : <normal, x> = offset}.

    The normal is stored as given (no pre-normalization) so that weighting
    by 1/||a||^2 downstream uses the raw row exactly.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = as_vector(self.normal)
        offset = float(self.offset)
        if not np.isfinite(offset):
            raise ValueError("hyperplane offset must be finite")
        if not np.any(normal != 0.0):
            raise ValueError("degenerate hyperplane row: zero normal")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", offset)

    @property
    def norm_sq(self) -> float:
        # Squared norm, sqrt-free: keeps integer-data systems exact.
        return float(np.sum(self.normal * self.normal))


@dataclass(frozen=True, eq=False)
class UnitNormal:
    """Direction vector with unit Euclidean norm (within 1e-14)."""

    direction: np.ndarray

    def __post_init__(self):
        direction = as_vector(self.direction)
        norm = float(np.sqrt(np.sum(direction * direction)))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"direction norm {norm!r} is not 1 within {UNIT_NORM_TOL}")
        object.__setattr__(self, "direction", direction)


def unit_normal(a) -> UnitNormal:
    """Normalize a row to unit length.

    Raises on the zero vector, which would describe a degenerate hyperplane.
    """
    a = as_vector(a)
    norm = float(np.sqrt(np.sum(a * a)))
    if norm == 0.0:
        raise ValueError("degenerate hyperplane row: zero normal")
    return UnitNormal(a / norm)


def projection_matrix(u: UnitNormal) -> np.ndarray:
    """Rank-one orthogonal projection u u^T onto the unit direction ``u``.

    The result is symmetric, idempotent, and has unit trace.
    """
    d = u.direction
    p = np.outer(d, d)
    p.setflags(write=False)
    return p


def reflect(x, plane: Hyperplane) -> np.ndarray:
    """Mirror image of ``x`` across ``plane``.

    Q = x + 2 (b - <a, x>) / ||a||^2 * a.  Reflecting twice returns x, and
    the distance to every point on the plane (in particular a solution
    lying on it) is preserved.
    """
    x = as_vector(x)
    a = plane.normal
    if x.size != a.size:
        raise ValueError(f"point has dimension {x.size}, hyperplane {a.size}")
    coef = 2.0 * (plane.offset - float(np.dot(a, x))) / plane.norm_sq
    return x + coef * a


def internormal_angle(a1, a2) -> float:
    """Angle in (0, pi) between two row directions, from the unit-normal cosine.

    The cosine is clamped to [-1, 1] before arccos so nearly parallel rows
    round to 0 or pi instead of NaN.  Those endpoint values describe a
    singular system; spectral consumers reject them.
    """
    a1 = as_vector(a1)
    a2 = as_vector(a2)
    n1 = float(np.sqrt(np.sum(a1 * a1)))
    n2 = float(np.sqrt(np.sum(a2 * a2)))
    if n1 == 0.0 or n2 == 0.0:
        raise ValueError("degenerate hyperplane row: zero normal")
    cos = float(np.dot(a1 / n1, a2 / n2))
    return float(np.arccos(min(1.0, max(-1.0, cos))))


def masses_to_weights(masses) -> np.ndarray:
    """Convert centroid masses m_i > 0 into iteration weights w_i = 2 m_i / sum(m).

    The weights always sum to 2; equal masses at n = 2 recover the standard
    unit weights.
    """
    m = as_vector(masses)
    if np.any(m <= 0.0):
        raise ValueError("masses must all be positive")
    w = 2.0 * m / float(np.sum(m))
    w.setflags(write=False)
    return w
