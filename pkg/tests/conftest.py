import math

import numpy as np
import pytest

from cimmino import LinearSystem


@pytest.fixture
def example1() -> LinearSystem:
    # cos(theta) = 4/5, eigenvalues of the weighted normal matrix 1/5 and 9/5.
    return LinearSystem([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])


@pytest.fixture
def example2() -> LinearSystem:
    # Orthogonal rows: single-step convergence to (1, 1).
    return LinearSystem([[1.0, 1.0], [1.0, -1.0]], [2.0, 0.0])


@pytest.fixture
def figure1() -> LinearSystem:
    # Unit normals at 120 degrees, both planes through the origin.
    return LinearSystem(
        [[1.0, 0.0], [-0.5, math.sqrt(3.0) / 2.0]], [0.0, 0.0]
    )


def system_at_angle(theta: float, b=(0.0, 0.0)) -> LinearSystem:
    """2x2 system with unit rows separated by the angle theta."""
    return LinearSystem(
        [[1.0, 0.0], [math.cos(theta), math.sin(theta)]], list(b)
    )


def random_nonsingular_system(rng: np.random.Generator, n: int) -> LinearSystem:
    """Random square system that is comfortably nonsingular."""
    while True:
        a = rng.standard_normal((n, n))
        if abs(np.linalg.det(a)) > 0.1:
            return LinearSystem(a, rng.standard_normal(n))


def write_mm_array(path, matrix) -> None:
    """Write a dense matrix as a Matrix Market array file (column-major)."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    rows, cols = matrix.shape
    lines = ["%%MatrixMarket matrix array real general", f"{rows} {cols}"]
    for j in range(cols):
        for i in range(rows):
            lines.append(repr(float(matrix[i, j])))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def write_mm_vector(path, values) -> None:
    """Write a vector as an n x 1 Matrix Market array file."""
    v = np.asarray(values, dtype=np.float64)
    write_mm_array(path, v.reshape(-1, 1))
