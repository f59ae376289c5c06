import json
import math

import numpy as np
import pytest

from cimmino import LinearSystem, analyze, solve
from cimmino import io as cio

from conftest import write_mm_array, write_mm_vector


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="ascii")
    return path


# ---------------------------------------------------------------------------
# Matrix Market reading
# ---------------------------------------------------------------------------

def test_read_array_column_major(tmp_path):
    path = _write(
        tmp_path, "a.mtx",
        "%%MatrixMarket matrix array real general\n2 2\n2\n1\n1\n2\n",
    )
    assert np.array_equal(cio.read_matrix_market(path), [[2.0, 1.0], [1.0, 2.0]])


def test_read_array_transposes_nonsymmetric_data(tmp_path):
    path = _write(
        tmp_path, "a.mtx",
        "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n",
    )
    # Values are listed column by column.
    assert np.array_equal(cio.read_matrix_market(path), [[1.0, 3.0], [2.0, 4.0]])


def test_read_array_rectangular(tmp_path):
    path = _write(
        tmp_path, "a.mtx",
        "%%MatrixMarket matrix array real general\n3 2\n1\n2\n3\n4\n5\n6\n",
    )
    assert np.array_equal(
        cio.read_matrix_market(path), [[1.0, 4.0], [2.0, 5.0], [3.0, 6.0]]
    )


def test_read_array_symmetric_lower_triangle(tmp_path):
    path = _write(
        tmp_path, "s.mtx",
        "%%MatrixMarket matrix array real symmetric\n2 2\n1\n0.8\n1\n",
    )
    assert np.array_equal(cio.read_matrix_market(path), [[1.0, 0.8], [0.8, 1.0]])


def test_read_coordinate_identity(tmp_path):
    path = _write(
        tmp_path, "c.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 2 1\n",
    )
    assert np.array_equal(cio.read_matrix_market(path), np.eye(2))


def test_read_coordinate_unlisted_entries_are_zero(tmp_path):
    path = _write(
        tmp_path, "c.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 3 1\n2 3 7.5\n",
    )
    expected = np.zeros((2, 3))
    expected[1, 2] = 7.5
    assert np.array_equal(cio.read_matrix_market(path), expected)


def test_read_coordinate_symmetric_expands(tmp_path):
    path = _write(
        tmp_path, "c.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 1\n2 1 0.8\n2 2 1\n",
    )
    assert np.array_equal(cio.read_matrix_market(path), [[1.0, 0.8], [0.8, 1.0]])


def test_read_skips_comment_lines(tmp_path):
    path = _write(
        tmp_path, "c.mtx",
        "%%MatrixMarket matrix array real general\n% produced by hand\n%\n1 1\n4.25\n",
    )
    assert np.array_equal(cio.read_matrix_market(path), [[4.25]])


def test_header_sniffing(tmp_path):
    array_path = _write(
        tmp_path, "a.mtx", "%%MatrixMarket matrix array real general\n1 1\n1\n"
    )
    coord_path = _write(
        tmp_path, "c.mtx", "%%MatrixMarket matrix coordinate real general\n1 1 0\n"
    )
    assert cio.matrix_market_format(array_path) is cio.MatrixMarketFormat.ARRAY
    assert cio.matrix_market_format(coord_path) is cio.MatrixMarketFormat.COORDINATE


# Curated malformed corpus: every fixture is rejected with its own reason.
_MALFORMED = {
    "missing-header": "1 1\n1\n",
    "malformed-header": "%%MatrixMarket matrix array real\n1 1\n1\n",
    "unsupported-format": "%%MatrixMarket matrix dense real general\n1 1\n1\n",
    "field-not-real": "%%MatrixMarket matrix array complex general\n1 1\n1 0\n",
    "unsupported-symmetry": "%%MatrixMarket matrix array real hermitian\n1 1\n1\n",
    "missing-size": "%%MatrixMarket matrix array real general\n% only comments\n",
    "malformed-size": "%%MatrixMarket matrix array real general\n2 x\n1\n1\n",
    "too-large": "%%MatrixMarket matrix coordinate real general\n2000 2000 1\n1 1 1\n",
    "size-mismatch": "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n",
    "malformed-entry": "%%MatrixMarket matrix array real general\n1 1\nabc\n",
    "non-finite": "%%MatrixMarket matrix array real general\n1 1\nNaN\n",
    "duplicate-coordinate": (
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n"
    ),
    "index-out-of-range": (
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"
    ),
    "not-square-symmetric": "%%MatrixMarket matrix array real symmetric\n2 3\n1\n2\n3\n",
    "symmetric-upper-entry": (
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 5\n"
    ),
}


@pytest.mark.parametrize("reason", sorted(_MALFORMED))
def test_malformed_fixtures_rejected_with_distinct_reasons(tmp_path, reason):
    path = _write(tmp_path, "bad.mtx", _MALFORMED[reason])
    with pytest.raises(cio.MatrixMarketError) as excinfo:
        cio.read_matrix_market(path)
    assert excinfo.value.reason == reason


def test_field_pattern_also_rejected(tmp_path):
    path = _write(
        tmp_path, "p.mtx",
        "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n",
    )
    with pytest.raises(cio.MatrixMarketError) as excinfo:
        cio.read_matrix_market(path)
    assert excinfo.value.reason == "field-not-real"


def test_infinity_literal_rejected(tmp_path):
    path = _write(
        tmp_path, "inf.mtx",
        "%%MatrixMarket matrix array real general\n1 1\nInf\n",
    )
    with pytest.raises(cio.MatrixMarketError) as excinfo:
        cio.read_matrix_market(path)
    assert excinfo.value.reason == "non-finite"


def test_read_rhs_vector(tmp_path):
    path = tmp_path / "b.mtx"
    write_mm_vector(path, [3.0, 3.0])
    assert np.array_equal(cio.read_rhs_vector(path), [3.0, 3.0])


def test_read_rhs_rejects_row_vector(tmp_path):
    path = _write(
        tmp_path, "b.mtx",
        "%%MatrixMarket matrix array real general\n1 2\n1\n2\n",
    )
    with pytest.raises(ValueError, match="column vector"):
        cio.read_rhs_vector(path)


def test_load_system_round_trip(tmp_path, example1):
    mat = tmp_path / "a.mtx"
    rhs = tmp_path / "b.mtx"
    write_mm_array(mat, example1.matrix)
    write_mm_vector(rhs, example1.rhs)
    system = cio.load_system(mat, rhs)
    assert np.array_equal(system.matrix, example1.matrix)
    assert np.array_equal(system.rhs, example1.rhs)
    formats = cio.SystemFile(mat, rhs).formats()
    assert formats == (cio.MatrixMarketFormat.ARRAY, cio.MatrixMarketFormat.ARRAY)


def test_load_system_rejects_mismatched_rhs(tmp_path):
    mat = tmp_path / "a.mtx"
    rhs = tmp_path / "b.mtx"
    write_mm_array(mat, np.eye(2))
    write_mm_vector(rhs, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        cio.load_system(mat, rhs)


# ---------------------------------------------------------------------------
# trace CSV
# ---------------------------------------------------------------------------

def test_trace_csv_golden_bytes(tmp_path, figure1):
    trace = solve(figure1, x0=[2.0, 0.0], residual_tol=1e-300, max_iter=1,
                  known_solution=[0.0, 0.0])
    path = tmp_path / "trace.csv"
    cio.write_trace_csv(trace, path)
    lines = path.read_text(encoding="ascii").split("\n")
    assert lines[0] == "iter,residual,error,ratio"
    cells0 = lines[1].split(",")
    assert cells0[0] == "0"
    assert cells0[2] == "2.0"
    assert cells0[3] == ""
    cells1 = lines[2].split(",")
    assert cells1[0] == "1"
    assert float(cells1[2]) == pytest.approx(1.0, abs=1e-12)
    assert float(cells1[3]) == pytest.approx(0.5, abs=1e-12)
    assert lines[-1] == ""  # final newline


def test_trace_csv_without_solution_leaves_columns_empty(tmp_path, example1):
    trace = solve(example1, max_iter=5)
    path = tmp_path / "trace.csv"
    cio.write_trace_csv(trace, path)
    for line in path.read_text(encoding="ascii").strip().split("\n")[1:]:
        cells = line.split(",")
        assert cells[2] == "" and cells[3] == ""


def test_trace_csv_round_trip_bit_exact(tmp_path, example1):
    trace = solve(example1, known_solution=[1.0, 1.0])
    path = tmp_path / "trace.csv"
    cio.write_trace_csv(trace, path)
    rows = cio.read_trace_csv(path)
    assert len(rows) == trace.iterates.shape[0]
    for nu, residual, error, ratio in rows:
        assert residual == trace.residual_norms[nu]
        assert error == trace.error_norms[nu]
    ratios = [r for _, _, _, r in rows if r is not None]
    assert np.array_equal(np.array(ratios), trace.step_ratios)


def test_trace_csv_deterministic_bytes(tmp_path, example1):
    trace = solve(example1, known_solution=[1.0, 1.0])
    p1 = tmp_path / "t1.csv"
    p2 = tmp_path / "t2.csv"
    cio.write_trace_csv(trace, p1)
    cio.write_trace_csv(trace, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert b"\r" not in p1.read_bytes()


def test_trace_csv_unwritable_path(tmp_path, example1):
    trace = solve(example1, max_iter=2)
    with pytest.raises(OSError):
        cio.write_trace_csv(trace, tmp_path / "missing-dir" / "trace.csv")


# ---------------------------------------------------------------------------
# report JSON
# ---------------------------------------------------------------------------

def test_report_json_golden_fields(tmp_path, example1):
    report = analyze(example1)
    path = tmp_path / "report.json"
    cio.write_report_json(report, path)
    text = path.read_text(encoding="ascii")
    doc = json.loads(text)
    assert list(doc) == list(cio.REPORT_FIELD_ORDER)
    assert doc["n"] == 2
    assert doc["weights"] == [1.0, 1.0]
    assert doc["spectral_radius"] == report.spectral_radius
    assert "0.8" in text
    assert doc["class"] == "Converges"
    assert doc["tight_frame"] is False
    assert doc["theta"] == pytest.approx(math.acos(0.8), abs=1e-15)


def test_report_json_example2(tmp_path, example2):
    report = analyze(example2)
    path = tmp_path / "report.json"
    cio.write_report_json(report, path)
    doc = json.loads(path.read_text(encoding="ascii"))
    assert doc["tight_frame"] is True
    assert doc["spectral_radius"] == 0.0


def test_report_json_round_trip(tmp_path):
    rng = np.random.default_rng(90)
    a = rng.standard_normal((3, 3))
    system = LinearSystem(a, rng.standard_normal(3))
    report = analyze(system, rng.uniform(0.3, 1.5, size=3))
    path = tmp_path / "report.json"
    cio.write_report_json(report, path)
    back = cio.read_report_json(path)
    assert back.n == report.n
    assert back.theta is None and report.theta is None
    assert np.array_equal(back.weights, report.weights)
    assert np.array_equal(back.eigenvalues, report.eigenvalues)
    assert back.spectral_radius == report.spectral_radius
    assert back.condition_number == report.condition_number
    assert back.convergence_class is report.convergence_class
    assert back.optimal_alpha == report.optimal_alpha
    assert back.optimal_scaled_rate == report.optimal_scaled_rate
    assert back.tight_frame == report.tight_frame


def test_report_json_deterministic_bytes(tmp_path, example1):
    report = analyze(example1)
    p1 = tmp_path / "r1.json"
    p2 = tmp_path / "r2.json"
    cio.write_report_json(report, p1)
    cio.write_report_json(report, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_report_json_rejects_missing_fields(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2}', encoding="ascii")
    with pytest.raises(ValueError, match="missing fields"):
        cio.read_report_json(path)


def test_format_float_shortest_round_trip():
    assert cio.format_float(0.8) == "0.8"
    assert cio.format_float(0.1 + 0.2) == "0.30000000000000004"
    assert float(cio.format_float(1.0 / 3.0)) == 1.0 / 3.0
