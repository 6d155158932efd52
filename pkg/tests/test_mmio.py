import numpy as np
import pytest
import scipy.io
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sketchlsr.errors import ParseError
from sketchlsr.mmio import read_matrix_market, read_vector, write_matrix_market, write_vector


def _write(tmp_path, text, name="m.mtx"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_array_is_column_major(tmp_path):
    path = _write(tmp_path, "%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n")
    np.testing.assert_array_equal(read_matrix_market(path), [[1, 2], [3, 4]])


def test_coordinate_fills_zeros(tmp_path):
    path = _write(tmp_path, "%%MatrixMarket matrix coordinate real general\n"
                            "% a comment\n2 2 1\n1 1 5.0\n")
    np.testing.assert_array_equal(read_matrix_market(path), [[5, 0], [0, 0]])


def test_header_is_case_insensitive(tmp_path):
    path = _write(tmp_path, "%%MatrixMarket MATRIX Array Real General\n1 1\n-2.5e3\n")
    assert read_matrix_market(path)[0, 0] == -2500.0


@pytest.mark.parametrize("text,line", [
    ("%%MatrixMarket matrix array complex general\n1 1\n1 0\n", 1),
    ("%%MatrixMarket matrix array real symmetric\n1 1\n1\n", 1),
    ("%%MatrixMarket vector array real general\n1 1\n1\n", 1),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1.0\n", 3),
    ("%%MatrixMarket matrix array real general\n2 1\n1\nabc\n", 4),
    ("%%MatrixMarket matrix array real general\n2 1\n1\n", 3),
    ("%%MatrixMarket matrix array real general\n1 1\n1\n2\n", 4),
    ("%%MatrixMarket matrix array real general\n1 x\n1\n", 2),
    ("%%MatrixMarket matrix array real general\n1 1\nnan\n", 3),
])
def test_parse_errors_report_line(tmp_path, text, line):
    with pytest.raises(ParseError) as info:
        read_matrix_market(_write(tmp_path, text))
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


@pytest.mark.parametrize("fmt", ["array", "coordinate"])
def test_scipy_reads_what_we_write(tmp_path, rng, fmt):
    A = rng.standard_normal((7, 3))
    A[2, 1] = 0.0
    path = tmp_path / f"a_{fmt}.mtx"
    write_matrix_market(path, A, fmt)
    ref = scipy.io.mmread(str(path))
    ref = ref.toarray() if hasattr(ref, "toarray") else ref
    np.testing.assert_array_equal(ref, A)


def test_we_read_what_scipy_writes(tmp_path, rng):
    A = rng.standard_normal((5, 4))
    path = tmp_path / "s.mtx"
    scipy.io.mmwrite(str(path), A, precision=17)
    np.testing.assert_array_equal(read_matrix_market(path), A)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 4)), elements=finite),
       st.sampled_from(["array", "coordinate"]))
def test_round_trip_exact(tmp_path_factory, A, fmt):
    path = tmp_path_factory.mktemp("rt") / "a.mtx"
    write_matrix_market(path, A, fmt)
    back = read_matrix_market(path)
    np.testing.assert_array_equal(back, A + 0.0)


def test_vectors(tmp_path):
    y = np.array([0.1, -3.0, 1e-300])
    write_vector(tmp_path / "y.csv", y)
    np.testing.assert_array_equal(read_vector(tmp_path / "y.csv"), y)
    write_matrix_market(tmp_path / "y.mtx", y)
    np.testing.assert_array_equal(read_vector(tmp_path / "y.mtx"), y)
    (tmp_path / "y.txt").write_text("1.5\n\n2\n")
    np.testing.assert_array_equal(read_vector(tmp_path / "y.txt"), [1.5, 2.0])
    write_matrix_market(tmp_path / "yy.dat", y)
    np.testing.assert_array_equal(read_vector(tmp_path / "yy.dat", "mtx"), y)


def test_vector_errors(tmp_path):
    (tmp_path / "bad.csv").write_text("1\n2,3\n")
    with pytest.raises(ParseError) as info:
        read_vector(tmp_path / "bad.csv")
    assert info.value.line == 2
    write_matrix_market(tmp_path / "wide.mtx", np.ones((2, 2)))
    with pytest.raises(ParseError):
        read_vector(tmp_path / "wide.mtx")
