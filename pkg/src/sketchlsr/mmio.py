"""Matrix Market (real, general; array or coordinate) and plain CSV vectors."""

import math
from pathlib import Path

import numpy as np

from .errors import ParseError

__all__ = ["read_matrix_market", "write_matrix_market", "read_vector", "write_vector"]

_BANNER = "%%matrixmarket"


def _data_lines(lines, start):
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        s = raw.strip()
        if s and not s.startswith("%"):
            yield lineno, s.split()


def _float(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a real number: {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {tok!r}", lineno)
    return v


def _int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} is not an integer: {tok!r}", lineno) from None


def read_matrix_market(path):
    """Read a dense float64 matrix. Coordinate entries are 1-based; absent entries are 0."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != _BANNER or header[1].lower() != "matrix":
        raise ParseError("expected '%%MatrixMarket matrix <format> <field> <symmetry>'", 1)
    fmt, fld, sym = (h.lower() for h in header[2:])
    if fmt not in ("array", "coordinate"):
        raise ParseError(f"unsupported format {fmt!r}", 1)
    if fld != "real":
        raise ParseError(f"unsupported field {fld!r}; only 'real' is accepted", 1)
    if sym != "general":
        raise ParseError(f"unsupported symmetry {sym!r}; only 'general' is accepted", 1)

    body = _data_lines(lines, 1)
    try:
        lineno, size = next(body)
    except StopIteration:
        raise ParseError("missing size line", len(lines)) from None
    want = 2 if fmt == "array" else 3
    if len(size) != want:
        raise ParseError(f"size line needs {want} integers", lineno)
    dims = [_int(t, lineno, "size") for t in size]
    m, n = dims[0], dims[1]
    if m < 0 or n < 0:
        raise ParseError("negative dimension", lineno)
    A = np.zeros((m, n))

    if fmt == "array":
        flat = np.empty(m * n)
        k = 0
        for lineno, toks in body:
            if len(toks) != 1:
                raise ParseError("array entries take one value per line", lineno)
            if k >= m * n:
                raise ParseError(f"more than {m * n} entries", lineno)
            flat[k] = _float(toks[0], lineno)
            k += 1
        if k != m * n:
            raise ParseError(f"expected {m * n} entries, found {k}", len(lines))
        return flat.reshape((n, m)).T.copy()

    nnz = dims[2]
    k = 0
    for lineno, toks in body:
        if len(toks) != 3:
            raise ParseError("coordinate entries need 'row col value'", lineno)
        if k >= nnz:
            raise ParseError(f"more than {nnz} entries", lineno)
        i = _int(toks[0], lineno, "row index")
        j = _int(toks[1], lineno, "column index")
        if not (1 <= i <= m and 1 <= j <= n):
            raise ParseError(f"index ({i}, {j}) outside {m}x{n}", lineno)
        A[i - 1, j - 1] += _float(toks[2], lineno)
        k += 1
    if k != nnz:
        raise ParseError(f"expected {nnz} entries, found {k}", len(lines))
    return A


def write_matrix_market(path, A, fmt="array"):
    """Write ``A`` with shortest round-trip float text, so reading back is exact."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    m, n = A.shape
    if fmt == "array":
        out = ["%%MatrixMarket matrix array real general", f"{m} {n}"]
        out += [repr(float(v)) for v in A.T.ravel()]
    elif fmt == "coordinate":
        rows, cols = np.nonzero(A)
        order = np.lexsort((rows, cols))
        out = ["%%MatrixMarket matrix coordinate real general", f"{m} {n} {rows.size}"]
        out += [f"{rows[t] + 1} {cols[t] + 1} {float(A[rows[t], cols[t]])!r}" for t in order]
    else:
        raise ValueError(f"unknown format {fmt!r}")
    Path(path).write_text("\n".join(out) + "\n")


def read_vector(path, fmt=None):
    """Read y from a one-column Matrix Market file or a headerless CSV.

    ``fmt`` is ``'mtx'`` or ``'csv'``; by default ``.mtx`` selects Matrix Market.
    """
    path = Path(path)
    if fmt is None:
        fmt = "mtx" if path.suffix.lower() == ".mtx" else "csv"
    if fmt == "mtx":
        A = read_matrix_market(path)
        if A.ndim != 2 or 1 not in A.shape:
            raise ParseError(f"expected a single column, got shape {A.shape}")
        return A.ravel()
    if fmt != "csv":
        raise ValueError(f"unknown vector format {fmt!r}")
    values = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        s = raw.strip()
        if not s:
            continue
        if "," in s:
            raise ParseError("expected one value per line", lineno)
        values.append(_float(s, lineno))
    return np.array(values)


def write_vector(path, y):
    Path(path).write_text("".join(f"{float(v)!r}\n" for v in np.asarray(y).ravel()))
