"""File formats: Matrix Market, edge lists, degree-distribution CSV, bench CSV.

Supported matrix formats (tag strings):

* ``matrix-market-real``: coordinate ``real general`` files, 1-based indices,
  ``%`` comments.  Values are kept; exact zeros are dropped (and counted).
* ``matrix-market-pattern``: coordinate ``pattern general``; every entry
  reads as value 1 with weight mode "all-ones".
* ``edge-list``: first line ``# n=<N>``, then one ``src dst`` pair per line,
  0-based.  A line ``src dst`` is the edge src -> dst and is stored as
  matrix entry (dst, src), matching the row = in-degree convention.

Symmetric Matrix Market files are rejected rather than expanded: expansion
would silently change the degree statistics.  Duplicate coordinates are an
error in every format, matching construction policy for the in-memory types.

Parsing is locale-independent (decimal points only).  Reads are pure;
concurrent appends to one bench CSV must be serialized by the caller.
"""

from __future__ import annotations

import csv
import math
import os

import numpy as np

from .core import DegreeDistribution, SparsityPattern, WeightedSparseMatrix
from .errors import FormatError

__all__ = [
    "MATRIX_FORMATS",
    "detect_format",
    "read_matrix",
    "read_matrix_with_report",
    "write_matrix",
    "read_degdist",
    "write_degdist",
    "append_bench_record",
]

MM_REAL = "matrix-market-real"
MM_PATTERN = "matrix-market-pattern"
EDGE_LIST = "edge-list"
MATRIX_FORMATS = (MM_REAL, MM_PATTERN, EDGE_LIST)

_MM_EXTENSIONS = (".mtx", ".mm", ".mtx.gz")


def detect_format(path: str) -> str:
    """Guess a format tag from the file extension (and header for .mtx)."""
    lower = str(path).lower()
    if lower.endswith((".mtx", ".mm")):
        try:
            with open(path, encoding="ascii") as fh:
                header = fh.readline()
        except OSError:
            return MM_REAL
        return MM_PATTERN if "pattern" in header.lower() else MM_REAL
    return EDGE_LIST


def _fail(path, lineno, message):
    raise FormatError(f"{path}:{lineno}: {message}")


def read_matrix(path: str, fmt: str | None = None) -> WeightedSparseMatrix:
    """Read a matrix file; ``fmt=None`` auto-detects from the extension."""
    matrix, _ = read_matrix_with_report(path, fmt)
    return matrix


def read_matrix_with_report(path: str, fmt: str | None = None):
    """Like :func:`read_matrix` but also returns the dropped-zero count."""
    if fmt is None:
        fmt = detect_format(path)
    if fmt in (MM_REAL, MM_PATTERN):
        return _read_matrix_market(path, fmt)
    if fmt == EDGE_LIST:
        return _read_edge_list(path), 0
    raise ValueError(f"unknown matrix format {fmt!r}")


def _read_matrix_market(path, fmt):
    with open(path, encoding="ascii", errors="replace") as fh:
        header = fh.readline()
        lineno = 1
        fields = header.strip().split()
        if len(fields) != 5 or fields[0] != "%%MatrixMarket":
            _fail(path, lineno, "malformed MatrixMarket header")
        _, obj, layout, value_field, symmetry = (f.lower() for f in fields)
        if obj != "matrix" or layout != "coordinate":
            _fail(path, lineno, f"unsupported MatrixMarket type {obj!r}/{layout!r}")
        if symmetry != "general":
            _fail(path, lineno, f"only 'general' symmetry is supported, got {symmetry!r}")
        if value_field not in ("real", "pattern"):
            _fail(path, lineno, f"unsupported value field {value_field!r}")
        expected_field = "real" if fmt == MM_REAL else "pattern"
        if value_field != expected_field:
            _fail(path, lineno, f"file is {value_field!r} but format {fmt!r} was requested")
        pattern_only = value_field == "pattern"

        size = None
        rows, cols, vals = [], [], []
        declared = None
        for line in fh:
            lineno += 1
            text = line.strip()
            if not text or text.startswith("%"):
                continue
            parts = text.split()
            if size is None:
                if len(parts) != 3:
                    _fail(path, lineno, "size line must be 'rows cols nnz'")
                try:
                    nr, nc, declared = (int(x) for x in parts)
                except ValueError:
                    _fail(path, lineno, "non-integer size line")
                if nr != nc:
                    _fail(path, lineno, f"non-square matrix {nr}x{nc}")
                if nr < 1:
                    _fail(path, lineno, "dimension must be positive")
                size = nr
                continue
            want = 2 if pattern_only else 3
            if len(parts) != want:
                _fail(path, lineno, f"expected {want} fields, got {len(parts)}")
            try:
                i = int(parts[0])
                j = int(parts[1])
            except ValueError:
                _fail(path, lineno, "non-integer coordinate")
            if not (1 <= i <= size and 1 <= j <= size):
                _fail(path, lineno, f"index ({i}, {j}) out of range for n={size}")
            if pattern_only:
                v = 1.0
            else:
                try:
                    v = float(parts[2])
                except ValueError:
                    _fail(path, lineno, f"non-numeric value {parts[2]!r}")
                if math.isnan(v) or math.isinf(v):
                    _fail(path, lineno, f"non-finite value {parts[2]!r}")
            rows.append(i - 1)
            cols.append(j - 1)
            vals.append(v)
        if size is None:
            _fail(path, lineno, "missing size line")
        if declared != len(rows):
            _fail(path, lineno, f"declared {declared} entries, found {len(rows)}")

    _check_duplicates(path, size, rows, cols)
    lineno_hint = lineno
    mode = "all-ones" if pattern_only else "external"
    try:
        matrix, dropped = WeightedSparseMatrix.from_coo(size, rows, cols, vals, mode)
    except ValueError as exc:
        _fail(path, lineno_hint, str(exc))
    return matrix, dropped


def _read_edge_list(path):
    with open(path, encoding="ascii", errors="replace") as fh:
        lineno = 0
        n = None
        rows, cols = [], []
        for line in fh:
            lineno += 1
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                if n is None and "n=" in text.replace(" ", ""):
                    try:
                        n = int(text.replace(" ", "").split("n=")[1])
                    except ValueError:
                        _fail(path, lineno, "malformed '# n=<N>' line")
                continue
            if n is None:
                _fail(path, lineno, "missing '# n=<N>' line before edges")
            parts = text.split()
            if len(parts) != 2:
                _fail(path, lineno, f"expected 'src dst', got {text!r}")
            try:
                src, dst = int(parts[0]), int(parts[1])
            except ValueError:
                _fail(path, lineno, "non-integer endpoint")
            if not (0 <= src < n and 0 <= dst < n):
                _fail(path, lineno, f"edge ({src}, {dst}) out of range for n={n}")
            rows.append(dst)
            cols.append(src)
        if n is None:
            _fail(path, lineno, "missing '# n=<N>' line")
        if n < 1:
            _fail(path, lineno, "n must be positive")
    _check_duplicates(path, n, rows, cols)
    pattern = SparsityPattern(n, rows, cols)
    return WeightedSparseMatrix(pattern, np.ones(pattern.nnz), "all-ones")


def _check_duplicates(path, n, rows, cols):
    seen = set()
    for k, (i, j) in enumerate(zip(rows, cols)):
        key = i * n + j
        if key in seen:
            _fail(path, f"entry {k + 1}", f"duplicate coordinate ({i}, {j})")
        seen.add(key)


def write_matrix(m: WeightedSparseMatrix, path: str, fmt: str | None = None) -> None:
    """Write a matrix; real values are printed with 17 significant digits so
    a read round-trips bit-identically."""
    if fmt is None:
        fmt = detect_format(path) if os.path.exists(path) else (
            MM_REAL if str(path).lower().endswith((".mtx", ".mm")) else EDGE_LIST
        )
    if fmt == MM_REAL:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("%%MatrixMarket matrix coordinate real general\n")
            fh.write(f"{m.n} {m.n} {m.nnz}\n")
            for i, j, v in zip(m.pattern.rows, m.pattern.cols, m.values):
                fh.write(f"{i + 1} {j + 1} {v:.17g}\n")
    elif fmt == MM_PATTERN:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("%%MatrixMarket matrix coordinate pattern general\n")
            fh.write(f"{m.n} {m.n} {m.nnz}\n")
            for i, j in zip(m.pattern.rows, m.pattern.cols):
                fh.write(f"{i + 1} {j + 1}\n")
    elif fmt == EDGE_LIST:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"# n={m.n}\n")
            for i, j in zip(m.pattern.rows, m.pattern.cols):
                fh.write(f"{j} {i}\n")
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")


def read_degdist(path: str):
    """Read a degree-distribution CSV.

    Layout: a ``# n=<N>`` line, a ``kind,degree,frequency`` header, then one
    row per support point with kind "in" or "out".  Frequencies of each kind
    must sum to 1 within 1e-9 and are renormalized exactly afterwards.

    Returns
    -------
    (p_in, p_out, n)
    """
    n = None
    support: dict[str, dict[int, float]] = {"in": {}, "out": {}}
    with open(path, encoding="ascii", errors="replace") as fh:
        lineno = 0
        for line in fh:
            lineno += 1
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                if "n=" in text.replace(" ", ""):
                    try:
                        n = int(text.replace(" ", "").split("n=")[1])
                    except ValueError:
                        _fail(path, lineno, "malformed '# n=<N>' line")
                continue
            parts = [p.strip() for p in text.split(",")]
            if parts == ["kind", "degree", "frequency"]:
                continue
            if len(parts) != 3:
                _fail(path, lineno, f"expected 'kind,degree,frequency', got {text!r}")
            kind = parts[0]
            if kind not in ("in", "out"):
                _fail(path, lineno, f"kind must be 'in' or 'out', got {kind!r}")
            try:
                degree = int(parts[1])
            except ValueError:
                _fail(path, lineno, f"non-integer degree {parts[1]!r}")
            if degree < 0:
                _fail(path, lineno, f"negative degree {degree}")
            try:
                freq = float(parts[2])
            except ValueError:
                _fail(path, lineno, f"non-numeric frequency {parts[2]!r}")
            if degree in support[kind]:
                _fail(path, lineno, f"duplicate degree {degree} for kind {kind!r}")
            support[kind][degree] = freq
    if n is None:
        raise FormatError(f"{path}: missing '# n=<N>' line")
    if n < 1:
        raise FormatError(f"{path}: n must be positive, got {n}")
    dists = {}
    for kind in ("in", "out"):
        rows = support[kind]
        if not rows:
            raise FormatError(f"{path}: no rows for kind {kind!r}")
        total = sum(rows.values())
        if abs(total - 1.0) > 1e-9:
            raise FormatError(
                f"{path}: {kind}-frequencies sum to {total!r}, expected 1 within 1e-9"
            )
        if abs(total - 1.0) > 1e-12:
            rows = {k: v / total for k, v in rows.items()}
        dists[kind] = DegreeDistribution.from_probs(rows, n=n, kind=kind)
    return dists["in"], dists["out"], n


def write_degdist(
    p_in: DegreeDistribution, p_out: DegreeDistribution, n: int, path: str
) -> None:
    """Inverse of :func:`read_degdist`; frequencies keep 17 significant digits."""
    if n < 1:
        raise ValueError("n must be positive")
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(f"# n={n}\n")
        fh.write("kind,degree,frequency\n")
        for dist in (p_in, p_out):
            for k, p in zip(dist.degrees.tolist(), dist.freqs.tolist()):
                fh.write(f"{dist.kind},{k},{p:.17g}\n")


def append_bench_record(rec, path: str) -> None:
    """Append one benchmark record as a CSV line, creating the header if the
    file does not exist yet.  Non-finite numeric fields are rejected."""
    from .bench import BENCH_COLUMNS  # late import: bench owns the schema

    row = rec.to_csv_row()
    for name, value in zip(BENCH_COLUMNS, row):
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} in column {name!r}")
    fresh = not os.path.exists(path)
    with open(path, "a", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(BENCH_COLUMNS)
        writer.writerow(row)
