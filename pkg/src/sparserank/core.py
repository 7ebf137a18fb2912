"""Sparse pattern and weighted-matrix value types plus degree statistics.

Conventions used throughout the package:

* Matrices are square (n x n) and stored as coordinate lists of nonzeros.
* Entry (i, j) is read as a directed edge j -> i, so the in-degree of node i
  is the number of nonzeros in row i and the out-degree of node j is the
  number of nonzeros in column j.  Rank results are invariant under the
  opposite convention; this one is fixed so degree statistics are well
  defined.
* Indices are 0-based everywhere in memory; file formats convert at the
  boundary.

All values are immutable after construction and all operations are pure,
so everything here is safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "SparsityPattern",
    "WeightedSparseMatrix",
    "DegreeDistribution",
    "structuralize",
    "degree_sequences",
    "degree_distribution",
    "mean_row_degree",
]


def _as_index_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


@dataclass(frozen=True, eq=False)
class SparsityPattern:
    """Positions of the nonzeros of an n x n matrix.

    Parameters
    ----------
    n : int
        Matrix dimension (positive).
    rows, cols : array-like of int
        Aligned 0-based coordinates of the nonzeros, in construction order.

    Raises
    ------
    ValueError
        On out-of-range indices or duplicate (row, col) pairs.  Duplicates
        are an error rather than being coalesced: silent summing hides
        data bugs upstream.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray

    def __init__(self, n: int, rows, cols):
        n = int(n)
        if n < 1:
            raise ValueError(f"matrix dimension must be positive, got {n}")
        r = _as_index_array(rows, "rows")
        c = _as_index_array(cols, "cols")
        if r.shape != c.shape:
            raise ValueError("rows and cols must have equal length")
        if r.size:
            if r.min() < 0 or r.max() >= n or c.min() < 0 or c.max() >= n:
                raise ValueError(f"coordinate out of range for n={n}")
            keys = r * n + c
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate (row, col) coordinates")
        r.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)

    @property
    def nnz(self) -> int:
        return int(self.rows.size)

    def entries(self) -> list[tuple[int, int]]:
        """Nonzero coordinates as a list of (row, col) pairs."""
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    @classmethod
    def from_entries(cls, n: int, entries: Iterable[tuple[int, int]]) -> "SparsityPattern":
        pairs = list(entries)
        rows = [p[0] for p in pairs]
        cols = [p[1] for p in pairs]
        return cls(n, rows, cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsityPattern):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
        )

    def __repr__(self) -> str:
        return f"SparsityPattern(n={self.n}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class WeightedSparseMatrix:
    """A sparse matrix: a pattern plus aligned nonzero values.

    ``weight_mode`` tags how the values came to be: "random-iid" for seeded
    draws, "all-ones" when every value is 1, "external" for file input.
    Explicit zeros must be dropped before construction; passing one is an
    error (see :meth:`from_coo` for a constructor that drops them).
    """

    pattern: SparsityPattern
    values: np.ndarray
    weight_mode: str

    WEIGHT_MODES = ("random-iid", "all-ones", "external")

    def __init__(self, pattern: SparsityPattern, values, weight_mode: str):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1 or vals.size != pattern.nnz:
            raise ValueError("values length must equal pattern nnz")
        if vals.size and np.any(vals == 0.0):
            raise ValueError("explicit zero values are not allowed; drop them at construction")
        if weight_mode not in self.WEIGHT_MODES:
            raise ValueError(f"unknown weight_mode {weight_mode!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "pattern", pattern)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "weight_mode", weight_mode)

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def nnz(self) -> int:
        return self.pattern.nnz

    @classmethod
    def from_coo(cls, n, rows, cols, values, weight_mode="external"):
        """Build from coordinates, silently dropping explicit zeros.

        Returns
        -------
        (matrix, dropped) : (WeightedSparseMatrix, int)
            The matrix and the number of zero entries that were dropped.
        """
        rows = _as_index_array(rows, "rows")
        cols = _as_index_array(cols, "cols")
        vals = np.asarray(values, dtype=np.float64)
        keep = vals != 0.0
        dropped = int((~keep).sum())
        pattern = SparsityPattern(n, rows[keep], cols[keep])
        return cls(pattern, vals[keep], weight_mode), dropped

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedSparseMatrix):
            return NotImplemented
        return (
            self.pattern == other.pattern
            and np.array_equal(self.values, other.values)
            and self.weight_mode == other.weight_mode
        )

    def __repr__(self) -> str:
        return (
            f"WeightedSparseMatrix(n={self.n}, nnz={self.nnz}, "
            f"weight_mode={self.weight_mode!r})"
        )


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Empirical degree distribution with finite support.

    ``freqs[i]`` is the relative frequency of ``degrees[i]`` among the ``n``
    nodes.  Frequencies must sum to 1 within 1e-12 and the support is
    restricted to 0..n.  ``kind`` is "in" or "out".
    """

    kind: str
    n: int
    degrees: np.ndarray
    freqs: np.ndarray
    mean: float = field(init=False)

    KINDS = ("in", "out")

    def __init__(self, kind: str, n: int, degrees, freqs, _mean: float | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"kind must be 'in' or 'out', got {kind!r}")
        n = int(n)
        if n < 1:
            raise ValueError("node count must be positive")
        ks = np.asarray(degrees, dtype=np.int64)
        ps = np.asarray(freqs, dtype=np.float64)
        if ks.ndim != 1 or ks.shape != ps.shape or ks.size == 0:
            raise ValueError("degrees and freqs must be equal-length non-empty 1-d arrays")
        order = np.argsort(ks)
        ks = ks[order]
        ps = ps[order]
        if np.unique(ks).size != ks.size:
            raise ValueError("duplicate degrees in support")
        if ks[0] < 0 or ks[-1] > n:
            raise ValueError("support must lie in [0, n]")
        if np.any(ps < 0) or np.any(ps > 1):
            raise ValueError("frequencies must lie in [0, 1]")
        total = float(ps.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"frequencies sum to {total!r}, not 1")
        ks.setflags(write=False)
        ps.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "degrees", ks)
        object.__setattr__(self, "freqs", ps)
        mean = float(np.dot(ks, ps)) if _mean is None else float(_mean)
        object.__setattr__(self, "mean", mean)

    @property
    def probs(self) -> dict[int, float]:
        """Support as a degree -> frequency mapping."""
        return dict(zip(self.degrees.tolist(), self.freqs.tolist()))

    @classmethod
    def from_probs(cls, probs: Mapping[int, float], n: int, kind: str) -> "DegreeDistribution":
        """Build from a mapping; entries with zero frequency are dropped."""
        ks = [int(k) for k, p in probs.items() if p != 0.0]
        ps = [float(p) for p in probs.values() if p != 0.0]
        return cls(kind, n, ks, ps)

    @classmethod
    def from_sequence(cls, seq, kind: str) -> "DegreeDistribution":
        """Tabulate relative frequencies of an integer degree sequence.

        The mean is computed from integer counts so it equals nnz/n exactly
        when the sequence came from a pattern.
        """
        s = np.asarray(seq, dtype=np.int64)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("degree sequence must be a non-empty 1-d array")
        if s.min() < 0:
            raise ValueError("degrees must be non-negative")
        n = s.size
        counts = np.bincount(s)
        ks = np.flatnonzero(counts).astype(np.int64)
        ps = counts[ks] / n
        exact_mean = int(s.sum()) / n
        return cls(kind, n, ks, ps, _mean=exact_mean)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DegreeDistribution):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.n == other.n
            and np.array_equal(self.degrees, other.degrees)
            and np.array_equal(self.freqs, other.freqs)
        )

    def __repr__(self) -> str:
        return (
            f"DegreeDistribution(kind={self.kind!r}, n={self.n}, "
            f"support={self.degrees.size}, mean={self.mean:.6g})"
        )


def structuralize(a: WeightedSparseMatrix) -> SparsityPattern:
    """Project a weighted matrix to its 0/1 structure.

    Nonzeros are already coalesced at construction, so this simply returns
    the stored pattern; composing it with itself changes nothing.
    """
    return a.pattern


def degree_sequences(p: SparsityPattern) -> tuple[np.ndarray, np.ndarray]:
    """Per-node in- and out-degree sequences of the pattern's digraph.

    Returns
    -------
    (in_seq, out_seq)
        ``in_seq[i]`` counts nonzeros in row i, ``out_seq[j]`` nonzeros in
        column j.  Both sum to nnz.
    """
    in_seq = np.bincount(p.rows, minlength=p.n).astype(np.int64)
    out_seq = np.bincount(p.cols, minlength=p.n).astype(np.int64)
    return in_seq, out_seq


def degree_distribution(seq, kind: str) -> DegreeDistribution:
    """Relative-frequency distribution of a degree sequence."""
    return DegreeDistribution.from_sequence(seq, kind)


def mean_row_degree(p: SparsityPattern) -> float:
    """Average number of nonzeros per row, nnz/n."""
    return p.nnz / p.n
