"""Exact-rank oracles: sparse elimination over a large prime field and
small-N floating-point numerical rank.

The field rank of a matrix with values reduced into GF(p) lower-bounds the
rational rank, and with independent random nonzero weights it equals the
structural rank except with probability at most nnz/p (Schwartz-Zippel), so
:func:`generic_rank` is a randomized certificate that structural and
algebraic rank coincide.  The default modulus is the Mersenne prime
2^61 - 1, large enough that accidental cancellations are negligible and
shaped for fast reduction; it is configurable for failure-probability
experiments (callers must supply a prime, it is not re-checked here).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _m61
from .core import SparsityPattern, WeightedSparseMatrix
from .errors import NotRepresentableError

__all__ = [
    "DEFAULT_PRIME",
    "FieldRankResult",
    "field_rank",
    "generic_rank",
    "numerical_rank",
    "NUMERICAL_RANK_MAX_N",
]

DEFAULT_PRIME = _m61.M61  # 2^61 - 1
NUMERICAL_RANK_MAX_N = 4000

# switch the elimination to the dense kernel once the live block is this
# dense (and small enough to materialize); only wired for the default prime
_DENSE_SWITCH_DENSITY = 0.08
_DENSE_SWITCH_MAX_CELLS = 4_000_000


@dataclass(frozen=True)
class FieldRankResult:
    """Rank over GF(prime); pivot_count always equals rank."""

    rank: int
    prime: int
    weight_seed: int | None
    pivot_count: int


def _scaled_ints(values: np.ndarray, digits: int, prime: int) -> list[int]:
    """Map float values to field elements as round(v * 10^digits).

    The declared precision is the quantization grid: a value is
    representable exactly when its quantized residue is nonzero, so
    anything smaller than half a grid step (or a multiple of the modulus)
    is rejected instead of silently becoming zero.
    """
    scale = 10**digits
    out = []
    for v in values.tolist():
        try:
            nearest = round(v * scale)
        except (OverflowError, ValueError):
            raise NotRepresentableError(f"non-finite value {v!r}") from None
        if nearest % prime == 0:
            raise NotRepresentableError(
                f"value {v!r} is not representable in GF({prime}) "
                f"at {digits} decimal digits"
            )
        out.append(nearest % prime)
    return out


def field_rank(
    m: WeightedSparseMatrix,
    prime: int = DEFAULT_PRIME,
    precision_digits: int = 12,
) -> FieldRankResult:
    """Exact rank of the matrix with its values reduced into GF(prime).

    Values are scaled to integers at the declared decimal precision
    (default 12 digits) before reduction; see :class:`NotRepresentableError`.
    Deterministic for a fixed input.

    Examples
    --------
    >>> from sparserank.core import WeightedSparseMatrix, SparsityPattern
    >>> ones3 = WeightedSparseMatrix(
    ...     SparsityPattern(3, [0, 0, 0, 1, 1, 1, 2, 2, 2],
    ...                        [0, 1, 2, 0, 1, 2, 0, 1, 2]),
    ...     [1.0] * 9, "all-ones")
    >>> field_rank(ones3).rank
    1
    """
    if prime <= 2**40:
        raise ValueError("prime must exceed 2^40 to keep cancellation probability low")
    ints = _scaled_ints(m.values, precision_digits, prime)
    rank = _eliminate(m.n, m.pattern.rows, m.pattern.cols, ints, prime)
    return FieldRankResult(rank=rank, prime=prime, weight_seed=None, pivot_count=rank)


def generic_rank(
    p: SparsityPattern, prime: int = DEFAULT_PRIME, seed: int = 0
) -> FieldRankResult:
    """Field rank of the pattern under seeded iid uniform nonzero weights.

    The result never exceeds the structural rank and equals it with
    probability at least 1 - nnz/prime.
    """
    if prime <= 2**40:
        raise ValueError("prime must exceed 2^40 to keep cancellation probability low")
    if prime > 2**63 - 1:
        raise ValueError("randomized weights require prime < 2^63")
    rng = np.random.default_rng(seed)
    ints = rng.integers(1, prime, size=p.nnz, dtype=np.int64).tolist()
    rank = _eliminate(p.n, p.rows, p.cols, ints, prime)
    return FieldRankResult(rank=rank, prime=prime, weight_seed=seed, pivot_count=rank)


def _eliminate(n, rows, cols, ints, prime) -> int:
    """Sparse Gaussian elimination over GF(prime).

    Pivot policy is a Markowitz-flavored minimum-fill estimate: take the
    columns of minimum live count, within them the row of minimum length,
    ties broken by lowest row then lowest column index, which makes runs
    deterministic.  Singleton rows and columns therefore eliminate first
    with zero fill.  For the default Mersenne prime the live block is handed
    to a dense kernel once it stops being sparse.
    """
    rowd: list[dict[int, int]] = [dict() for _ in range(n)]
    colr: list[set[int]] = [set() for _ in range(n)]
    for i, j, v in zip(np.asarray(rows).tolist(), np.asarray(cols).tolist(), ints):
        v %= prime
        if v:
            rowd[i][j] = v
            colr[j].add(i)
    cc = np.array([len(s) for s in colr], dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    sentinel = np.iinfo(np.int64).max
    rank = 0
    dense_eligible = prime == _m61.M61
    steps = 0
    while True:
        counts = np.where(alive & (cc > 0), cc, sentinel)
        cmin = counts.min()
        if cmin == sentinel:
            return rank

        if dense_eligible and steps % 32 == 0:
            finished = _try_dense_tail(rowd, colr, cc, alive, n)
            if finished is not None:
                return rank + finished
        steps += 1

        best = None
        for c in np.flatnonzero(counts == cmin):
            c = int(c)
            for i in colr[c]:
                key = (len(rowd[i]), i, c)
                if best is None or key < best:
                    best = key
        _, pivot_row, c = best

        prow = rowd[pivot_row]
        inv = pow(prow[c], -1, prime)
        pitems = [(j, v * inv % prime) for j, v in prow.items() if j != c]
        for j, _ in pitems:
            colr[j].discard(pivot_row)
            cc[j] -= 1
        colr[c].discard(pivot_row)
        cc[c] -= 1
        for i in list(colr[c]):
            ri = rowd[i]
            f = ri.pop(c)
            get = ri.get
            for j, v in pitems:
                x = get(j, 0)
                nv = (x - f * v) % prime
                if nv:
                    ri[j] = nv
                    if not x:
                        colr[j].add(i)
                        cc[j] += 1
                elif x:
                    del ri[j]
                    colr[j].discard(i)
                    cc[j] -= 1
        colr[c].clear()
        cc[c] = 0
        alive[c] = False
        rowd[pivot_row] = {}
        rank += 1
        if rank == n:
            return rank


def _try_dense_tail(rowd, colr, cc, alive, n):
    """Finish with the dense M61 kernel if the live block is dense enough.

    Returns the rank of the live block, or None to continue sparsely.
    """
    live_rows = [i for i in range(n) if rowd[i]]
    live_cols = np.flatnonzero(alive & (cc > 0))
    nr, ncols = len(live_rows), live_cols.size
    if nr == 0 or ncols == 0:
        return None
    cells = nr * ncols
    if cells >= _DENSE_SWITCH_MAX_CELLS:
        return None
    nnz_live = sum(len(rowd[i]) for i in live_rows)
    if nnz_live / cells <= _DENSE_SWITCH_DENSITY:
        return None
    colmap = {int(c): k for k, c in enumerate(live_cols)}
    block = np.zeros((nr, ncols), dtype=np.uint64)
    for r, i in enumerate(live_rows):
        for j, v in rowd[i].items():
            block[r, colmap[j]] = v
    return _m61.dense_rank(block)


def numerical_rank(m: WeightedSparseMatrix, rel_tol: float | None = None) -> int:
    """Floating-point rank: singular values above rel_tol * n * sigma_max.

    The default tolerance is the float64 machine epsilon, the standard
    machine-precision-scaled convention.  Densifies internally and is
    guarded to n <= 4000 because of the cubic factorization cost.
    """
    if m.n > NUMERICAL_RANK_MAX_N:
        raise ValueError(
            f"n={m.n} exceeds the numerical-rank guard ({NUMERICAL_RANK_MAX_N})"
        )
    if rel_tol is None:
        rel_tol = float(np.finfo(np.float64).eps)
    if m.nnz == 0:
        return 0
    dense = np.zeros((m.n, m.n))
    dense[m.pattern.rows, m.pattern.cols] = m.values
    sigma = np.linalg.svd(dense, compute_uv=False)
    return int(np.count_nonzero(sigma > rel_tol * m.n * sigma[0]))
