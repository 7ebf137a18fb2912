"""Exact maximum bipartite matching between the columns and rows of a pattern.

The matching size is the structural rank of the pattern, and n - size is the
exact unmatched-node count that the cavity estimator approximates.  The
bipartite graph has left vertices = columns and right vertices = rows, one
edge per nonzero; diagonal entries are ordinary edges there, which is what
rank semantics require (a diagonal matrix has full structural rank).

Deterministic by construction: adjacency lists are sorted by ascending row
within each column and the search visits columns in ascending order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import SparsityPattern

__all__ = ["MatchingResult", "max_matching", "sprank", "brute_force_matching"]

BRUTE_FORCE_MAX_N = 16
BRUTE_FORCE_MAX_NNZ = 64


@dataclass(frozen=True)
class MatchingResult:
    """A maximum matching between rows and columns.

    ``row_match[i]`` is the column matched to row i (or -1), ``col_match[j]``
    the row matched to column j (or -1); the two maps are mutually inverse
    and every matched pair is a pattern entry.
    """

    size: int
    row_match: np.ndarray
    col_match: np.ndarray


def max_matching(p: SparsityPattern) -> MatchingResult:
    """Maximum bipartite matching of the pattern, via Hopcroft-Karp.

    Runs in O(nnz * sqrt(n)); at termination no augmenting path exists, which
    certifies maximality.

    Examples
    --------
    >>> from sparserank.core import SparsityPattern
    >>> ident = SparsityPattern(3, [0, 1, 2], [0, 1, 2])
    >>> max_matching(ident).size
    3
    """
    n = p.n
    if p.nnz == 0:
        empty = np.full(n, -1, dtype=np.int64)
        return MatchingResult(0, empty.copy(), empty.copy())

    # CSR over columns, rows ascending within each column
    order = np.lexsort((p.rows, p.cols))
    adj = p.rows[order].tolist()
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, p.cols + 1, 1)
    np.cumsum(indptr, out=indptr)
    ptr = indptr.tolist()

    match_col = [-1] * n  # column -> row
    match_row = [-1] * n  # row -> column
    dist = [0] * n
    inf = n + 1
    size = 0

    while True:
        # BFS layers from free columns
        queue = [u for u in range(n) if match_col[u] == -1]
        for u in range(n):
            dist[u] = 0 if match_col[u] == -1 else inf
        shortest = inf
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            du = dist[u]
            if du >= shortest:
                continue
            for ei in range(ptr[u], ptr[u + 1]):
                w = match_row[adj[ei]]
                if w == -1:
                    if shortest == inf:
                        shortest = du + 1
                elif dist[w] == inf:
                    dist[w] = du + 1
                    queue.append(w)
        if shortest == inf:
            break

        # vertex-disjoint augmentations along the layering, iterative DFS
        for s in range(n):
            if match_col[s] != -1:
                continue
            stack = [(s, ptr[s])]
            path = []
            while stack:
                u, ei = stack.pop()
                du = dist[u]
                advanced = False
                while ei < ptr[u + 1]:
                    v = adj[ei]
                    ei += 1
                    w = match_row[v]
                    if w == -1:
                        if du + 1 == shortest:
                            path.append((u, v))
                            for pu, pv in path:
                                match_col[pu] = pv
                                match_row[pv] = pu
                                dist[pu] = inf
                            size += 1
                            stack = []
                            path = []
                            advanced = True
                            break
                    elif dist[w] == du + 1:
                        stack.append((u, ei))
                        path.append((u, v))
                        stack.append((w, ptr[w]))
                        advanced = True
                        break
                if not advanced:
                    dist[u] = inf
                    if path:
                        path.pop()

    return MatchingResult(
        size,
        np.asarray(match_row, dtype=np.int64),
        np.asarray(match_col, dtype=np.int64),
    )


def sprank(p: SparsityPattern) -> int:
    """Structural rank: the maximum matching size, in [0, n]."""
    return max_matching(p).size


def brute_force_matching(p: SparsityPattern) -> int:
    """Maximum matching size by exhaustive enumeration (test oracle).

    Independent of the augmenting-path machinery: recursively assigns each
    row to one of its free columns or skips it, memoized on the set of used
    columns.  Restricted to n <= 16 and nnz <= 64.
    """
    if p.n > BRUTE_FORCE_MAX_N or p.nnz > BRUTE_FORCE_MAX_NNZ:
        raise ValueError(
            f"instance exceeds brute-force bounds "
            f"(n={p.n} > {BRUTE_FORCE_MAX_N} or nnz={p.nnz} > {BRUTE_FORCE_MAX_NNZ})"
        )
    adj: list[list[int]] = [[] for _ in range(p.n)]
    for i, j in zip(p.rows.tolist(), p.cols.tolist()):
        adj[i].append(j)
    rows = [sorted(a) for a in adj if a]

    @lru_cache(maxsize=None)
    def best(t: int, used: int) -> int:
        if t == len(rows):
            return 0
        top = best(t + 1, used)
        for c in rows[t]:
            bit = 1 << c
            if not used & bit:
                cand = 1 + best(t + 1, used | bit)
                if cand > top:
                    top = cand
        return top

    result = best(0, 0)
    best.cache_clear()
    return result
