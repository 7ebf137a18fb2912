"""Seeded random matrix generators for the two benchmark ensembles.

Uniform: exactly round(n * k_avg) positions sampled without replacement from
the n x n grid, so the mean row degree is exact rather than Bernoulli-noisy.

Power-law: in- and out-degree sequences drawn independently from a truncated
zeta law P(k) ~ k^-gamma on [k_min, floor(sqrt(n))], paired by a
configuration model.  gamma alone does not pin the mean, so k_min is the
smallest integer floor such that mixing the k_min-floor and (k_min+1)-floor
laws can hit the requested k_avg exactly in expectation; the sqrt(n) cutoff
is standard practice to keep the ensemble self-averaging.

All draws come from numpy's seeded PCG64 generator, so a spec with a fixed
seed reproduces the same matrix on any platform.  Self-loops (diagonal
entries) are allowed; they are ordinary edges for matching and rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SparsityPattern, WeightedSparseMatrix
from .errors import GenerationError

__all__ = ["GenSpec", "gen_matrix", "gen_uniform", "gen_powerlaw", "assign_weights"]

PAIRING_ATTEMPT_FACTOR = 100


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one generated matrix."""

    n: int
    k_avg: float
    dist: str = "uniform"
    gamma: float = 3.0
    weight_mode: str = "random-iid"
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 < self.k_avg <= self.n:
            raise ValueError("k_avg must lie in (0, n]")
        if self.dist not in ("uniform", "powerlaw"):
            raise ValueError(f"unknown dist {self.dist!r}")
        if self.gamma <= 2:
            raise ValueError("gamma must exceed 2")
        if self.weight_mode not in ("random-iid", "all-ones"):
            raise ValueError(f"unknown weight_mode {self.weight_mode!r}")


def gen_matrix(spec: GenSpec) -> WeightedSparseMatrix:
    """Dispatch on spec.dist."""
    if spec.dist == "uniform":
        return gen_uniform(spec)
    return gen_powerlaw(spec)


def _sample_distinct_positions(n: int, count: int, rng) -> np.ndarray:
    """`count` distinct linear indices on the n*n grid, order-stable in seed."""
    total = n * n
    if count > total:
        raise GenerationError(f"requested {count} positions on a {n}x{n} grid")
    if count == total:
        return np.arange(total, dtype=np.int64)
    seen = np.empty(0, dtype=np.int64)
    while seen.size < count:
        need = count - seen.size
        extra = rng.integers(0, total, size=need + need // 8 + 16, dtype=np.int64)
        seen = np.unique(np.concatenate([seen, extra]))
    if seen.size > count:
        keep = np.sort(rng.permutation(seen.size)[:count])
        seen = seen[keep]
    return seen


def gen_uniform(spec: GenSpec) -> WeightedSparseMatrix:
    """Pattern with exactly round(n * k_avg) uniformly placed nonzeros."""
    if spec.dist != "uniform":
        raise ValueError("spec.dist must be 'uniform'")
    rng = np.random.default_rng(spec.seed)
    nnz = int(round(spec.n * spec.k_avg))
    lin = _sample_distinct_positions(spec.n, nnz, rng)
    pattern = SparsityPattern(spec.n, lin // spec.n, lin % spec.n)
    return _with_weights(pattern, spec.weight_mode, rng)


def _truncated_zeta(k_min: int, k_max: int, gamma: float) -> tuple[np.ndarray, float]:
    ks = np.arange(k_min, k_max + 1, dtype=np.float64)
    w = ks**-gamma
    w /= w.sum()
    return w, float((ks * w).sum())


def _degree_law(k_avg: float, gamma: float, k_max: int) -> np.ndarray:
    """Mixture of two floor-truncated zeta laws whose mean is exactly k_avg.

    Searches the smallest k_min with mean(k_min) <= k_avg <= mean(k_min + 1)
    and mixes the two laws accordingly.  Returns probabilities indexed by
    degree 0..k_max.
    """
    lo_w, lo_mean = _truncated_zeta(1, k_max, gamma)
    if k_avg < lo_mean:
        raise GenerationError(
            f"k_avg={k_avg} unreachable: minimum mean at gamma={gamma}, "
            f"k_max={k_max} is {lo_mean:.4f}"
        )
    k_min = 1
    while True:
        if k_min + 1 > k_max:
            raise GenerationError(
                f"k_avg={k_avg} unreachable below cutoff k_max={k_max}"
            )
        hi_w, hi_mean = _truncated_zeta(k_min + 1, k_max, gamma)
        if hi_mean >= k_avg:
            break
        k_min += 1
        lo_w, lo_mean = hi_w, hi_mean
    mix = (k_avg - lo_mean) / (hi_mean - lo_mean)
    probs = np.zeros(k_max + 1)
    probs[k_min : k_max + 1] += (1.0 - mix) * lo_w
    probs[k_min + 1 : k_max + 1] += mix * hi_w
    return probs


def _repair_sum(seq: np.ndarray, add: int, k_max: int, rng) -> np.ndarray:
    """Increment `add` entries below the cutoff so the two stub sums agree."""
    seq = seq.copy()
    headroom = int((seq < k_max).sum())
    if headroom == 0 and add > 0:
        raise GenerationError("degree sequence saturated at the cutoff; cannot repair sums")
    while add > 0:
        for i in rng.integers(0, seq.size, size=2 * add + 8):
            if seq[i] < k_max:
                seq[i] += 1
                add -= 1
                if add == 0:
                    break
    return seq


def _pair_stubs(din: np.ndarray, dout: np.ndarray, n: int, rng) -> SparsityPattern:
    """Configuration-model pairing; duplicate positions are re-paired.

    Each collision swaps the colliding in-stub with a uniformly chosen other
    in-stub, which preserves both degree sequences exactly.  Attempts are
    bounded at PAIRING_ATTEMPT_FACTOR * nnz.
    """
    in_stubs = np.repeat(np.arange(n, dtype=np.int64), din)
    out_stubs = np.repeat(np.arange(n, dtype=np.int64), dout)
    nnz = in_stubs.size
    if nnz == 0:
        return SparsityPattern(n, [], [])
    rng.shuffle(in_stubs)
    rng.shuffle(out_stubs)
    budget = PAIRING_ATTEMPT_FACTOR * nnz
    spent = 0
    while True:
        keys = in_stubs * n + out_stubs
        order = np.argsort(keys, kind="stable")
        dup_sorted = np.concatenate(([False], keys[order][1:] == keys[order][:-1]))
        dup_idx = order[dup_sorted]
        if dup_idx.size == 0:
            break
        spent += dup_idx.size
        if spent > budget:
            raise GenerationError(
                f"stub pairing failed to remove duplicates within {budget} attempts"
            )
        partners = rng.integers(0, nnz, size=dup_idx.size)
        for a, b in zip(dup_idx, partners):
            in_stubs[a], in_stubs[b] = in_stubs[b], in_stubs[a]
    return SparsityPattern(n, in_stubs, out_stubs)


def gen_powerlaw(spec: GenSpec) -> WeightedSparseMatrix:
    """Configuration-model pattern with zeta-law in/out degrees.

    The realized mean row degree lands within a few percent of k_avg (the
    collision repair and sum repair shift it slightly); degree cutoff is
    floor(sqrt(n)).
    """
    if spec.dist != "powerlaw":
        raise ValueError("spec.dist must be 'powerlaw'")
    rng = np.random.default_rng(spec.seed)
    k_max = max(1, int(np.floor(np.sqrt(spec.n))))
    law = _degree_law(spec.k_avg, spec.gamma, k_max)
    din = rng.choice(law.size, size=spec.n, p=law).astype(np.int64)
    dout = rng.choice(law.size, size=spec.n, p=law).astype(np.int64)
    gap = int(din.sum() - dout.sum())
    if gap > 0:
        dout = _repair_sum(dout, gap, k_max, rng)
    elif gap < 0:
        din = _repair_sum(din, -gap, k_max, rng)
    pattern = _pair_stubs(din, dout, spec.n, rng)
    return _with_weights(pattern, spec.weight_mode, rng)


def _with_weights(pattern: SparsityPattern, mode: str, rng) -> WeightedSparseMatrix:
    if mode == "all-ones":
        values = np.ones(pattern.nnz)
    else:
        # uniform on (0, 1]: random() is [0, 1)
        values = 1.0 - rng.random(pattern.nnz)
    return WeightedSparseMatrix(pattern, values, mode)


def assign_weights(p: SparsityPattern, mode: str, seed: int = 0) -> WeightedSparseMatrix:
    """Attach values to an existing pattern.

    "all-ones" sets every value to 1; "random-iid" draws independent values
    uniform on (0, 1] from the seeded generator.
    """
    if mode not in ("random-iid", "all-ones"):
        raise ValueError(f"unknown weight_mode {mode!r}")
    return _with_weights(p, mode, np.random.default_rng(seed))
