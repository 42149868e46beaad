"""Bounded-independence sample spaces over the hypercube and their
Gaussian companions.

Two explicit constructions are provided for k-wise independent ±1 vectors:

* ``vandermonde_bit``: evaluate all degree-(k-1) polynomials over
  GF(2^m) at n distinct field points and keep one output bit per point.
  Seed length k*m with m = ceil(log2 n).
* ``bch_parity``: the dual-BCH space.  Coordinate i is the inner product
  of the seed blocks with the odd powers alpha_i, alpha_i^3, ...,
  XORed with a shared parity bit when k is odd.  Seed length
  floor(k/2)*m (+1 for odd k) with m = ceil(log2(n+1)), roughly half of
  the Vandermonde length.

Verification is exact: biases of all parities of order up to k are
computed in integer/rational arithmetic, never floating point, because
k-wise independence is an exact property and an approximate check would
mask construction bugs.

Gaussian spaces come in two flavors.  ``inverse_cdf`` feeds exactly
k-wise independent uniform levels through the normal quantile function,
so any k coordinates are mutually independent and the marginal is a
q-level discretization of N(0,1).  ``binomial_sum`` averages N
bounded-independence bits per coordinate, giving mean 0 and variance
exactly 1 at the cost of a lattice marginal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.special import ndtri

from . import config
from .errors import (ConfigurationError, FormatError, InvalidOrderError,
                     ResourceBudgetError)
from .gf2 import gf_elements, gf_mul, gf_mul_vec, gf_pow, popcount_u64


# --------------------------------------------------------------------------
# seed-indexed constructions


@dataclass(frozen=True)
class BernoulliConstruction:
    """A seed-indexed k-wise independent map {0,1}^seed_bits -> {-1,1}^n.

    The object is a pure function of its parameters; it can be sampled
    point by point without materializing the full support, which is what
    the Gaussian ``binomial_sum`` method relies on when n*N is large.
    """

    n: int
    k: int
    method: str          # "vandermonde_bit" | "bch_parity"
    m: int               # field degree
    seed_bits: int
    eval_points: tuple[int, ...]

    @property
    def num_seeds(self) -> int:
        return 1 << self.seed_bits

    def _coef_count(self) -> int:
        if self.method == "vandermonde_bit":
            return self.k
        return self.k // 2  # bch blocks, excluding the parity bit

    def _split_seed(self, seed: int) -> tuple[int, list[int]]:
        """Returns (parity_bit, field element blocks), little-endian."""
        mask = (1 << self.m) - 1
        parity = 0
        if self.method == "bch_parity" and self.k % 2 == 1:
            parity = seed & 1
            seed >>= 1
        blocks = [(seed >> (j * self.m)) & mask for j in range(self._coef_count())]
        return parity, blocks

    def point_from_seed(self, seed: int) -> np.ndarray:
        """The ±1 vector indexed by ``seed``.  Pure and deterministic."""
        if not (0 <= seed < self.num_seeds):
            raise ValueError(f"seed {seed} out of range [0, 2^{self.seed_bits})")
        parity, blocks = self._split_seed(seed)
        out = np.empty(self.n, dtype=np.int8)
        for i, alpha in enumerate(self.eval_points):
            if self.method == "vandermonde_bit":
                # Horner evaluation of the seed polynomial at alpha.
                acc = 0
                for c in reversed(blocks):
                    acc = gf_mul(acc, alpha, self.m) ^ c
                bit = acc & 1
            else:
                bit = parity
                for j, y in enumerate(blocks):
                    power = gf_pow(alpha, 2 * j + 1, self.m)
                    bit ^= bin(y & power).count("1") & 1
            out[i] = 1 - 2 * bit
        return out

    def points_for_seeds(self, seeds: np.ndarray) -> np.ndarray:
        """Vectorized ``point_from_seed`` over a uint64 seed array."""
        seeds = np.asarray(seeds, dtype=np.uint64)
        mask = np.uint64((1 << self.m) - 1)
        parity = np.zeros(len(seeds), dtype=np.uint64)
        shifted = seeds
        if self.method == "bch_parity" and self.k % 2 == 1:
            parity = seeds & np.uint64(1)
            shifted = seeds >> np.uint64(1)
        blocks = [(shifted >> np.uint64(j * self.m)) & mask
                  for j in range(self._coef_count())]
        out = np.empty((len(seeds), self.n), dtype=np.int8)
        for i, alpha in enumerate(self.eval_points):
            if self.method == "vandermonde_bit":
                acc = np.zeros(len(seeds), dtype=np.uint64)
                for c in reversed(blocks):
                    acc = gf_mul_vec(acc, alpha, self.m) ^ c
                bits = (acc & np.uint64(1)).astype(np.uint8)
            else:
                bits = parity.astype(np.uint8)
                for j, y in enumerate(blocks):
                    power = np.uint64(gf_pow(alpha, 2 * j + 1, self.m))
                    bits ^= (popcount_u64(y & power) & np.uint8(1))
            out[:, i] = 1 - 2 * bits.astype(np.int8)
        return out

    def points_for_seeds_big(self, seeds: Iterable[int]) -> np.ndarray:
        """Row-by-row fallback for seeds wider than 64 bits."""
        seeds = list(seeds)
        out = np.empty((len(seeds), self.n), dtype=np.int8)
        for r, s in enumerate(seeds):
            out[r] = self.point_from_seed(s)
        return out

    def materialize(self) -> np.ndarray:
        seeds = np.arange(self.num_seeds, dtype=np.uint64)
        return self.points_for_seeds(seeds)


def _vandermonde_construction(n: int, k: int) -> BernoulliConstruction:
    m = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    points = tuple(gf_elements(n, m))
    return BernoulliConstruction(n=n, k=k, method="vandermonde_bit", m=m,
                                 seed_bits=k * m, eval_points=points)


def _bch_construction(n: int, k: int) -> BernoulliConstruction:
    m = max(1, math.ceil(math.log2(n + 1)))
    points = tuple(gf_elements(n, m, nonzero=True))
    t = k // 2
    seed_bits = t * m + (k % 2)
    return BernoulliConstruction(n=n, k=k, method="bch_parity", m=m,
                                 seed_bits=seed_bits, eval_points=points)


# --------------------------------------------------------------------------
# sample spaces


@dataclass
class SampleSpace:
    """A finitely supported distribution on {-1,1}^n.

    ``weights`` is None for spaces that are uniform over their rows (one
    row per seed; duplicate rows carry multiplicity).  Otherwise it is a
    list of exact nonnegative Fractions summing to 1.
    """

    n: int
    k_claimed: int
    points: np.ndarray                      # (num_points, n) int8, entries ±1
    weights: Optional[list[Fraction]] = None
    seed_bits: Optional[int] = None
    method: str = "explicit"
    construction: Optional[BernoulliConstruction] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.int8)
        if self.points.ndim != 2 or self.points.shape[1] != self.n:
            raise ConfigurationError("points must be a (num_points, n) array")
        self.validate()

    @property
    def num_points(self) -> int:
        return self.points.shape[0]

    @property
    def num_seeds(self) -> int:
        """Size of the integer seed range accepted by sample()."""
        if self.weights is None:
            return self.num_points
        denom = math.lcm(*(w.denominator for w in self.weights))
        return denom

    def validate(self) -> None:
        if not np.all(np.abs(self.points) == 1):
            raise ConfigurationError("all coordinates must be ±1")
        if self.weights is not None:
            if len(self.weights) != self.num_points:
                raise ConfigurationError("one weight per point required")
            if any(w < 0 for w in self.weights):
                raise ConfigurationError("weights must be nonnegative")
            if sum(self.weights) != 1:
                raise ConfigurationError("weights must sum to exactly 1")
        if self.seed_bits is not None and self.weights is None:
            if self.num_points != (1 << self.seed_bits):
                raise ConfigurationError(
                    "seed-based space must have 2^seed_bits points")

    def weight_of_row(self, idx: int) -> Fraction:
        if self.weights is None:
            return Fraction(1, self.num_points)
        return self.weights[idx]

    def point_distribution(self) -> dict[tuple[int, ...], Fraction]:
        """Aggregate probability per distinct point (exact)."""
        dist: dict[tuple[int, ...], Fraction] = {}
        for idx in range(self.num_points):
            key = tuple(int(v) for v in self.points[idx])
            dist[key] = dist.get(key, Fraction(0)) + self.weight_of_row(idx)
        return dist


def build_kwise_bernoulli(n: int, k: int, method: str = "vandermonde_bit",
                          budget: int = config.SUPPORT_BUDGET) -> SampleSpace:
    """Construct an exactly k-wise independent space on {-1,1}^n.

    The returned space is uniform over 2^seed_bits rows and carries its
    construction handle, so callers can re-derive any row from its seed.
    """
    if not 1 <= k <= n:
        raise InvalidOrderError(f"need 1 <= k <= n, got k={k}, n={n}")
    if method == "vandermonde_bit":
        cons = _vandermonde_construction(n, k)
    elif method == "bch_parity":
        cons = _bch_construction(n, k)
    else:
        raise ConfigurationError(f"unknown method {method!r}")
    if cons.num_seeds > budget:
        raise ResourceBudgetError(
            f"construction needs support 2^{cons.seed_bits} = "
            f"{cons.num_seeds} > budget {budget}; "
            "use the construction handle for seed streaming")
    points = cons.materialize()
    return SampleSpace(n=n, k_claimed=k, points=points, weights=None,
                       seed_bits=cons.seed_bits, method=method,
                       construction=cons)


def sample(space, seed: int) -> np.ndarray:
    """Deterministic sample by seed index.

    For a uniform space, seed is a row index.  For a rationally weighted
    space, seeds 0..D-1 (D = lcm of weight denominators) are split among
    the points in exact proportion to their weights, so a sweep over all
    seeds reproduces the distribution exactly.
    """
    if isinstance(space, GaussianSpace):
        return space.sample(seed)
    if space.weights is None:
        if not 0 <= seed < space.num_points:
            raise ValueError(f"seed {seed} out of range")
        return space.points[seed].copy()
    denom = space.num_seeds
    if not 0 <= seed < denom:
        raise ValueError(f"seed {seed} out of range [0, {denom})")
    acc = 0
    for idx, w in enumerate(space.weights):
        acc += int(w * denom)
        if seed < acc:
            return space.points[idx].copy()
    raise AssertionError("weights must cover the seed range")


# --------------------------------------------------------------------------
# exact verification


@dataclass
class VerificationReport:
    passed: bool
    order: int
    subsets_checked: int
    worst_subset: Optional[tuple[int, ...]]
    worst_bias: Fraction
    failures: list

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (f"kwise[{self.order}]: {status} over {self.subsets_checked} "
                f"parities; worst |bias| {self.worst_bias} at {self.worst_subset}")


def _row_bitmasks(points: np.ndarray) -> np.ndarray:
    """Encode each ±1 row as a uint64 mask with bit i set iff x_i = -1."""
    neg = (points < 0).astype(np.uint64)
    weights = (np.uint64(1) << np.arange(points.shape[1], dtype=np.uint64))
    return neg @ weights


def verify_kwise_exact(space: SampleSpace, k: Optional[int] = None) -> VerificationReport:
    """Exact zero-bias check of every parity of order 1..k.

    All arithmetic is integer or rational; a space passes iff every bias
    is exactly zero.  The report carries the maximal-bias subset so a
    failure is immediately actionable.
    """
    order = space.k_claimed if k is None else k
    n = space.n
    worst_subset = None
    worst_bias = Fraction(0)
    failures = []
    checked = 0

    if space.weights is None:
        masks = _row_bitmasks(space.points)
        total = space.num_points
        for size in range(1, order + 1):
            for subset in combinations(range(n), size):
                checked += 1
                smask = np.uint64(sum(1 << i for i in subset))
                odd = int(np.sum((popcount_u64(masks & smask) & np.uint8(1)),
                                 dtype=np.int64))
                bias = Fraction(total - 2 * odd, total)
                if bias != 0:
                    failures.append((subset, bias))
                if abs(bias) > abs(worst_bias):
                    worst_bias, worst_subset = bias, subset
    else:
        cols = space.points.astype(np.int64)
        for size in range(1, order + 1):
            for subset in combinations(range(n), size):
                checked += 1
                chi = np.prod(cols[:, subset], axis=1)
                bias = Fraction(0)
                for idx in range(space.num_points):
                    bias += space.weights[idx] * int(chi[idx])
                if bias != 0:
                    failures.append((subset, bias))
                if abs(bias) > abs(worst_bias):
                    worst_bias, worst_subset = bias, subset

    return VerificationReport(passed=not failures, order=order,
                              subsets_checked=checked,
                              worst_subset=worst_subset,
                              worst_bias=worst_bias, failures=failures)


# --------------------------------------------------------------------------
# Gaussian spaces


@dataclass
class GaussianSpace:
    """k-wise independent R^n vectors with near-normal marginals.

    inverse_cdf: coordinate i equals ndtri((u_i + 1/2)/q) where the u_i
    are k-wise independent q-level uniforms obtained from field
    evaluations; any k coordinates are mutually independent because any
    k evaluations of a random degree-(k-1) polynomial are jointly
    uniform.

    binomial_sum: coordinate i averages N ±1 values (2k-wise independent
    across all n*N of them) scaled by 1/sqrt(N).
    """

    n: int
    k_claimed: int
    method: str                       # "inverse_cdf" | "binomial_sum"
    resolution: int                   # q for inverse_cdf, N for binomial_sum
    m: int = 0                        # field degree (inverse_cdf)
    eval_points: tuple[int, ...] = ()
    underlying: Optional[BernoulliConstruction] = None
    seed_bits: int = 0

    @property
    def num_seeds(self) -> int:
        return 1 << self.seed_bits

    # -- inverse_cdf internals

    def _levels_for_blocks(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        """Field evaluations at all coordinates; blocks are coefficient
        arrays (little-endian), one per polynomial degree."""
        count = len(blocks[0])
        out = np.empty((count, self.n), dtype=np.uint64)
        for i, alpha in enumerate(self.eval_points):
            acc = np.zeros(count, dtype=np.uint64)
            for c in reversed(blocks):
                acc = gf_mul_vec(acc, alpha, self.m) ^ c
            out[:, i] = acc
        qmask = np.uint64(self.resolution - 1)
        return out & qmask

    def _z_from_levels(self, levels: np.ndarray) -> np.ndarray:
        q = self.resolution
        return ndtri((levels.astype(np.float64) + 0.5) / q)

    def sample(self, seed: int) -> np.ndarray:
        """Deterministic sample from an integer seed (any size)."""
        if not 0 <= seed < self.num_seeds:
            raise ValueError(f"seed out of range [0, 2^{self.seed_bits})")
        if self.method == "inverse_cdf":
            mask = (1 << self.m) - 1
            blocks = [np.array([(seed >> (j * self.m)) & mask], dtype=np.uint64)
                      for j in range(self.k_claimed)]
            return self._z_from_levels(self._levels_for_blocks(blocks))[0]
        bits = self.underlying.point_from_seed(seed).astype(np.float64)
        rows = bits.reshape(self.n, self.resolution)
        return rows.sum(axis=1) / math.sqrt(self.resolution)

    def sample_batch(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """(count, n) matrix of samples drawn through ``rng``.

        Equivalent to sampling seeds uniformly; implemented directly on
        the coefficient blocks so seeds longer than 64 bits pose no
        problem.
        """
        if self.method == "inverse_cdf":
            blocks = [rng.integers(0, 1 << self.m, size=count, dtype=np.uint64)
                      for _ in range(self.k_claimed)]
            return self._z_from_levels(self._levels_for_blocks(blocks))
        u = self.underlying
        out = np.empty((count, self.n), dtype=np.float64)
        chunk = max(1, (1 << 22) // max(1, u.n))
        done = 0
        while done < count:
            take = min(chunk, count - done)
            seeds = _random_seed_ints(rng, take, u.seed_bits)
            pts = u.points_for_seeds_big(seeds) if u.seed_bits > 63 else \
                u.points_for_seeds(np.array(seeds, dtype=np.uint64))
            z = pts.astype(np.float64).reshape(take, self.n, self.resolution)
            out[done:done + take] = z.sum(axis=2) / math.sqrt(self.resolution)
            done += take
        return out

    def enumerate_samples(self, budget: int = config.SUPPORT_BUDGET) -> np.ndarray:
        """All samples, one per seed; needs 2^seed_bits within budget."""
        if self.num_seeds > budget:
            raise ResourceBudgetError(
                f"2^{self.seed_bits} seeds exceed budget {budget}")
        if self.method == "inverse_cdf":
            seeds = np.arange(self.num_seeds, dtype=np.uint64)
            mask = np.uint64((1 << self.m) - 1)
            blocks = [(seeds >> np.uint64(j * self.m)) & mask
                      for j in range(self.k_claimed)]
            return self._z_from_levels(self._levels_for_blocks(blocks))
        pts = self.underlying.materialize().astype(np.float64)
        z = pts.reshape(self.num_seeds, self.n, self.resolution)
        return z.sum(axis=2) / math.sqrt(self.resolution)

    def marginal_values(self) -> np.ndarray:
        """Support of one coordinate's marginal (inverse_cdf only)."""
        if self.method != "inverse_cdf":
            raise ConfigurationError("defined for inverse_cdf spaces")
        q = self.resolution
        return ndtri((np.arange(q, dtype=np.float64) + 0.5) / q)


def _random_seed_ints(rng: np.random.Generator, count: int, bits: int) -> list[int]:
    """Uniform Python ints below 2^bits, drawn 32 bits at a time."""
    words = (bits + 31) // 32
    raw = rng.integers(0, 1 << 32, size=(count, words), dtype=np.uint64)
    out = []
    mask = (1 << bits) - 1
    for row in raw:
        v = 0
        for w in row:
            v = (v << 32) | int(w)
        out.append(v & mask)
    return out


def build_kwise_gaussian(n: int, k: int, method: str = "inverse_cdf",
                         resolution: Optional[int] = None,
                         variance_tol: float = config.GAUSSIAN_VARIANCE_TOL
                         ) -> GaussianSpace:
    """Construct a k-wise independent Gaussian space on R^n."""
    if not 1 <= k:
        raise InvalidOrderError("k must be >= 1")
    if method == "inverse_cdf":
        q = config.GAUSSIAN_LEVELS_DEFAULT if resolution is None else resolution
        if q < 16:
            raise ConfigurationError("resolution must be >= 16")
        if q & (q - 1):
            raise ConfigurationError("inverse_cdf resolution must be a power of 2")
        lev_bits = q.bit_length() - 1
        need_pts = max(1, math.ceil(math.log2(n))) if n > 1 else 1
        m = max(lev_bits, need_pts)
        gs = GaussianSpace(n=n, k_claimed=k, method="inverse_cdf",
                           resolution=q, m=m,
                           eval_points=tuple(gf_elements(n, m)),
                           seed_bits=k * m)
        z = gs.marginal_values()
        var = float(np.mean(z * z))
        if abs(var - 1.0) > variance_tol:
            raise ConfigurationError(
                f"resolution q={q} gives marginal variance {var:.4f}, "
                f"outside 1 ± {variance_tol}")
        return gs
    if method == "binomial_sum":
        N = config.BINOMIAL_N_DEFAULT if resolution is None else resolution
        if N < 16:
            raise ConfigurationError("resolution must be >= 16")
        order = min(2 * k, n * N)
        cons = _bch_construction(n * N, order)
        return GaussianSpace(n=n, k_claimed=k, method="binomial_sum",
                             resolution=N, underlying=cons,
                             seed_bits=cons.seed_bits)
    raise ConfigurationError(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# file format

# header: `n k num_points weighted:{0,1}`; one point per line as ±1
# integers, with a trailing exact fraction `p/q` when weighted.


def dump_sample_space(space: SampleSpace, path) -> None:
    weighted = space.weights is not None
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{space.n} {space.k_claimed} {space.num_points} "
                 f"weighted:{int(weighted)}\n")
        for idx in range(space.num_points):
            coords = " ".join(str(int(v)) for v in space.points[idx])
            if weighted:
                w = space.weights[idx]
                fh.write(f"{coords} {w.numerator}/{w.denominator}\n")
            else:
                fh.write(coords + "\n")


def load_sample_space(path) -> SampleSpace:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 4 or not header[3].startswith("weighted:"):
            raise FormatError("bad sample-space header")
        n, k, num = int(header[0]), int(header[1]), int(header[2])
        weighted = header[3] == "weighted:1"
        points = np.empty((num, n), dtype=np.int8)
        weights: Optional[list[Fraction]] = [] if weighted else None
        for idx in range(num):
            parts = fh.readline().split()
            expect = n + (1 if weighted else 0)
            if len(parts) != expect:
                raise FormatError(f"point line {idx} has {len(parts)} fields, "
                                  f"expected {expect}")
            points[idx] = [int(v) for v in parts[:n]]
            if weighted:
                weights.append(Fraction(parts[n]))
    return SampleSpace(n=n, k_claimed=k, points=points, weights=weights,
                       method="file")
