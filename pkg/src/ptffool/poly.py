"""Degree-2 polynomials over ±1 variables and their spectral anatomy.

The central type stores p(x) = C + <linear, x> + x^T A x with A exactly
symmetric; the coefficient of x_i x_j for i < j is a_{ij} = 2 A_{ij}, and
diagonal entries multiply x_i^2.  On the hypercube x_i^2 = 1, so the
diagonal folds into the constant; the fold is tracked explicitly because
the moment bounds downstream are stated in terms of tr(A).

Also here: influences and regularity, the critical index of the sorted
influence sequence, a cyclic Jacobi eigensolver, and the three-way
spectral split of the quadratic part into eigenvalue bands (at or above
delta, at or below -delta, and the small middle band).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import config
from .errors import (ConfigurationError, ContractViolationError,
                     ConvergenceError, DecompositionCorruptError,
                     DegenerateInputError, FormatError, ResourceBudgetError)


def sgn(value: float) -> float:
    """Sign with sgn(0) = +1: -1 for negative arguments and 1 otherwise."""
    return -1.0 if value < 0 else 1.0


def sgn_vec(values: np.ndarray) -> np.ndarray:
    """Vectorized sgn with the same convention, as an int8 array."""
    return np.where(np.asarray(values) < 0, -1, 1).astype(np.int8)


@dataclass
class DegTwoPoly:
    """p(x) = constant + <linear, x> + x^T quad x, quad symmetric."""

    n: int
    constant: float = 0.0
    linear: Optional[np.ndarray] = None
    quad: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.linear is None:
            self.linear = np.zeros(self.n)
        self.linear = np.asarray(self.linear, dtype=np.float64)
        if self.linear.shape != (self.n,):
            raise ConfigurationError("linear must have shape (n,)")
        if self.quad is None:
            self.quad = np.zeros((self.n, self.n))
        q = np.asarray(self.quad, dtype=np.float64)
        if q.shape != (self.n, self.n):
            raise ConfigurationError("quad must have shape (n, n)")
        if not np.array_equal(q, q.T):
            raise ContractViolationError("quad must be exactly symmetric")
        # Canonical storage: rebuild from the upper triangle so both
        # halves are bit-identical regardless of how q was assembled.
        upper = np.triu(q)
        self.quad = upper + np.triu(q, k=1).T

    # -- construction helpers

    @classmethod
    def from_terms(cls, n: int, constant: float = 0.0,
                   linear: Optional[dict[int, float]] = None,
                   quad_terms: Optional[dict[tuple[int, int], float]] = None
                   ) -> "DegTwoPoly":
        """Build from sparse coefficients of the monomial basis.

        ``quad_terms[(i, j)]`` with i < j is the coefficient of x_i x_j;
        (i, i) is the coefficient of x_i^2.
        """
        lin = np.zeros(n)
        for i, v in (linear or {}).items():
            lin[i] = v
        quad = np.zeros((n, n))
        for (i, j), v in (quad_terms or {}).items():
            if i > j:
                i, j = j, i
            if i == j:
                quad[i, i] = v
            else:
                quad[i, j] = v / 2.0
                quad[j, i] = v / 2.0
        return cls(n=n, constant=constant, linear=lin, quad=quad)

    # -- views

    def trace_fold(self) -> float:
        """The constant absorbed from the diagonal on the hypercube."""
        return float(np.trace(self.quad))

    def fourier(self) -> dict[tuple[int, ...], float]:
        """Multilinear Fourier coefficients on {-1,1}^n, keyed by sorted
        index tuples; the empty tuple holds constant + trace fold."""
        coeffs: dict[tuple[int, ...], float] = {}
        empty = self.constant + self.trace_fold()
        if empty != 0.0:
            coeffs[()] = empty
        for i in range(self.n):
            if self.linear[i] != 0.0:
                coeffs[(i,)] = float(self.linear[i])
        for i in range(self.n):
            for j in range(i + 1, self.n):
                a = 2.0 * self.quad[i, j]
                if a != 0.0:
                    coeffs[(i, j)] = a
        return coeffs

    @classmethod
    def from_fourier(cls, n: int, coeffs: dict[tuple[int, ...], float]
                     ) -> "DegTwoPoly":
        """Inverse of :meth:`fourier` (fold lands in the constant)."""
        constant = 0.0
        lin: dict[int, float] = {}
        quad: dict[tuple[int, int], float] = {}
        for subset, v in coeffs.items():
            subset = tuple(sorted(subset))
            if len(subset) == 0:
                constant = v
            elif len(subset) == 1:
                lin[subset[0]] = v
            elif len(subset) == 2:
                quad[subset] = v
            else:
                raise ConfigurationError("degree > 2 coefficient")
        return cls.from_terms(n, constant, lin, quad)

    # -- evaluation

    def evaluate(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(self.constant + self.linear @ x + x @ self.quad @ x)

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Values at the rows of X, vectorized."""
        X = np.asarray(X, dtype=np.float64)
        return (self.constant + X @ self.linear
                + np.einsum("ri,ij,rj->r", X, self.quad, X))

    def evaluate_multilinear(self, x: np.ndarray) -> float:
        """Value of the multilinear extension (x_i^2 replaced by 1).

        Coincides with :meth:`evaluate` on ±1 points; differs off the
        cube, which is what the Gaussian surrogate comparisons need.
        """
        x = np.asarray(x, dtype=np.float64)
        off = self.quad - np.diag(np.diag(self.quad))
        return float(self.constant + self.trace_fold()
                     + self.linear @ x + x @ off @ x)

    def evaluate_multilinear_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        off = self.quad - np.diag(np.diag(self.quad))
        return (self.constant + self.trace_fold() + X @ self.linear
                + np.einsum("ri,ij,rj->r", X, off, X))

    # -- restriction

    def restrict(self, var: int, value: int) -> "DegTwoPoly":
        """Substitute x_var = value (±1); the variable leaves the support."""
        if value not in (-1, 1):
            raise ConfigurationError("restriction value must be ±1")
        lin = self.linear.copy()
        quad = self.quad.copy()
        const = self.constant + value * lin[var] + quad[var, var]
        lin = lin + 2.0 * value * quad[:, var]
        lin[var] = 0.0
        quad[var, :] = 0.0
        quad[:, var] = 0.0
        return DegTwoPoly(n=self.n, constant=const, linear=lin, quad=quad)

    def scale(self, factor: float) -> "DegTwoPoly":
        return DegTwoPoly(n=self.n, constant=self.constant * factor,
                          linear=self.linear * factor,
                          quad=self.quad * factor)


# --------------------------------------------------------------------------
# influences, regularity, critical index


def influences(p: DegTwoPoly) -> tuple[np.ndarray, float]:
    """Per-variable influences and their total.

    Inf_i sums the squared Fourier coefficients of all sets containing
    i: the linear weight plus every incident off-diagonal pair weight.
    """
    pair = 2.0 * (p.quad - np.diag(np.diag(p.quad)))
    inf = p.linear ** 2 + np.sum(pair ** 2, axis=1)
    return inf, float(np.sum(inf))


@dataclass
class RegularityReport:
    is_regular: bool
    max_ratio: float
    tau: float


def regularity(p: DegTwoPoly, tau: float) -> RegularityReport:
    inf, total = influences(p)
    if total == 0.0:
        raise DegenerateInputError("constant polynomial has no influences")
    ratio = float(np.max(inf) / total)
    return RegularityReport(is_regular=ratio <= tau, max_ratio=ratio, tau=tau)


@dataclass
class CriticalIndexResult:
    """Critical index of the sorted influence sequence.

    ``index`` follows the total convention (a zero numerator counts as
    ratio 0, so an index always exists, at most n).  ``no_finite_index``
    flags the runs where no index strictly before the last nonzero
    influence qualifies, which the stricter convention would call +inf.
    """

    index: int
    no_finite_index: bool
    order: np.ndarray          # permutation sorting influences descending
    ratios: np.ndarray         # ratio sequence, length n+1
    tau: float


def critical_index(p: DegTwoPoly, tau: float) -> CriticalIndexResult:
    inf, total = influences(p)
    if total == 0.0:
        raise DegenerateInputError("constant polynomial has no influences")
    order = np.argsort(-inf, kind="stable")
    s = inf[order]
    n = p.n
    tails = np.concatenate([np.cumsum(s[::-1])[::-1], [0.0]])
    ratios = np.zeros(n + 1)
    for i in range(n + 1):
        num = s[i] if i < n else 0.0
        ratios[i] = 0.0 if num == 0.0 else num / tails[i]
    qualifying = np.nonzero(ratios <= tau)[0]
    index = int(qualifying[0])
    last_nonzero = int(np.count_nonzero(s))
    return CriticalIndexResult(index=index,
                               no_finite_index=index >= last_nonzero,
                               order=order, ratios=ratios, tau=tau)


# --------------------------------------------------------------------------
# eigendecomposition (cyclic Jacobi)


@dataclass
class EigenDecomposition:
    eigenvalues: np.ndarray     # sorted descending
    eigenvectors: np.ndarray    # columns matching eigenvalues

    def reconstruct(self) -> np.ndarray:
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T

    def check(self, A: np.ndarray, tol: float = config.EIGEN_CHECK_TOL) -> bool:
        Q = self.eigenvectors
        ortho = np.max(np.abs(Q.T @ Q - np.eye(Q.shape[0])))
        recon = np.max(np.abs(self.reconstruct() - A))
        return ortho <= tol and recon <= tol


def frobenius(A: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.asarray(A, dtype=np.float64) ** 2)))


def eigendecompose_symmetric(A: np.ndarray,
                             tol_rel: float = config.EIGEN_OFFDIAG_REL,
                             max_sweeps: int = config.EIGEN_MAX_SWEEPS
                             ) -> EigenDecomposition:
    """Cyclic Jacobi iteration on a symmetric matrix.

    Sweeps rotate away every off-diagonal pair in turn until the
    off-diagonal Frobenius mass falls below tol_rel times the input
    norm.  Transparent and adequate for the matrix sizes here; the sweep
    cap guards against pathological non-convergence.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractViolationError("square matrix required")
    n = A.shape[0]
    if n > config.EIGEN_MAX_N:
        raise ResourceBudgetError(f"n={n} exceeds eigensolver cap "
                                  f"{config.EIGEN_MAX_N}")
    scale = frobenius(A)
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(scale, 1.0)):
        raise ContractViolationError("matrix is not symmetric")
    A = 0.5 * (A + A.T)

    B = A.copy()
    V = np.eye(n)
    if scale == 0.0 or n == 1:
        vals = np.diag(B).copy()
        order = np.argsort(-vals, kind="stable")
        return EigenDecomposition(vals[order], V[:, order])

    for _ in range(max_sweeps):
        # Off-diagonal Frobenius norm, summed directly: the tempting
        # ||B||_F^2 - sum(diag^2) shortcut has a cancellation floor near
        # sqrt(eps)*||A|| and can never meet a 1e-12 relative threshold.
        off = frobenius(B - np.diag(np.diag(B)))
        if off <= tol_rel * scale:
            break
        for piv in range(n - 1):
            for qiv in range(piv + 1, n):
                apq = B[piv, qiv]
                if abs(apq) <= 1e-300:
                    continue
                theta = (B[qiv, qiv] - B[piv, piv]) / (2.0 * apq)
                t = (math.copysign(1.0, theta)
                     / (abs(theta) + math.hypot(1.0, theta)))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # two-sided rotation on (piv, qiv)
                bp = B[:, piv].copy()
                bq = B[:, qiv].copy()
                B[:, piv] = c * bp - s * bq
                B[:, qiv] = s * bp + c * bq
                bp = B[piv, :].copy()
                bq = B[qiv, :].copy()
                B[piv, :] = c * bp - s * bq
                B[qiv, :] = s * bp + c * bq
                B[piv, qiv] = 0.0
                B[qiv, piv] = 0.0
                vp = V[:, piv].copy()
                vq = V[:, qiv].copy()
                V[:, piv] = c * vp - s * vq
                V[:, qiv] = s * vp + c * vq
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    vals = np.diag(B).copy()
    order = np.argsort(-vals, kind="stable")
    return EigenDecomposition(vals[order], V[:, order])


# --------------------------------------------------------------------------
# matrix facts


@dataclass
class MatrixFacts:
    frobenius: float
    trace: float
    lambda_min_nonzero: float
    lambda_max_magnitude: float
    is_psd: bool
    small_constant_check: Optional[bool]   # None when precondition unmet


def matrix_facts(A: np.ndarray, zero_tol_rel: float = 1e-12) -> MatrixFacts:
    """Norms, extreme eigenvalues, and the trace-vs-gap inequality.

    ``lambda_min_nonzero`` is the smallest magnitude among nonzero
    eigenvalues, with zero meaning the matrix vanishes; eigenvalues
    within zero_tol_rel of zero (relative to the largest magnitude)
    count as zero.  For PSD matrices with a gap, the check asserts
    |tr(A)| <= ||A||_F^2 / lambda_min_nonzero.
    """
    A = np.asarray(A, dtype=np.float64)
    fro = frobenius(A)
    tr = float(np.trace(A))
    dec = eigendecompose_symmetric(A)
    mags = np.abs(dec.eigenvalues)
    lam_max = float(np.max(mags)) if mags.size else 0.0
    zero_tol = zero_tol_rel * max(lam_max, 1e-300)
    nonzero = mags[mags > zero_tol]
    lam_min = float(np.min(nonzero)) if nonzero.size else 0.0
    is_psd = bool(np.all(dec.eigenvalues >= -zero_tol))
    check = None
    if is_psd and lam_min > 0.0:
        check = abs(tr) <= fro ** 2 / lam_min + 1e-9
    return MatrixFacts(frobenius=fro, trace=tr, lambda_min_nonzero=lam_min,
                       lambda_max_magnitude=lam_max, is_psd=is_psd,
                       small_constant_check=check)


# --------------------------------------------------------------------------
# spectral decomposition


@dataclass
class SpectralDecomposition:
    """Three-way split of the quadratic part by eigenvalue band.

    p = p1 - p2 + p3 + p4 + C with p1, p2 PSD forms whose nonzero
    eigenvalues are at least delta, p3 carrying the middle band
    (spectral magnitude below delta), p4 the linear part.  Upsilon is
    the trace of the middle band's matrix.
    """

    n: int
    delta: float
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    linear: np.ndarray
    constant: float
    upsilon: float
    eigen: EigenDecomposition = field(repr=False)

    def part_value(self, which: int, x: np.ndarray) -> float:
        A = (self.a1, self.a2, self.a3)[which - 1]
        x = np.asarray(x, dtype=np.float64)
        return float(x @ A @ x)

    def reconstruction(self) -> np.ndarray:
        return self.a1 - self.a2 + self.a3

    def invariant_report(self, quad: np.ndarray) -> dict:
        """The four structural invariants, evaluated numerically."""
        tie = config.SPECTRAL_TIE_TOL
        out = {}
        for name, mat, sign in (("a1", self.a1, +1), ("a2", self.a2, +1)):
            vals = eigendecompose_symmetric(mat).eigenvalues
            nz = vals[np.abs(vals) > 1e-9 * max(1.0, float(np.max(np.abs(vals), initial=0.0)))]
            out[f"{name}_psd"] = bool(np.all(vals >= -1e-10))
            out[f"{name}_gap_ok"] = bool(np.all(nz >= self.delta - tie - 1e-10)) if nz.size else True
        vals3 = eigendecompose_symmetric(self.a3).eigenvalues
        lam3 = float(np.max(np.abs(vals3))) if vals3.size else 0.0
        out["a3_below_delta"] = lam3 < self.delta + tie + 1e-10
        fq = frobenius(quad)
        out["norms_bounded"] = (frobenius(self.a1) <= fq + 1e-12
                                and frobenius(self.a2) <= fq + 1e-12
                                and frobenius(self.a3) <= fq + 1e-12)
        out["reconstructs"] = bool(np.max(np.abs(self.reconstruction() - quad),
                                          initial=0.0)
                                   <= config.SPECTRAL_RECONSTRUCT_TOL)
        return out


def spectral_decompose(p: DegTwoPoly, delta: float) -> SpectralDecomposition:
    """Split p's quadratic part into eigenvalue bands around ±delta.

    Eigenvalues within SPECTRAL_TIE_TOL of ±delta are routed to the
    middle band so the PSD parts keep a strict gap.
    """
    if delta <= 0:
        raise ConfigurationError("delta must be positive")
    dec = eigendecompose_symmetric(p.quad)
    vals, Q = dec.eigenvalues, dec.eigenvectors
    tie = config.SPECTRAL_TIE_TOL
    near_split = (np.abs(vals - delta) <= tie) | (np.abs(vals + delta) <= tie)
    pos = (vals >= delta) & ~near_split
    neg = (vals <= -delta) & ~near_split
    mid = ~(pos | neg)

    def build(mask: np.ndarray, flip: bool) -> np.ndarray:
        if not np.any(mask):
            return np.zeros((p.n, p.n))
        sel = Q[:, mask]
        lam = vals[mask] * (-1.0 if flip else 1.0)
        M = (sel * lam) @ sel.T
        return 0.5 * (M + M.T)

    a1 = build(pos, flip=False)
    a2 = build(neg, flip=True)
    a3 = build(mid, flip=False)
    upsilon = float(np.sum(vals[mid])) if np.any(mid) else 0.0
    return SpectralDecomposition(n=p.n, delta=delta, a1=a1, a2=a2, a3=a3,
                                 linear=p.linear.copy(), constant=p.constant,
                                 upsilon=upsilon, eigen=dec)


def evaluate_mp(dec: SpectralDecomposition, x: np.ndarray) -> np.ndarray:
    """The four-coordinate evaluation map of a decomposed polynomial:
    (sqrt(p1), sqrt(p2), p3 - Upsilon, p4).

    The PSD parts are nonnegative up to roundoff; tiny negatives are
    clamped, materially negative values mean the decomposition is
    corrupt and raise.
    """
    x = np.asarray(x, dtype=np.float64)
    vals = []
    for which in (1, 2):
        v = dec.part_value(which, x)
        if v < config.SQRT_CLAMP_FLOOR:
            raise DecompositionCorruptError(
                f"PSD part {which} evaluated to {v}, below the clamp floor")
        vals.append(math.sqrt(max(v, 0.0)))
    vals.append(dec.part_value(3, x) - dec.upsilon)
    vals.append(float(dec.linear @ x))
    return np.array(vals)


# --------------------------------------------------------------------------
# file format

# Line 1: n.  Then `C <value>`, `L i <value>`, `Q i j <value>` with
# 1-based indices, i <= j; Q i j holds the coefficient of x_i x_j
# (i == j: the coefficient of x_i^2).


def dumps_poly(p: DegTwoPoly) -> str:
    lines = [f"{p.n}", f"C {float(p.constant)!r}"]
    for i in range(p.n):
        if p.linear[i] != 0.0:
            lines.append(f"L {i + 1} {float(p.linear[i])!r}")
    for i in range(p.n):
        for j in range(i, p.n):
            coef = p.quad[i, i] if i == j else 2.0 * p.quad[i, j]
            if coef != 0.0:
                lines.append(f"Q {i + 1} {j + 1} {float(coef)!r}")
    return "\n".join(lines) + "\n"


def dump_poly(p: DegTwoPoly, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_poly(p))


def loads_poly(text: str) -> DegTwoPoly:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty polynomial text")
    first = lines[0].split()
    if len(first) != 1:
        raise FormatError("first line must be the dimension n")
    try:
        n = int(first[0])
    except ValueError:
        raise FormatError("first line must be the dimension n") from None
    constant = 0.0
    linear: dict[int, float] = {}
    quad: dict[tuple[int, int], float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        tag = parts[0]
        try:
            if tag == "C" and len(parts) == 2:
                constant = float(parts[1])
            elif tag == "L" and len(parts) == 3:
                idx = int(parts[1]) - 1
                if not 0 <= idx < n:
                    raise FormatError(f"line {lineno}: index out of range")
                linear[idx] = float(parts[2])
            elif tag == "Q" and len(parts) == 4:
                i, j = int(parts[1]) - 1, int(parts[2]) - 1
                if not (0 <= i <= j < n):
                    raise FormatError(f"line {lineno}: need 1 <= i <= j <= n")
                quad[(i, j)] = float(parts[3])
            else:
                raise FormatError(f"line {lineno}: unrecognized record")
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    return DegTwoPoly.from_terms(n, constant, linear, quad)


def load_poly(path) -> DegTwoPoly:
    with open(path, "r", encoding="ascii") as fh:
        return loads_poly(fh.read())
