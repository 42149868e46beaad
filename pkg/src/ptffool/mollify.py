"""Fourier-side mollification: the bump, its transform, and the smoothing
kernel built from it.

The bump b(x) = sqrt(C_d)(1 - |x|^2) lives on the unit ball, normalized
so its L2 norm is 1.  Its transform g = b-hat is radial; the smoothing
kernel is B = g^2, nonnegative with unit integral by Plancherel, and
B_c(x) = c^d B(cx) concentrates it at scale 1/c.  Convolving an
indicator with B_c yields a smooth surrogate whose derivative norms and
approximation error this module computes and checks.

Evaluation paths, deliberately redundant:

* d = 1 has the elementary closed form for g, with a short Taylor
  series below |t| = 1e-2 where (sin t - t cos t)/t^3 cancels.
* d >= 2 integrates the Bessel kernel over the ball radius (the
  primary path for ``bhat_value``).
* All d also admit a one-term Bessel closed form, used as the
  cross-check oracle and as the workhorse inside integrals, where it
  is far cheaper than nested quadrature.

Derivatives of B are analytic, never finite differences: a radial
function's partials expand into monomial-times-radial terms where each
radial factor is again a closed-form Bessel expression, and B's
derivatives follow by the product rule on g*g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iter_product
from typing import Optional, Sequence

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import jv as _besselj
from scipy.special import roots_legendre

from . import config
from .errors import ConfigurationError, InconclusiveError

_SERIES_CUTOFF = config.BHAT_SERIES_CUTOFF
_SERIES_TERMS = config.BHAT_SERIES_TERMS


def bump_norm_const(d: int) -> float:
    """C_d = Gamma(d/2) d(d+2)(d+4) / (16 pi^{d/2}); makes ||b||_2 = 1."""
    if d < 1:
        raise ConfigurationError("dimension must be at least 1")
    return float(_gamma(d / 2.0) * d * (d + 2) * (d + 4)
                 / (16.0 * math.pi ** (d / 2.0)))


def bump_value(d: int, x) -> float:
    """b(x) = sqrt(C_d)(1 - |x|^2) inside the unit ball, 0 outside."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    r2 = float(np.dot(x, x))
    if r2 >= 1.0:
        return 0.0
    return math.sqrt(bump_norm_const(d)) * (1.0 - r2)


def sphere_surface(d: int) -> float:
    """Surface measure of the unit sphere in R^d."""
    return float(2.0 * math.pi ** (d / 2.0) / _gamma(d / 2.0))


@lru_cache(maxsize=64)
def _gl_nodes(npts: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(npts)
    return x, w


def _panel_quad(f, lo: float, hi: float, panel: float, npts: int) -> float:
    """Composite Gauss-Legendre of a vectorized f over [lo, hi]."""
    if hi <= lo:
        return 0.0
    x, w = _gl_nodes(npts)
    total = []
    edges = np.arange(lo, hi, panel)
    for a in edges:
        b = min(a + panel, hi)
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        total.append(half * float(np.dot(w, f(mid + half * x))))
    return math.fsum(total)


# --------------------------------------------------------------------------
# the transform g = b-hat


def _bhat_series(d: int, rho: np.ndarray) -> np.ndarray:
    # Power series of 2 sqrt(C_d) J_nu(rho)/rho^nu at nu = d/2 + 1;
    # this is also the t -> 0 limit path for the d = 1 closed form.
    nu = d / 2.0 + 1.0
    out = np.zeros_like(rho)
    for j in range(_SERIES_TERMS):
        term = ((-1.0) ** j / (2.0 ** (2 * j + nu)
                               * math.factorial(j) * _gamma(j + nu + 1.0)))
        out = out + term * rho ** (2 * j)
    return 2.0 * math.sqrt(bump_norm_const(d)) * out


def bhat_closed_form(d: int, t) -> np.ndarray:
    """g(|t|) = 2 sqrt(C_d) J_{d/2+1}(|t|) / |t|^{d/2+1}, any d.

    Series fallback near zero.  This is the oracle the quadrature path
    is checked against, and the evaluator every integral here uses.
    """
    rho = np.abs(np.atleast_1d(np.asarray(t, dtype=np.float64)))
    nu = d / 2.0 + 1.0
    out = np.empty_like(rho)
    small = rho < _SERIES_CUTOFF
    if np.any(small):
        out[small] = _bhat_series(d, rho[small])
    big = ~small
    if np.any(big):
        r = rho[big]
        out[big] = (2.0 * math.sqrt(bump_norm_const(d))
                    * _besselj(nu, r) / r ** nu)
    return out


def _bhat_quadrature(d: int, rho: np.ndarray) -> np.ndarray:
    # Radial Bessel-kernel integral over the ball radius:
    # g(rho) = sqrt(C_d) rho^{1-d/2} int_0^1 (1-r^2) J_{d/2-1}(rho r) r^{d/2} dr
    nu = d / 2.0 - 1.0
    npts = 96
    x, w = _gl_nodes(npts)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w
    kern = (1.0 - r ** 2) * r ** (d / 2.0)
    out = np.empty_like(rho)
    for i, p in enumerate(rho):
        vals = _besselj(nu, p * r) * kern
        out[i] = (math.sqrt(bump_norm_const(d)) * p ** (1.0 - d / 2.0)
                  * float(np.dot(wr, vals)))
    return out


def bhat_value(d: int, t) -> float:
    """The transform of the bump at t (radial; t may be scalar or vector).

    d = 1 uses the elementary closed form 4 sqrt(C_1/(2 pi))
    (sin t - t cos t)/t^3; d in {2,3,4} integrates the Bessel kernel
    radially.  Both run the series below |t| = 1e-2.
    """
    if d > 4:
        raise ConfigurationError("transform evaluation is supported for d <= 4")
    tv = np.atleast_1d(np.asarray(t, dtype=np.float64))
    rho = float(np.linalg.norm(tv)) if tv.ndim == 1 and tv.size == d \
        else float(np.abs(tv[0]))
    if d == 1:
        if rho < _SERIES_CUTOFF:
            return float(_bhat_series(1, np.array([rho]))[0])
        c1 = bump_norm_const(1)
        return float(math.sqrt(c1 / (2.0 * math.pi)) * 4.0
                     * (math.sin(rho) - rho * math.cos(rho)) / rho ** 3)
    if rho < _SERIES_CUTOFF:
        return float(_bhat_series(d, np.array([rho]))[0])
    return float(_bhat_quadrature(d, np.array([rho]))[0])


def kernel_value(d: int, x) -> float:
    """B(x) = g(|x|)^2: nonnegative, unit integral."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    rho = float(np.linalg.norm(x))
    return float(bhat_closed_form(d, rho)[0] ** 2)


def _kernel_radial(d: int, rho: np.ndarray) -> np.ndarray:
    return bhat_closed_form(d, rho) ** 2


def _kernel_tail_envelope(d: int) -> float:
    """Constant E with B(rho) <= E rho^{-(d+3)} for rho >~ 1 (asymptotic
    Bessel envelope |J_nu| <= sqrt(2/(pi rho)); an estimate, not a proof)."""
    return 4.0 * bump_norm_const(d) * 2.0 / math.pi


def _radial_tail_mass(d: int, L: float) -> float:
    """Envelope estimate of the kernel mass beyond radius L."""
    if L <= 1.0:
        return math.inf
    return sphere_surface(d) * _kernel_tail_envelope(d) / (3.0 * L ** 3)


# --------------------------------------------------------------------------
# unit integral


@dataclass
class UnitIntegralReport:
    d: int
    c: float
    value: float
    abs_error: float
    tail_estimate: float
    method: str
    passed: bool


def check_unit_integral(d: int, c: float = 1.0,
                        full_grid: bool = False) -> UnitIntegralReport:
    """Integral of B_c over R^d, which should be 1 (pass at 1e-3).

    Scale drops out exactly under substitution, so c only relabels the
    grid.  The radial path works for d <= 4; full_grid uses tensor
    Gauss-Legendre over a box (d <= 3) as the independent slow path.
    """
    if c <= 0:
        raise ConfigurationError("scale must be positive")
    if full_grid:
        if d > 3:
            raise ConfigurationError("full-grid quadrature limited to d <= 3")
        L = 30.0
        per_panel = 8
        edges = np.arange(0.0, L, 1.0)
        x, w = _gl_nodes(per_panel)
        nodes = np.concatenate([0.5 * (a + min(a + 1.0, L))
                                + 0.5 * (min(a + 1.0, L) - a) * x
                                for a in edges])
        wts = np.concatenate([0.5 * (min(a + 1.0, L) - a) * w for a in edges])
        grids = np.meshgrid(*([nodes] * d), indexing="ij")
        rho = np.sqrt(sum(g ** 2 for g in grids))
        wprod = np.ones_like(rho)
        for axis in range(d):
            shape = [1] * d
            shape[axis] = wts.size
            wprod = wprod * wts.reshape(shape)
        value = (2.0 ** d) * float(np.sum(_kernel_radial(d, rho.ravel())
                                          * wprod.ravel()))
        tail = _radial_tail_mass(d, L)
        method = "full_grid"
    else:
        if d > 4:
            raise ConfigurationError("radial quadrature limited to d <= 4")
        L = 200.0
        surf = sphere_surface(d)
        value = surf * _panel_quad(
            lambda r: _kernel_radial(d, r) * r ** (d - 1), 0.0, L, 1.0, 12)
        tail = _radial_tail_mass(d, L)
        method = "radial"
    err = abs(value - 1.0)
    return UnitIntegralReport(d=d, c=c, value=value, abs_error=err,
                              tail_estimate=tail, method=method,
                              passed=err <= 1e-3)


# --------------------------------------------------------------------------
# derivatives of the kernel, analytically


def _psi_values(d: int, m: int, rho: np.ndarray) -> np.ndarray:
    """m-fold (1/rho d/drho) of g, closed form: the Bessel order shifts
    up by m with alternating sign."""
    nu = d / 2.0 + 1.0 + m
    out = np.empty_like(rho)
    small = rho < _SERIES_CUTOFF
    if np.any(small):
        acc = np.zeros_like(rho[small])
        for j in range(_SERIES_TERMS):
            term = ((-1.0) ** j / (2.0 ** (2 * j + nu)
                                   * math.factorial(j) * _gamma(j + nu + 1.0)))
            acc = acc + term * rho[small] ** (2 * j)
        out[small] = acc
    big = ~small
    if np.any(big):
        r = rho[big]
        out[big] = _besselj(nu, r) / r ** nu
    return 2.0 * math.sqrt(bump_norm_const(d)) * ((-1.0) ** m) * out


def _radial_deriv_terms(alpha: Sequence[int]) -> dict[tuple[tuple[int, ...], int], float]:
    """Expand the partial derivative of a radial function into terms.

    Keys are (monomial exponents, radial order m), values are
    coefficients: the derivative equals sum coeff * x^mono * psi_m(rho).
    Built by repeated product rule from the base term x^0 psi_0.
    """
    d = len(alpha)
    terms: dict[tuple[tuple[int, ...], int], float] = {((0,) * d, 0): 1.0}
    for axis, count in enumerate(alpha):
        for _ in range(count):
            nxt: dict[tuple[tuple[int, ...], int], float] = {}
            for (mono, m), cf in terms.items():
                if mono[axis] > 0:
                    down = mono[:axis] + (mono[axis] - 1,) + mono[axis + 1:]
                    key = (down, m)
                    nxt[key] = nxt.get(key, 0.0) + cf * mono[axis]
                up = mono[:axis] + (mono[axis] + 1,) + mono[axis + 1:]
                key = (up, m + 1)
                nxt[key] = nxt.get(key, 0.0) + cf
            terms = nxt
    return terms


def bhat_partial(d: int, alpha: Sequence[int], points: np.ndarray) -> np.ndarray:
    """Partial derivative of the transform at the given points (rows)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    rho = np.linalg.norm(pts, axis=1)
    out = np.zeros(pts.shape[0])
    for (mono, m), cf in _radial_deriv_terms(alpha).items():
        vals = _psi_values(d, m, rho) * cf
        for axis, e in enumerate(mono):
            if e:
                vals = vals * pts[:, axis] ** e
        out += vals
    return out


def _multi_indices_leq(beta: Sequence[int]):
    return iter_product(*(range(b + 1) for b in beta))


def kernel_partial(d: int, beta: Sequence[int], points: np.ndarray) -> np.ndarray:
    """Partial derivative of B = g^2 by the product rule over transforms."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    out = np.zeros(pts.shape[0])
    for alpha in _multi_indices_leq(beta):
        comb = 1.0
        for bi, ai in zip(beta, alpha):
            comb *= math.comb(bi, ai)
        rest = tuple(b - a for b, a in zip(beta, alpha))
        out += comb * bhat_partial(d, alpha, pts) * bhat_partial(d, rest, pts)
    return out


@dataclass
class DerivNormReport:
    d: int
    beta: tuple[int, ...]
    value: float
    bound_basic: float
    bound_improved: float
    tail_estimate: float
    inconclusive: bool
    passed: bool


def _deriv_tail_estimate(d: int, beta: Sequence[int], L: float) -> float:
    """Envelope estimate of the L1 mass of the kernel derivative beyond
    radius L.

    Each product term is bounded by |coeff| rho^{|mono|} times two
    radial envelopes 2 sqrt(C_d) sqrt(2/(pi rho)) rho^{-(d/2+1+m)};
    the resulting radial integral always decays at least like rho^-4.
    """
    amp = 2.0 * math.sqrt(bump_norm_const(d)) * math.sqrt(2.0 / math.pi)
    surf = sphere_surface(d)
    total = 0.0
    for alpha in _multi_indices_leq(beta):
        comb = 1.0
        for bi, ai in zip(beta, alpha):
            comb *= math.comb(bi, ai)
        rest = tuple(b - a for b, a in zip(beta, alpha))
        t1 = _radial_deriv_terms(alpha)
        t2 = _radial_deriv_terms(rest)
        for (mono1, m1), c1 in t1.items():
            for (mono2, m2), c2 in t2.items():
                power = sum(mono1) + sum(mono2)
                q = (d - 1) + power - (d + m1 + m2 + 3)
                # q = power - (m1 + m2) - 4 <= -4 since |mono| <= m
                integral = L ** (q + 1) / (-q - 1)
                total += abs(comb * c1 * c2) * amp * amp * integral
    return surf * total


def deriv_l1_norm(d: int, beta: Sequence[int]) -> DerivNormReport:
    """L1 norm of the kernel's partial derivative, with the explicit
    2^{|beta|} bound asserted and the factorial-improved bound reported.

    The norm is quadrature over a truncated ball plus an envelope tail
    estimate; if the estimate exceeds 10% of the bound the report is
    marked inconclusive and nothing is asserted.
    """
    beta = tuple(int(b) for b in beta)
    if len(beta) != d:
        raise ConfigurationError("multi-index length must equal the dimension")
    if any(b < 0 for b in beta):
        raise ConfigurationError("multi-index must be nonnegative")
    if sum(beta) > 3 or d > 2:
        raise ConfigurationError("supported range is |beta| <= 3, d <= 2")

    if d == 1:
        L = 80.0
        # |d^k B(-x)| = |d^k B(x)|, so integrate the half line twice.
        value = 2.0 * _panel_quad(
            lambda x: np.abs(kernel_partial(1, beta, x[:, None])),
            0.0, L, 1.0, 12)
    else:
        L = 50.0
        ntheta = 128
        theta = np.arange(ntheta) * (2.0 * math.pi / ntheta)
        omega = np.stack([np.cos(theta), np.sin(theta)], axis=1)

        def ring(r: np.ndarray) -> np.ndarray:
            pts = (r[:, None, None] * omega[None, :, :]).reshape(-1, 2)
            vals = np.abs(kernel_partial(2, beta, pts)).reshape(r.size, ntheta)
            return vals.mean(axis=1) * (2.0 * math.pi) * r

        value = _panel_quad(ring, 0.0, L, 1.0, 10)

    tail = _deriv_tail_estimate(d, beta, L)
    k = sum(beta)
    bound_basic = 2.0 ** k
    if k == 0:
        bound_improved = 1.0
    else:
        fact = 1.0
        for b in beta:
            fact *= math.factorial(b)
        bound_improved = 2.0 ** k * math.sqrt(fact * k ** (-float(k)))
    inconclusive = tail > 0.1 * bound_basic
    passed = (not inconclusive) and value <= bound_basic + 1e-9
    return DerivNormReport(d=d, beta=beta, value=value,
                           bound_basic=bound_basic,
                           bound_improved=bound_improved,
                           tail_estimate=tail, inconclusive=inconclusive,
                           passed=passed)


# --------------------------------------------------------------------------
# kernel tail mass


@dataclass
class TailMassReport:
    d: int
    z: float
    value: float                # kernel mass beyond radius d*z
    inside: float               # mass within radius d*z
    scaled: float               # value * z^2 (the curve being fitted)
    identity_gap: float         # |inside + value - 1|
    cap_estimate: float         # envelope mass beyond the quadrature cap


def tail_mass(d: int, z: float) -> TailMassReport:
    """Kernel mass outside radius d*z, radially integrated."""
    if z <= 0:
        raise ConfigurationError("z must be positive")
    if d > 2:
        raise ConfigurationError("tail mass supported for d <= 2")
    radius = d * z
    cap = max(4.0 * radius, 240.0)
    surf = sphere_surface(d)

    def shell(r: np.ndarray) -> np.ndarray:
        return _kernel_radial(d, r) * r ** (d - 1)

    inside = surf * _panel_quad(shell, 0.0, radius, 1.0, 12)
    outside = surf * _panel_quad(shell, radius, cap, 1.0, 12)
    return TailMassReport(d=d, z=z, value=outside, inside=inside,
                          scaled=outside * z ** 2,
                          identity_gap=abs(inside + outside - 1.0),
                          cap_estimate=_radial_tail_mass(d, cap))


def tail_mass_curve(d: int, zs: Sequence[float]) -> list[TailMassReport]:
    """Tail reports over a z grid, with monotone decrease asserted."""
    reports = [tail_mass(d, z) for z in sorted(zs)]
    for lo, hi in zip(reports, reports[1:]):
        if hi.value > lo.value + 1e-12:
            raise InconclusiveError("kernel tail failed to decrease in z")
    return reports


# --------------------------------------------------------------------------
# moments of the squared bump


@dataclass
class SquaredMomentReport:
    d: int
    alpha: tuple[int, ...]
    exact: float
    quadrature: float
    relative_gap: float


def squared_bump_moment(d: int, alpha: Sequence[int]) -> SquaredMomentReport:
    """The integral of x^alpha b(x)^2, exactly and by quadrature.

    Odd components force exact zero by symmetry.  Even alpha has the
    Gamma closed form

        C_d * 2 prod Gamma((a_i+1)/2) / Gamma((|a|+d)/2)
            * 8 / (a (a+2) (a+4)),   a = |alpha| + d.

    The quadrature side avoids Gamma entirely: the radial factor is a
    polynomial integral and the angular factor is a trapezoid sum
    (exact for trigonometric polynomials), so agreement is a real
    cross-check, expected to 1e-6 relative.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d:
        raise ConfigurationError("multi-index length must equal the dimension")
    if any(a < 0 for a in alpha):
        raise ConfigurationError("multi-index must be nonnegative")
    if d > 2:
        raise ConfigurationError("bump moments supported for d <= 2")
    cd = bump_norm_const(d)

    if any(a % 2 for a in alpha):
        exact = 0.0
    else:
        a_tot = sum(alpha) + d
        angular = 2.0
        for ai in alpha:
            angular *= _gamma((ai + 1) / 2.0)
        angular /= _gamma((sum(alpha) + d) / 2.0)
        radial = 8.0 / (a_tot * (a_tot + 2) * (a_tot + 4))
        exact = cd * angular * radial

    npts = max(16, sum(alpha) // 2 + 8)
    x, w = _gl_nodes(npts)
    if d == 1:
        r = x  # [-1, 1] directly; integrand is a polynomial there
        quad = cd * float(np.dot(w, r ** alpha[0] * (1.0 - r ** 2) ** 2))
    else:
        r = 0.5 * (x + 1.0)
        wr = 0.5 * w
        radial_q = float(np.dot(
            wr, r ** (sum(alpha) + 1) * (1.0 - r ** 2) ** 2))
        ntheta = 4 * (sum(alpha) + 4)
        theta = np.arange(ntheta) * (2.0 * math.pi / ntheta)
        ang_q = float(np.mean(np.cos(theta) ** alpha[0]
                              * np.sin(theta) ** alpha[1])) * 2.0 * math.pi
        quad = cd * radial_q * ang_q

    scale = max(abs(exact), 1e-30)
    return SquaredMomentReport(d=d, alpha=alpha, exact=exact, quadrature=quad,
                               relative_gap=abs(exact - quad) / scale)


# --------------------------------------------------------------------------
# mollified indicators


@dataclass(frozen=True)
class HalfLine:
    """{t : t >= theta} on the real line."""
    theta: float

    d = 1

    def indicator(self, y: np.ndarray) -> float:
        return 1.0 if float(np.atleast_1d(y)[0]) >= self.theta else 0.0

    def boundary_distance(self, x) -> float:
        return abs(float(np.atleast_1d(x)[0]) - self.theta)


@dataclass(frozen=True)
class Box:
    """Axis-aligned product of closed intervals."""
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ConfigurationError("box corners must share a dimension")
        if any(l >= h for l, h in zip(self.lo, self.hi)):
            raise ConfigurationError("box must have positive volume")

    @property
    def d(self) -> int:
        return len(self.lo)

    def indicator(self, y) -> float:
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        inside = all(l <= v <= h for v, l, h in zip(y, self.lo, self.hi))
        return 1.0 if inside else 0.0

    def boundary_distance(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if self.indicator(x):
            return min(min(v - l, h - v)
                       for v, l, h in zip(x, self.lo, self.hi))
        gaps = np.array([max(l - v, 0.0, v - h)
                         for v, l, h in zip(x, self.lo, self.hi)])
        return float(np.linalg.norm(gaps))


@dataclass(frozen=True)
class Quadrant:
    """{y : y_i >= corner_i for every i} in the plane."""
    corner: tuple[float, float]

    d = 2

    def indicator(self, y) -> float:
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        return 1.0 if bool(np.all(y >= np.asarray(self.corner))) else 0.0

    def boundary_distance(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        gaps = x - np.asarray(self.corner)
        if np.all(gaps >= 0.0):
            return float(np.min(gaps))
        return float(np.linalg.norm(np.minimum(gaps, 0.0)))


_CDF_CAP = 80.0


def kernel_cdf_1d(v: float) -> float:
    """Mass of the one-dimensional kernel over (-inf, v]."""
    if v <= -_CDF_CAP:
        return 0.0
    if v >= _CDF_CAP:
        return 1.0
    part = _panel_quad(lambda r: _kernel_radial(1, r), 0.0, abs(v), 1.0, 12)
    return 0.5 + math.copysign(part, v)


def kernel_cdf_2d(u: float, v: float) -> float:
    """Mass of the two-dimensional kernel over (-inf,u] x (-inf,v]."""
    L = 40.0
    if u <= -L or v <= -L:
        return 0.0
    uu, vv = min(u, L), min(v, L)
    per_panel = 8
    x, w = _gl_nodes(per_panel)

    def axis_nodes(hi: float) -> tuple[np.ndarray, np.ndarray]:
        edges = np.arange(-L, hi, 1.0)
        ns, ws = [], []
        for a in edges:
            b = min(a + 1.0, hi)
            ns.append(0.5 * (a + b) + 0.5 * (b - a) * x)
            ws.append(0.5 * (b - a) * w)
        return np.concatenate(ns), np.concatenate(ws)

    nu, wu = axis_nodes(uu)
    nv, wv = axis_nodes(vv)
    rho = np.sqrt(nu[:, None] ** 2 + nv[None, :] ** 2)
    vals = _kernel_radial(2, rho.ravel()).reshape(rho.shape)
    return float(wu @ vals @ wv)


@dataclass
class Mollifier:
    """The scaled kernel B_c with its quadrature configuration.

    ``self_check`` recomputes the unit integral; a mollifier whose
    quadrature cannot see mass 1 at tolerance has no business smoothing
    anything.
    """

    d: int
    c: float
    radial_cap: float = 200.0
    panel: float = 1.0
    nodes_per_panel: int = 12

    def __post_init__(self):
        if self.c <= 0:
            raise ConfigurationError("scale must be positive")
        if self.d not in (1, 2):
            raise ConfigurationError("mollified evaluation supports d <= 2")

    def kernel(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return (self.c ** self.d) * kernel_value(self.d, self.c * x)

    def self_check(self) -> UnitIntegralReport:
        return check_unit_integral(self.d, self.c)

    def mollify(self, region, x) -> float:
        """(B_c * indicator)(x), reduced to kernel CDF differences."""
        if getattr(region, "d") != self.d:
            raise ConfigurationError("region dimension mismatch")
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        c = self.c
        if isinstance(region, HalfLine):
            return kernel_cdf_1d(c * (float(x[0]) - region.theta))
        if isinstance(region, Box) and self.d == 1:
            lo, hi = region.lo[0], region.hi[0]
            return (kernel_cdf_1d(c * (float(x[0]) - lo))
                    - kernel_cdf_1d(c * (float(x[0]) - hi)))
        if isinstance(region, Quadrant):
            return kernel_cdf_2d(c * (float(x[0]) - region.corner[0]),
                                 c * (float(x[1]) - region.corner[1]))
        if isinstance(region, Box) and self.d == 2:
            (a1, a2), (b1, b2) = region.lo, region.hi
            u_a, u_b = c * (float(x[0]) - a1), c * (float(x[0]) - b1)
            v_a, v_b = c * (float(x[1]) - a2), c * (float(x[1]) - b2)
            return (kernel_cdf_2d(u_a, v_a) - kernel_cdf_2d(u_b, v_a)
                    - kernel_cdf_2d(u_a, v_b) + kernel_cdf_2d(u_b, v_b))
        raise ConfigurationError(f"unsupported region {region!r}")


def mollify_eval(region, c: float, x) -> float:
    """Smoothed indicator of the region at x, at kernel scale c."""
    return Mollifier(d=getattr(region, "d"), c=c).mollify(region, x)
