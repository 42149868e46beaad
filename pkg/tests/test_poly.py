import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_poly
from ptffool.cube import all_points, poly_values, poly_values_gray
from ptffool.errors import (ConfigurationError, ContractViolationError,
                            DegenerateInputError, FormatError)
from ptffool.poly import (DegTwoPoly, critical_index, dump_poly,
                          dumps_poly, eigendecompose_symmetric,
                          evaluate_mp, influences, load_poly, loads_poly,
                          regularity, spectral_decompose)


def test_from_terms_monomial_convention():
    # coefficient of x1 x2 is 1, stored split across the symmetric matrix
    p = DegTwoPoly.from_terms(2, quad_terms={(0, 1): 1.0})
    assert p.quad[0, 1] == 0.5
    assert p.evaluate([1, 1]) == 1.0
    assert p.evaluate([1, -1]) == -1.0


def test_square_terms_fold_into_constant_on_cube():
    p = DegTwoPoly.from_terms(3, quad_terms={(0, 0): 2.0, (1, 2): 1.0})
    assert p.trace_fold() == 2.0
    # on {-1,1}^n the square term is constant
    for x in all_points(3):
        assert p.evaluate(x) == 2.0 + x[1] * x[2]


def test_evaluate_matches_block_and_gray_enumeration(rng):
    p = random_poly(6, rng)
    direct = np.array([p.evaluate(x) for x in all_points(6)])
    assert np.allclose(direct, poly_values(p), atol=1e-12)
    assert np.allclose(direct, poly_values_gray(p), atol=1e-9)


def test_fourier_coefficients_match_correlation(rng):
    p = random_poly(5, rng)
    pts = all_points(5).astype(np.float64)
    vals = poly_values(p)
    four = p.fourier()
    for subset, coef in four.items():
        chi = np.prod(pts[:, list(subset)], axis=1) if subset else np.ones(len(pts))
        assert abs(float(np.mean(vals * chi)) - coef) < 1e-10


def test_influences_of_product():
    p = DegTwoPoly.from_terms(2, quad_terms={(0, 1): 1.0})
    inf, total = influences(p)
    assert inf.tolist() == [1.0, 1.0]
    assert total == 2.0


def test_regularity_boundary():
    p = DegTwoPoly.from_terms(2, quad_terms={(0, 1): 1.0})
    assert regularity(p, 0.51).is_regular
    assert not regularity(p, 0.49).is_regular
    assert regularity(p, 0.49).max_ratio == 0.5


def test_regularity_rejects_constant():
    p = DegTwoPoly.from_terms(3, constant=2.0)
    with pytest.raises(DegenerateInputError):
        regularity(p, 0.1)


def test_critical_index_heavy_head_flat_tail():
    # one dominant variable over a flat tail of eight equal weights:
    # stripping the head leaves ratio 1/8, regular at tau = 0.2
    p = DegTwoPoly.from_terms(
        9, linear={i: (8.0 if i == 0 else 0.5) for i in range(9)})
    res = critical_index(p, tau=0.2)
    assert res.index == 1
    assert not res.no_finite_index


def test_critical_index_never_regular_flag():
    p = DegTwoPoly.from_terms(2, quad_terms={(0, 1): 1.0})
    res = critical_index(p, tau=0.2)
    assert res.no_finite_index
    assert res.index == 2


def test_eigendecompose_golden_2x2():
    dec = eigendecompose_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(sorted(dec.eigenvalues), [-1.0, 1.0], atol=1e-12)
    R = dec.eigenvectors @ np.diag(dec.eigenvalues) @ dec.eigenvectors.T
    assert np.allclose(R, [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_eigendecompose_reconstructs(salt):
    rng = np.random.default_rng(salt)
    n = int(rng.integers(2, 9))
    A = rng.normal(size=(n, n))
    A = 0.5 * (A + A.T)
    dec = eigendecompose_symmetric(A)
    R = dec.eigenvectors @ np.diag(dec.eigenvalues) @ dec.eigenvectors.T
    assert np.max(np.abs(R - A)) < 1e-9
    # orthogonality
    I = dec.eigenvectors.T @ dec.eigenvectors
    assert np.max(np.abs(I - np.eye(n))) < 1e-9


def test_spectral_decompose_bands(rng):
    p = random_poly(8, rng)
    dec = spectral_decompose(p, delta=0.7)
    rep = dec.invariant_report(p.quad)
    assert all(rep.values()), rep


def test_spectral_decompose_delta_guard():
    p = DegTwoPoly.from_terms(2, quad_terms={(0, 1): 1.0})
    with pytest.raises(ConfigurationError):
        spectral_decompose(p, 0.0)


def test_evaluate_mp_consistency(rng):
    """The four-part evaluation recombines to the original polynomial:
    y1^2 - y2^2 + (y3 + Upsilon) + y4 + C = p(x)."""
    p = random_poly(6, rng)
    dec = spectral_decompose(p, delta=0.5)
    for x in all_points(6)[::7]:
        y = evaluate_mp(dec, x)
        back = y[0] ** 2 - y[1] ** 2 + (y[2] + dec.upsilon) + y[3] + p.constant
        assert abs(back - p.evaluate(x)) < 1e-9


def test_restrict_fixes_variable(rng):
    """Restriction keeps the ambient dimension; the fixed slot's
    coefficients fold into lower-order terms and stop mattering."""
    p = random_poly(5, rng)
    q = p.restrict(2, +1)
    assert q.n == 5
    for x in all_points(5):
        fixed = np.asarray(x, dtype=np.float64).copy()
        fixed[2] = 1.0
        assert abs(q.evaluate(x) - p.evaluate(fixed)) < 1e-12


def test_scale_multiplies_everything(rng):
    p = random_poly(4, rng)
    q = p.scale(3.0)
    for x in all_points(4)[::5]:
        assert abs(q.evaluate(x) - 3.0 * p.evaluate(x)) < 1e-12


def test_text_format_round_trip(tmp_path, rng):
    p = random_poly(5, rng)
    path = tmp_path / "p.poly"
    dump_poly(p, path)
    q = load_poly(path)
    assert q.n == p.n
    assert np.array_equal(q.linear, p.linear)
    assert np.array_equal(q.quad, p.quad)
    assert q.constant == p.constant
    assert dumps_poly(q) == dumps_poly(p)


def test_text_format_rejects_garbage():
    with pytest.raises(FormatError):
        loads_poly("garbage\n")
    with pytest.raises(FormatError):
        loads_poly("3\nQ 2 1 1.0\n")      # needs i <= j
    with pytest.raises(FormatError):
        loads_poly("3\nL 4 1.0\n")        # out of range
    with pytest.raises(FormatError):
        loads_poly("")


def test_asymmetric_quad_rejected():
    with pytest.raises(ContractViolationError):
        DegTwoPoly(n=2, quad=np.array([[0.0, 1.0], [0.0, 0.0]]))
