import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhdlab.errors import ConfigurationError
from qhdlab.spectrum import (
    ClosedFormOneForm,
    OneFormCoeffs,
    analytic_tail_bound,
    build_basis,
    condition_tail,
    default_p,
    expand,
    p_criterion,
    sobolev_inner,
    sup_norm,
    torus_p_criterion,
    weyl_check,
    weyl_constant,
    weyl_deviation,
)


def test_circle_basis_values():
    b = build_basis(1, "U1", 1.0, 5)
    np.testing.assert_array_equal(b.eigenvalues, [0, 1, 1, 4, 4])
    np.testing.assert_allclose(b.weights, [1, 0.5, 0.5, 0.2, 0.2])
    np.testing.assert_allclose(b.norms, [1 / math.sqrt(2 * math.pi)] + [1 / math.sqrt(math.pi)] * 4)
    # cos before sin inside each |n|
    assert list(b.phase[1:3]) == [0, 1]


def test_default_p():
    assert default_p(1) == pytest.approx(0.3)
    assert default_p(3) == pytest.approx(1.3)


def test_su2_basis_multiplicity():
    b = build_basis(2, "SU2", None, 6)
    assert b.g == 3
    # constant modes: d * g of them at lambda = 0
    assert np.all(b.eigenvalues == 0)
    assert sorted(zip(b.mu, b.gen)) == [(m, a) for m in range(2) for a in range(3)]


@given(st.integers(1, 3), st.integers(1, 300), st.integers(1, 300))
def test_basis_prefix_stable(d, k1, k2):
    k1, k2 = sorted((k1, k2))
    a, b = build_basis(d, "U1", None, k1), build_basis(d, "U1", None, k2)
    np.testing.assert_array_equal(a.n, b.n[:k1])
    np.testing.assert_array_equal(a.mu, b.mu[:k1])
    np.testing.assert_array_equal(a.phase, b.phase[:k1])
    assert np.all(np.diff(b.eigenvalues) >= 0)


def test_orthonormal_in_sobolev_product():
    b = build_basis(2, "U1", 1.0, 12)
    G = np.array([[sobolev_inner(b.closed_form(i + 1, normalized=True), b.closed_form(j + 1, normalized=True),
                                 basis=b, grid=16) for j in range(b.K)] for i in range(b.K)])
    np.testing.assert_allclose(G, np.eye(b.K), atol=1e-12)


def test_expand_roundtrip():
    b = build_basis(2, "SU2", None, 30)
    rng = np.random.default_rng(3)
    c = OneFormCoeffs(rng.normal(size=b.K))
    back = expand(ClosedFormOneForm.from_coeffs(c, b), b)
    np.testing.assert_allclose(back.coeffs, c.coeffs, atol=1e-11)
    assert back.residual < 1e-12


def test_sup_norm_of_basis_elements():
    b = build_basis(2, "U1", None, 20)
    for i in (1, 3, 7, 20):
        assert sup_norm(OneFormCoeffs.unit(i), b) == pytest.approx(b.sup_norms[i - 1], rel=1e-9)


def test_sup_norm_sum_of_modes():
    # cos x + sin x on the circle has sup sqrt(2) times the common scale
    b = build_basis(1, "U1", 1.0, 3)
    c = OneFormCoeffs([0, 1, 1])
    assert sup_norm(c, b) == pytest.approx(math.sqrt(2) * b.sup_norms[1], rel=1e-9)


def test_criteria():
    assert p_criterion(3, 1.3)
    assert not p_criterion(3, 1.25)
    assert torus_p_criterion(3, 0.8)
    assert not torus_p_criterion(3, 0.2)
    assert math.isinf(analytic_tail_bound(3, 1, 0.2, 100))


@pytest.mark.parametrize("d,p", [(2, 1.0), (3, 1.3), (2, 0.8)])
def test_analytic_bound_dominates_built_modes(d, p):
    b = build_basis(d, "U1", p, 20000)
    for start in (500, 2000):
        built = float(np.sum(b.sup_norms[start:] ** 2))
        assert analytic_tail_bound(d, 1, p, start) >= built


def test_condition_tail_decreasing():
    b = build_basis(3, "U1", 1.3, 2000)
    vals = [condition_tail(b, k) for k in (1, 10, 100, 1000, 2001)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert condition_tail(b, 1) - condition_tail(b, 11) == pytest.approx(np.sum(b.sup_norms[:10] ** 2))


def test_far_tail_closed_form():
    # d = 1: lambda_lb = (x/2 - 1/2)^2, so int_X^inf c2 lambda^{-2p} = (1/pi) 2 (y0^{1-4p}) / (4p - 1)
    p, start = 1.0, 1e6
    y0 = start / 2 - 0.5
    ref = (1 / math.pi) * 2 * y0 ** (1 - 4 * p) / (4 * p - 1)
    from qhdlab.spectrum import _power_tail

    assert _power_tail(1, 1, p, start) == pytest.approx(ref, rel=1e-12)


def test_weyl_constant_and_law():
    assert weyl_constant(2, 1) == pytest.approx(2 * math.pi)
    assert weyl_constant(3, 3) == pytest.approx(9 * 4 / 3 * math.pi)
    b = build_basis(2, "U1", None, 2000)
    assert weyl_deviation(weyl_check(b), 2, 1) < 0.15


def test_weyl_count_small():
    # |n|^2 <= 2 on Z^2 has 9 points, i.e. 9 real scalar modes, each for d = 2 components
    b = build_basis(2, "U1", None, 40)
    rows = {lam: n for lam, n, _ in weyl_check(b)}
    assert rows[2.0] == 2 * 9


def test_bad_arguments():
    with pytest.raises(ConfigurationError):
        build_basis(4, "U1", None, 3)
    with pytest.raises(ConfigurationError):
        build_basis(1, "SU3", None, 3)
    with pytest.raises(ConfigurationError):
        build_basis(1, "U1", -1.0, 3)
