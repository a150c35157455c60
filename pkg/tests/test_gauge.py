import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, linalg

from qhdlab import gauge, kernels
from qhdlab.errors import ConfigurationError, OutOfRegimeWarning
from qhdlab.geometry import PathCurve, TrigSegment
from qhdlab.spectrum import OneFormCoeffs, build_basis

seeds = st.integers(0, 2**31 - 1)


def _random_conn(basis, seed, scale=0.5):
    rng = np.random.default_rng(seed)
    return gauge.ConnectionSample(basis, base=scale * rng.normal(size=basis.K))


def _wavy(d=2):
    return PathCurve([TrigSegment([0.3, 0.1], [2.0, 1.5], [(1, 0.4, 1, "sin"), (0, 0.2, 2, "cos")])])


def test_su2_exponential():
    G = gauge.group_spec("SU2")
    c = np.array([0.3, -1.1, 0.7])
    U = G.exp(c)
    np.testing.assert_allclose(U, linalg.expm(G.algebra_element(c)), atol=1e-14)
    assert abs(np.linalg.det(U) - 1) < 1e-13
    assert gauge.unitarity_defect(U) < 1e-14


def test_u1_matches_line_integral_quadrature():
    b = build_basis(2, "U1", None, 15)
    conn = _random_conn(b, 1)
    path = _wavy()

    def integrand(t):
        x = path.position(t)
        v = path.velocity(t)[0]
        return float(np.sum(b.evaluate(conn.coefficients, x)[0, :, 0] * v))

    phase = integrate.quad(integrand, path.t_start, path.t_end, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    H = gauge.holonomy(path, conn).matrix
    assert abs(H[0, 0] - np.exp(1j * phase)) < 1e-9


def test_su2_constant_connection_closed_form():
    b = build_basis(2, "SU2", None, 6)  # only the constant modes
    a = np.array([0.2, -0.4, 0.9, 0.5, 0.1, -0.3])
    conn = gauge.ConnectionSample(b, base=a)
    # along x_0 the pulled-back connection is the constant mu=0 block
    c = np.zeros(3)
    for k in range(6):
        if b.mu[k] == 0:
            c[b.gen[k]] += a[k] * b.sup_norms[k]
    G = gauge.group_spec("SU2")
    exact = linalg.expm(2 * math.pi * G.algebra_element(c))
    H = gauge.holonomy(PathCurve.loop(2), conn).matrix
    np.testing.assert_allclose(H, exact, atol=1e-9)


@given(seeds)
def test_composition_is_product(seed):
    rng = np.random.default_rng(seed)
    b = build_basis(2, "SU2", None, 12)
    conn = _random_conn(b, seed)
    v = rng.uniform(0, 3, size=(3, 2))
    whole = PathCurve.polyline(v)
    first, second = PathCurve.polyline(v[:2]), PathCurve.polyline(v[1:])
    H = gauge.holonomy(whole, conn).matrix
    H12 = gauge.holonomy(first, conn).matrix @ gauge.holonomy(second, conn).matrix
    np.testing.assert_allclose(H, H12, atol=1e-8)


@given(seeds)
def test_reversal_inverts(seed):
    b = build_basis(2, "SU2", None, 12)
    conn = _random_conn(b, seed)
    p = _wavy()
    H = gauge.holonomy(p, conn).matrix
    R = gauge.holonomy(p.reversed(), conn).matrix
    np.testing.assert_allclose(H @ R, np.eye(2), atol=1e-8)


@given(seeds)
def test_holonomy_is_unitary(seed):
    b = build_basis(3, "SU2", None, 30)
    H = gauge.holonomy(PathCurve.loop(3, axis=2), _random_conn(b, seed, 1.0)).matrix
    assert gauge.unitarity_defect(H) < 1e-9
    assert abs(np.linalg.det(H) - 1) < 1e-9


def test_point_path_is_identity():
    b = build_basis(2, "SU2", None, 6)
    H = gauge.holonomy(PathCurve.point([1.0, 2.0]), _random_conn(b, 0)).matrix
    np.testing.assert_allclose(H, np.eye(2), atol=1e-15)


@pytest.mark.skipif("compiled" not in kernels.available_backends(), reason="extension not built")
@pytest.mark.parametrize("group", ["U1", "SU2"])
def test_backends_agree(group):
    b = build_basis(2, group, None, 20)
    X = np.random.default_rng(5).normal(size=(64, 20))
    path = _wavy()
    a = gauge.batch_holonomy(path, b, X, 2, backend="compiled")
    c = gauge.batch_holonomy(path, b, X, 2, backend="python")
    np.testing.assert_allclose(a, c, atol=1e-13)


def test_transport_endpoint_matches_holonomy():
    b = build_basis(2, "SU2", None, 12)
    conn = _random_conn(b, 2)
    p = _wavy()
    L = gauge.transport(p, conn, [p.t_start, 0.5 * (p.t_start + p.t_end), p.t_end])
    np.testing.assert_allclose(L[0], np.eye(2), atol=1e-14)
    np.testing.assert_allclose(L[-1], gauge.holonomy(p, conn).matrix, atol=1e-9)


def test_abelian_dyson_terms_exact():
    # U(1): Hol(nabla + w) = Hol(nabla) e^{i c(w)}, so the terms are Hol, i c Hol, -c^2/2 Hol
    b = build_basis(2, "U1", None, 10)
    conn = _random_conn(b, 4)
    w = OneFormCoeffs(0.05 * np.random.default_rng(4).normal(size=10))
    p = _wavy()
    T = gauge.dyson_terms(p, conn, w)
    c = float(gauge.mode_line_integrals(p, b) @ w.padded(b.K))
    H = gauge.holonomy(p, conn).matrix[0, 0]
    assert abs(T[0][0, 0] - H) < 1e-9
    assert abs(T[1][0, 0] - 1j * c * H) < 1e-9
    assert abs(T[2][0, 0] + 0.5 * c**2 * H) < 1e-9


def test_su2_dyson_remainder_third_order():
    b = build_basis(2, "SU2", None, 12)
    conn = _random_conn(b, 6)
    w0 = OneFormCoeffs(np.random.default_rng(6).normal(size=12))
    p = PathCurve.loop(2)
    rems = []
    for s in (0.02, 0.01):
        w = w0 * s
        T = gauge.dyson_terms(p, conn, w)
        full = gauge.holonomy(p, conn.shifted(w)).matrix
        rems.append(np.linalg.norm(full - sum(T), ord=2))
    assert rems[0] / rems[1] == pytest.approx(8.0, rel=0.05)


def test_remainder_bound_regimes():
    assert gauge.dyson_remainder_bound(0.5, 1.0) == pytest.approx(0.0625)
    with pytest.warns(OutOfRegimeWarning):
        v = gauge.dyson_remainder_bound(2.0, 1.0)
    assert v == pytest.approx(8 * math.exp(2) / 6)
    assert gauge.term_bounds(0.5, 1.0) == (0.5, 0.125)


def test_connection_size_checked():
    b = build_basis(1, "U1", None, 3)
    with pytest.raises(ConfigurationError):
        gauge.ConnectionSample(b, base=np.ones(4))
