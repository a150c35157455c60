import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from qhdlab import expectation as ex
from qhdlab.errors import ConfigurationError, EnvelopeWarning
from qhdlab.geometry import PathCurve, TrigSegment, VectorFieldSpec
from qhdlab.hilbert import FrameState
from qhdlab.spectrum import OneFormCoeffs, build_basis

B1 = build_basis(1, "U1", 1.0, 40)
B2 = build_basis(2, "U1", None, 20)
WAVY = PathCurve([TrigSegment([0.2, 0.0], [2.5, 1.0], [(1, 0.5, 1, "sin")])])


def test_ground_loop_closed_form():
    # constant mode line integral is sqrt(2 pi); all others vanish on the full loop
    v = ex.abelian_closed_form(PathCurve.loop(1), FrameState.ground(), FrameState.ground(), 32, basis=B1)
    assert v == pytest.approx(math.exp(-math.pi / 2), abs=1e-13)


def test_circle_tail_closed_form():
    S = mpmath.nsum(lambda n: 1 / (1 + n**2) ** 2, [1, mpmath.inf])
    assert ex.sup_norm_tail(B1, 1) == pytest.approx(float(1 / (2 * mpmath.pi) + 2 * S / mpmath.pi), rel=1e-12)


def test_error_budget_frozen():
    # d=1, p=1, K=4: tail starts at the sin(2x) mode (index 5)
    K, L = 4, 2 * math.pi
    tail = 1 / (math.pi * 5**2) + float(mpmath.nsum(lambda n: 2 / (mpmath.pi * (1 + n**2) ** 2), [3, mpmath.inf]))
    ref = float(2 * mpmath.zeta(2, K + 1) + mpmath.zeta(1.25, K + 1)) + 0.5 * L**2 * tail
    assert ex.error_budget(B1, L, K) == pytest.approx(ref, rel=1e-12)
    vals = [ex.error_budget(B1, L, k) for k in (0, 4, 16, 64)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_deterministic_background_only():
    s = FrameState([(1.0, [0.3, -0.2]), (0.5j, [0.0, 0.4])])
    bg = OneFormCoeffs(np.random.default_rng(1).normal(size=8))
    r = ex.h_matrix_element(s, s, WAVY, 0, 1, basis=B2, background=bg)
    assert r.mc_stderr == 0.0
    exact = ex.abelian_closed_form(WAVY, s, s, 0, basis=B2, background=bg)
    assert complex(r.value[0, 0]) == pytest.approx(exact, abs=1e-7)


def test_off_diagonal_matches_closed_form():
    s1 = FrameState([(1.0, [0.3, -0.2, 0.1]), (0.5j, [0.0, 0.4])])
    s2 = FrameState([(0.7, [-0.5, 0.1]), (-0.2, [0.2, 0.2, 0.2])])
    r = ex.h_matrix_element(s1, s2, WAVY, 10, 20000, basis=B2, seed=11)
    exact = ex.abelian_closed_form(WAVY, s1, s2, 10, basis=B2)
    assert abs(complex(r.value[0, 0]) - exact) <= 4 * r.mc_stderr


def test_seed_and_worker_determinism():
    s = FrameState.coherent([0.2, 0.1])
    path = PathCurve.loop(2)
    kw = dict(basis=B2, seed=5)
    a = ex.expect_holonomy(path, s, 8, 3 * 4096 + 100, workers=1, **kw)
    b = ex.expect_holonomy(path, s, 8, 3 * 4096 + 100, workers=3, **kw)
    assert a.to_json() == b.to_json()
    c = ex.expect_holonomy(path, s, 8, 3 * 4096 + 100, stream=1, **kw)
    assert c.value[0, 0] != a.value[0, 0]


def test_result_roundtrip():
    r = ex.expect_holonomy(PathCurve.loop(1), FrameState.ground(), 4, 500, basis=B1)
    back = ex.ExpectationResult.from_dict(r.to_dict())
    assert back.to_json() == r.to_json()


def _envelope_oracle(c_list, bounds):
    out = 1.0
    for c, b in zip(c_list, bounds):
        num = integrate.quad(lambda x: math.cos(c * x) * math.exp(-x * x) / math.sqrt(math.pi), -b, b)[0]
        out *= num / math.erf(b)
    return out


def test_envelope_mode_matches_truncated_oracle():
    path = WAVY
    K = 8
    c = ex.gauge.mode_line_integrals(path, B2, count=K)
    k = np.arange(1, K + 1)
    bounds = np.where(k >= 2, np.sqrt(2 * np.log(np.maximum(k, 1))), np.inf)
    r = ex.expect_holonomy(path, FrameState.ground(), K, 40000, mode="envelope-truncated", basis=B2, seed=2)
    oracle = _envelope_oracle(c, np.minimum(bounds, 50.0))
    assert abs(r.value[0, 0].real - oracle) <= 4 * r.mc_stderr
    assert r.acceptance == pytest.approx(float(np.prod([math.erf(b) for b in bounds[1:]])), rel=1e-12)


def test_envelope_warning_for_low_acceptance():
    with pytest.warns(EnvelopeWarning):
        # a coherent shift outside the envelope of mode 2 has tiny acceptance
        ex.expect_holonomy(PathCurve.loop(2), FrameState.coherent([0.0, 3.0]), 4, 100,
                           mode="envelope-truncated", basis=B2)


def test_cutoff_validation():
    with pytest.raises(ConfigurationError):
        ex.expect_holonomy(PathCurve.loop(1), FrameState.ground(), 41, 10, basis=B1)
    with pytest.raises(ConfigurationError):
        ex.expect_holonomy(PathCurve.loop(1), FrameState.ground(), 4, 10, mode="bogus", basis=B1)


@given(st.integers(1, 4), st.floats(0, 2 * math.pi))
def test_section_interpolation_exact_for_trig_polynomials(n, x):
    G = 16
    sec = ex.SectionGrid.from_function(lambda p: np.exp(1j * n * p[:, 0]) + np.cos(3 * p[:, 0]), 1, G)
    val = sec.interpolate([[x]])[0, 0]
    assert val == pytest.approx(np.exp(1j * n * x) + math.cos(3 * x), abs=1e-12)


def test_section_inner():
    sec = ex.SectionGrid.from_function(lambda p: np.exp(1j * p[:, 0]), 1, 32)
    assert sec.l2_norm() == pytest.approx(math.sqrt(2 * math.pi))


def _plane_waves(G=16):
    return ex.SectionGrid.from_function(lambda p: np.exp(1j * p[:, 0]), 1, G)


def test_translation_flow_without_fluctuations():
    # constant field v: <eta, e^X eta> = int conj(eta(x + v)) eta(x) dx = 2 pi e^{-i v}
    v = 0.4
    eta = _plane_waves()
    r = ex.ex_matrix_element(VectorFieldSpec.constant([v]), FrameState.ground(), eta, FrameState.ground(),
                             eta, 0, 1, basis=B1)
    assert r.value == pytest.approx(2 * math.pi * np.exp(-1j * v), abs=1e-9)


def test_translation_flow_with_fluctuations():
    v, K = 0.7, 6
    eta = _plane_waves(8)
    g = FrameState.ground()
    r = ex.ex_matrix_element(VectorFieldSpec.constant([v]), g, eta, g, eta, K, 20000, basis=B1, seed=3)
    exact = 0.0
    for x in eta.points[:, 0]:
        seg = PathCurve.polyline([[x], [x + v]])
        exact += np.exp(-1j * (x + v)) * np.exp(1j * x) * ex.abelian_closed_form(seg, g, g, K, basis=B1)
    exact *= eta.spacing
    assert abs(r.value - exact) <= 4 * r.stderr + 1e-9


def test_covariant_derivative_of_translation():
    v = 0.5
    eta = _plane_waves()
    r = ex.covariant_derivative_element(VectorFieldSpec.constant([v]), FrameState.ground(), eta,
                                        FrameState.ground(), eta, K=0, N=1, basis=B1)
    assert r.value == pytest.approx(-2j * math.pi * v, abs=1e-7)
