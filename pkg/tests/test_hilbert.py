import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhdlab import hilbert
from qhdlab.errors import ConfigurationError, IllConditionedFrameWarning
from qhdlab.hilbert import FrameState
from qhdlab.spectrum import OneFormCoeffs

seeds = st.integers(0, 2**31 - 1)


def _state(seed, terms=3, width=4):
    rng = np.random.default_rng(seed)
    return FrameState([(complex(*rng.normal(size=2)), rng.normal(size=width)) for _ in range(terms)])


def _vec(seed, width=4):
    return np.random.default_rng(seed + 17).normal(size=width)


def test_overlap_closed_form():
    w, v = np.array([0.3, -1.2]), np.array([1.0, 0.4])
    assert hilbert.coherent_overlap(w, v) == pytest.approx(math.exp(-0.25 * np.sum((w - v) ** 2)), rel=1e-15)
    assert hilbert.coherent_overlap(OneFormCoeffs([1.0]), OneFormCoeffs([1.0, 0.0])) == 1.0


def test_ground_state_norm():
    g = FrameState.ground()
    assert g.norm_sq() == 1.0
    assert g.width == 0


def test_merging_of_equal_shifts():
    s = FrameState([(1.0, [0.5]), (2.0, [0.5, 0.0]), (1j, [0.0])])
    assert len(s.amplitudes) == 2
    assert s.amplitudes[0] == 3.0


@given(seeds)
def test_normalized(seed):
    assert _state(seed).normalized().norm_sq() == pytest.approx(1.0, rel=1e-12)


@given(seeds)
def test_translation_unitary(seed):
    s = _state(seed)
    moved = hilbert.apply_translation(_vec(seed), s)
    assert moved.norm_sq() == pytest.approx(s.norm_sq(), rel=1e-12)


@given(seeds)
def test_translation_group_law(seed):
    s, mu, nu = _state(seed), _vec(seed), _vec(seed + 1)
    a = hilbert.apply_translation(mu, hilbert.apply_translation(nu, s))
    b = hilbert.apply_translation(mu + nu, s)
    t = _state(seed + 2)
    assert hilbert.inner(t, a) == pytest.approx(hilbert.inner(t, b), abs=1e-12)


@given(seeds)
def test_u_element_is_inner_with_translate(seed):
    s1, s2, mu = _state(seed), _state(seed + 1), _vec(seed)
    assert hilbert.u_matrix_element(s1, mu, s2) == pytest.approx(
        hilbert.inner(s1, hilbert.apply_translation(mu, s2)), abs=1e-12)
    # U_mu^* = U_{-mu}
    assert hilbert.u_matrix_element(s1, mu, s2) == pytest.approx(
        np.conj(hilbert.u_matrix_element(s2, -mu, s1)), abs=1e-12)


@given(seeds)
def test_cauchy_schwarz(seed):
    s1, s2 = _state(seed), _state(seed + 1)
    assert abs(hilbert.inner(s1, s2)) <= s1.norm() * s2.norm() * (1 + 1e-12)


@given(seeds)
def test_e_is_anti_hermitian(seed):
    s1, s2, mu = _state(seed), _state(seed + 1), _vec(seed)
    assert hilbert.e_matrix_element(s1, mu, s2) == pytest.approx(
        -np.conj(hilbert.e_matrix_element(s2, mu, s1)), abs=1e-12)


@given(seeds)
def test_quadratic_form_second_difference(seed):
    s1, s2, w1, w2 = _state(seed), _state(seed + 1), _vec(seed), _vec(seed + 2)
    h = 1e-4

    def u(a, b):
        return hilbert.u_matrix_element(s1, a * w1 + b * w2, s2)

    mixed = (u(h, h) - u(h, -h) - u(-h, h) + u(-h, -h)) / (4 * h * h)
    assert hilbert.quadratic_form_element(s1, w1, w2, s2) == pytest.approx(-mixed, abs=1e-6)


def test_ground_two_point_function():
    w1, w2 = np.array([1.0, 2.0, 0.0]), np.array([0.5, -1.0, 3.0])
    assert hilbert.quadratic_e_expectation(w1, w2) == pytest.approx(0.5 * (w1 @ w2))


def test_coherent_state_has_no_shift_term():
    s = FrameState.coherent([0.7, -0.2])
    mu = np.array([0.3, 0.9])
    assert hilbert.e_matrix_element(s, mu, s) == 0
    assert hilbert.quadratic_form_element(s, mu, mu, s).real == pytest.approx(0.5 * mu @ mu)


@given(seeds)
def test_json_roundtrip(seed):
    s = _state(seed)
    t = FrameState.from_json(s.to_json())
    np.testing.assert_array_equal(t.amplitudes, s.amplitudes)
    np.testing.assert_array_equal(t.shifts, s.shifts)


def test_gram_matrix():
    rng = np.random.default_rng(0)
    shifts = [rng.normal(size=3) for _ in range(5)]
    G = hilbert.gram(shifts)
    assert G.min_eigenvalue > 0
    np.testing.assert_allclose(G.matrix, G.matrix.T)
    assert G.matrix[0, 1] == pytest.approx(hilbert.coherent_overlap(shifts[0], shifts[1]))


def test_gram_warns_for_near_duplicates():
    with pytest.warns(IllConditionedFrameWarning):
        hilbert.gram([[0.0], [1e-6], [2e-6]])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hilbert.gram([[0.0], [2.0]])


def test_invalid_states():
    with pytest.raises(ConfigurationError):
        FrameState([])
    with pytest.raises(ConfigurationError):
        FrameState([(1.0, [math.nan])])
