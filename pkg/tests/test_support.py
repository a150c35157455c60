import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhdlab import support
from qhdlab.errors import ConfigurationError
from qhdlab.spectrum import build_basis


def test_envelope_probability_oracle():
    ref = mpmath.fprod(mpmath.erf(mpmath.sqrt(2 * mpmath.log(k))) for k in range(2, 1001))
    assert support.envelope_probability(2.0, 2, 1000) == pytest.approx(float(ref), rel=1e-12)


def test_gaussian_tail_constant():
    assert support.gaussian_tail_constant(1.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-12)


def test_first_violation_definition():
    a, l, K, N = 1.5, 2, 50, 300
    x = support.draw_tail_sample(K, N, seed=9).x
    bound = np.sqrt(a * np.log(np.arange(1, K + 1)))
    first = support.first_violation(a, l, K, N, seed=9)
    for row, f in zip(x, first):
        bad = [k for k in range(l, K + 1) if abs(row[k - 1]) > bound[k - 1]]
        assert f == (bad[0] if bad else K + 1)


@given(st.integers(0, 1000))
def test_fractions_nonincreasing_in_cutoff(seed):
    fr = support.envelope_fractions(1.2, 2, [5, 20, 80, 320], 200, seed)
    assert np.all(np.diff(fr) <= 0)


def test_fraction_matches_product_oracle():
    a, K, N = 2.0, 500, 20000
    f = support.envelope_fraction(a, 2, K, N, seed=1)
    o = support.envelope_probability(a, 2, K)
    assert abs(f - o) <= 4 * math.sqrt(o * (1 - o) / N)


def test_sobolev_mean_matches_sample():
    b = build_basis(1, "U1", 1.0, 200)
    smp = support.draw_tail_sample(200, 4000, seed=2)
    stat = support.sobolev_statistic(smp, 0.5, b)
    assert abs(stat.mean() - support.sobolev_mean(0.5, b)) <= 4 * stat.std() / math.sqrt(stat.size)


def test_predicted_exponent():
    assert support.predicted_exponent(1.5, 1.0, 1) == pytest.approx(0.0)
    assert support.predicted_exponent(2.5, 1.0, 1) == pytest.approx(2.0)


def test_crossover_small_run():
    tab = support.support_experiment([0.5, 1.5, 2.5], 1.0, 1, [128, 256, 512, 1024], 500, seed=0)
    assert abs(tab.crossover - 1.5) <= 3 * tab.crossover_err + 0.02
    assert tab.stated_threshold == 1.0
    assert tab.exponents[2.5][0] == pytest.approx(2.0, abs=0.1)


def test_bad_envelope_arguments():
    with pytest.raises(ConfigurationError):
        support.first_violation(0.0, 2, 10, 10)
    with pytest.raises(ConfigurationError):
        support.first_violation(1.0, 1, 10, 10)
