import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from qhdlab import kernels, sampling


def test_blocks_are_reproducible_and_distinct():
    a = sampling.block_normals(3, 0, 5, 100, 4)
    np.testing.assert_array_equal(a, sampling.block_normals(3, 0, 5, 100, 4))
    assert not np.array_equal(a, sampling.block_normals(3, 0, 6, 100, 4))
    assert not np.array_equal(a, sampling.block_normals(3, 1, 5, 100, 4))
    assert not np.array_equal(a, sampling.block_normals(4, 0, 5, 100, 4))


def test_short_block_is_prefix():
    full = sampling.block_uniforms(1, 2, 3, 50, 3)
    np.testing.assert_array_equal(sampling.block_uniforms(1, 2, 3, 20, 3), full[:20])


def test_normals_are_standard():
    z = sampling.block_normals(0, 0, 0, 20000, 2).ravel()
    assert stats.kstest(z, "norm").pvalue > 1e-3


def test_truncated_normals_respect_bound():
    u = sampling.block_uniforms(0, 0, 0, 1000, 3)
    bound = np.array([0.5, 1.0, 3.0])
    z = sampling.truncated_normals(u, bound)
    assert np.all(np.abs(z) <= bound + 1e-12)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40))
def test_tree_sum_matches_sum(xs):
    assert sampling.tree_sum(np.array(x) for x in xs) == pytest.approx(sum(xs), abs=1e-6)


@given(st.integers(0, 50000), st.integers(1, 5000))
def test_block_sizes(n, b):
    sizes = sampling.block_sizes(n, b)
    assert sum(sizes) == n
    assert all(0 < s <= b for s in sizes)


def test_default_workers(monkeypatch):
    monkeypatch.setenv("QHDLAB_WORKERS", "3")
    assert sampling.default_workers() == 3
    monkeypatch.delenv("QHDLAB_WORKERS")
    assert sampling.default_workers() == 1


def test_backend_selection():
    assert kernels.BACKEND in kernels.available_backends()
    assert "python" in kernels.available_backends()
