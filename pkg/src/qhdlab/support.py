"""Support of the Gaussian connection measure: envelope sets and Sobolev regularity.

Per-mode coefficients are drawn from e^{-x^2}/sqrt(pi), i.e. N(0, 1/2).
Samples are produced block by block from counter-based streams, so results
depend only on (seed, block), and nested cutoffs reuse the same draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import sampling
from .errors import ConfigurationError
from .spectrum import ModeBasis, build_basis

SUPPORT_BLOCK = 256
_SUPPORT_STREAM = 7


@dataclass
class TailSample:
    x: np.ndarray  # (N, K)
    seed: int

    @property
    def N(self) -> int:
        return self.x.shape[0]

    @property
    def K(self) -> int:
        return self.x.shape[1]


def _blocks(N: int, K: int, seed: int, stream: int = _SUPPORT_STREAM):
    for b, n in enumerate(sampling.block_sizes(N, SUPPORT_BLOCK)):
        yield math.sqrt(0.5) * sampling.block_normals(seed, stream, b, n, K)


def draw_tail_sample(K: int, N: int, seed: int = 0) -> TailSample:
    if K < 1 or N < 1:
        raise ConfigurationError("need K >= 1 and N >= 1")
    return TailSample(np.concatenate(list(_blocks(N, K, seed))), int(seed))


def _envelope(a: float, l: int, K: int) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=float)
    return np.where(k >= l, np.sqrt(a * np.log(k)), np.inf)


def first_violation(a: float, l: int, K: int, N: int, seed: int = 0) -> np.ndarray:
    """Per sample, the smallest k in [l, K] with |x_k| > sqrt(a log k), or K + 1 if none."""
    if not a > 0:
        raise ConfigurationError("a must be positive")
    if not 2 <= l <= K:
        raise ConfigurationError("need 2 <= l <= K")
    c = _envelope(a, l, K)
    out = []
    for x in _blocks(N, K, seed):
        bad = np.abs(x) > c
        first = np.where(bad.any(axis=1), bad.argmax(axis=1) + 1, K + 1)
        out.append(first)
    return np.concatenate(out)


def envelope_fraction(a: float, l: int, K: int, N: int, seed: int = 0) -> float:
    """Fraction of samples with |x_k| <= sqrt(a log k) for all l <= k <= K."""
    return float(np.mean(first_violation(a, l, K, N, seed) > K))


def envelope_fractions(a: float, l: int, Ks, N: int, seed: int = 0) -> np.ndarray:
    """Fractions at several cutoffs from the same (nested) samples."""
    Ks = np.asarray(sorted(Ks))
    first = first_violation(a, l, int(Ks[-1]), N, seed)
    return np.array([np.mean(first > K) for K in Ks])


def envelope_probability(a: float, l: int, K: int) -> float:
    """prod_{k=l}^K P(|x| <= sqrt(a log k)) for x ~ N(0, 1/2), i.e. prod erf(sqrt(a log k))."""
    k = np.arange(l, K + 1, dtype=float)
    return float(np.exp(np.sum(np.log1p(-special.erfc(np.sqrt(a * np.log(k)))))))


def gaussian_tail_constant(c_min: float) -> float:
    """Sharp b with P(|x| > c) = erfc(c) <= b e^{-c^2} / c for all c >= c_min.

    c e^{c^2} erfc(c) increases to 1/sqrt(pi), so the supremum is that limit;
    it is evaluated on a grid as a check.
    """
    c = np.linspace(max(c_min, 1e-6), max(c_min, 1e-6) + 50.0, 20001)
    vals = c * special.erfcx(c)
    return float(max(vals.max(), 1.0 / math.sqrt(math.pi)))


def sobolev_weights(basis: ModeBasis, s: float, K: int | None = None) -> np.ndarray:
    K = basis.K if K is None else K
    lam = basis.eigenvalues[:K]
    return (1.0 + lam) ** s * basis.weights[:K] ** 2


def sobolev_statistic(sample: TailSample, s: float, basis: ModeBasis) -> np.ndarray:
    """Per-sample sum_k x_k^2 (1 + lambda_k)^s / (1 + lambda_k^p)^2."""
    if sample.K > basis.K:
        raise ConfigurationError("sample has more modes than the basis")
    return sample.x**2 @ sobolev_weights(basis, s, sample.K)


def sobolev_mean(s: float, basis: ModeBasis, K: int | None = None) -> float:
    """Closed moment 1/2 sum_k (1 + lambda_k)^s (1 + lambda_k^p)^{-2}."""
    return 0.5 * float(np.sum(sobolev_weights(basis, s, K)))


@dataclass
class SupportTable:
    rows: list  # dicts: s, K, mean, stderr, exponent
    exponents: dict  # s -> (beta, beta_err)
    crossover: float
    crossover_err: float
    predicted_crossover: float  # variance-series boundary 2p - d/2
    stated_threshold: float  # 2p - d

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "exponents": {str(k): list(v) for k, v in self.exponents.items()},
            "crossover": self.crossover,
            "crossover_err": self.crossover_err,
            "predicted_crossover": self.predicted_crossover,
            "stated_threshold": self.stated_threshold,
        }


def predicted_exponent(s: float, p: float, d: int) -> float:
    """Growth exponent (2/d)(s - 2p) + 1 of the mean statistic in K."""
    return 2.0 / d * (s - 2 * p) + 1.0


def _linfit(x, y, w=None):
    """Weighted least squares y = b0 + b1 x with weights 1/sigma^2; returns (b, cov).

    The covariance is inflated by the reduced chi-square when that exceeds 1.
    """
    x, y = np.asarray(x, float), np.asarray(y, float)
    w = np.ones_like(x) if w is None else np.asarray(w, float)
    A = np.stack([np.ones_like(x), x], axis=1)
    Aw = A * w[:, None]
    cov_unscaled = np.linalg.inv(A.T @ Aw)
    b = cov_unscaled @ (Aw.T @ y)
    resid = y - A @ b
    dof = max(len(x) - 2, 1)
    scale = float(resid @ (w * resid)) / dof
    return b, cov_unscaled * max(scale, 1.0)


def support_experiment(s_grid, p: float, d: int, K_grid, N: int, seed: int = 0,
                       group: str = "U1") -> SupportTable:
    """Mean H^s statistic over a doubling K grid, fitted growth exponents and the crossover s*.

    Exponents are fitted to the increments mean(K_{i+1}) - mean(K_i), which
    removes the convergent constant part of each partial sum.
    """
    K_grid = sorted(int(k) for k in K_grid)
    if len(K_grid) < 3:
        raise ConfigurationError("need at least three cutoffs")
    basis = build_basis(d, group, p, K_grid[-1])
    Kmax = K_grid[-1]
    s_grid = [float(s) for s in s_grid]
    edges = [0] + K_grid
    # per-sample partial sums over the shells (K_{i-1}, K_i], for every s
    parts = {s: [] for s in s_grid}
    for x in _blocks(N, Kmax, seed):
        x2 = x**2
        for s in s_grid:
            wts = sobolev_weights(basis, s, Kmax)
            shell = np.stack([x2[:, a:b] @ wts[a:b] for a, b in zip(edges[:-1], edges[1:])], axis=1)
            parts[s].append(shell)
    rows, exps = [], {}
    logK = np.log(np.asarray(K_grid[1:], float))
    for s in s_grid:
        shells = np.concatenate(parts[s])  # (N, len(K_grid))
        cum = np.cumsum(shells, axis=1)
        means = cum.mean(axis=0)
        errs = cum.std(axis=0, ddof=1) / math.sqrt(N)
        inc = shells[:, 1:].mean(axis=0)
        inc_err = shells[:, 1:].std(axis=0, ddof=1) / math.sqrt(N)
        b, cov = _linfit(logK, np.log(inc), (inc / inc_err) ** 2)
        beta, beta_err = float(b[1]), float(math.sqrt(cov[1, 1]))
        exps[s] = (beta, beta_err)
        for K, m, e in zip(K_grid, means, errs):
            rows.append({"s": s, "K": K, "mean": float(m), "stderr": float(e), "exponent": beta})
    ss = np.array(s_grid)
    betas = np.array([exps[s][0] for s in s_grid])
    berrs = np.array([exps[s][1] for s in s_grid])
    b, cov = _linfit(ss, betas, 1.0 / np.maximum(berrs, 1e-12) ** 2)
    s_star = -b[0] / b[1]
    grad = np.array([-1.0 / b[1], b[0] / b[1] ** 2])
    s_err = float(math.sqrt(grad @ cov @ grad))
    return SupportTable(rows, exps, float(s_star), s_err, 2 * p - d / 2, 2 * p - d)
