"""Holonomy expectation values on frame states, the truncation error budget,
the flow operator e^X on connections times sections, and the continuity experiments.

Matrix elements <s1, h_p s2> are computed pairwise: for (a, b) in the two
frames, phi(x - omega_a) phi(x - omega_b) = G_ab N(m_ab, 1/2) per mode with
m_ab = (omega_a + omega_b) / 2 and G_ab the coherent overlap.  All pairs
share the same standard normal draws (common random numbers).
"""
from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate, special

from . import gauge, sampling
from .errors import (
    ConfigurationError,
    EnvelopeWarning,
    InsufficientPrecisionError,
    SampleSizeWarning,
)
from .geometry import PathCurve, VectorFieldSpec, flow_density, flow_map, integral_curve
from .hilbert import FrameState, pair_data
from .spectrum import ModeBasis, OneFormCoeffs, condition_tail

TRUNCATION_MODES = ("full-gaussian", "envelope-truncated")
MC_TOL = 1e-8
SQRT_HALF = math.sqrt(0.5)


# ---------------------------------------------------------------------------
# result containers


@dataclass
class ExpectationResult:
    value: np.ndarray
    mc_stderr: float
    samples: int
    K: int
    budget: float
    mode: str = "full-gaussian"
    seed: int | None = None
    acceptance: float = 1.0
    steps: int = 0

    def to_dict(self) -> dict:
        v = np.asarray(self.value)
        return {
            "value": {"re": v.real.tolist(), "im": v.imag.tolist()},
            "mc_stderr": self.mc_stderr,
            "samples": self.samples,
            "K": self.K,
            "budget": self.budget,
            "mode": self.mode,
            "seed": self.seed,
            "acceptance": self.acceptance,
            "steps": self.steps,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ExpectationResult":
        d = dict(data)
        d["value"] = np.asarray(d["value"]["re"]) + 1j * np.asarray(d["value"]["im"])
        return cls(**d)


@dataclass
class ScalarEstimate:
    value: complex
    stderr: float
    error: float = 0.0  # discretization error estimate (Richardson)

    def __complex__(self):
        return complex(self.value)


@dataclass
class SectionGrid:
    """C^j-valued samples of a section on the uniform torus grid, shape (G,)*d + (j,)."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim < 2:
            raise ConfigurationError("section values need shape (G,)*d + (j,)")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("section values must be finite")
        if len(set(self.values.shape[:-1])) != 1:
            raise ConfigurationError("section grid must be uniform")

    @classmethod
    def from_function(cls, fn, d: int, G: int = 64, j: int = 1) -> "SectionGrid":
        pts = grid_points(d, G)
        vals = np.asarray(fn(pts), dtype=complex).reshape(pts.shape[0], j)
        return cls(vals.reshape((G,) * d + (j,)))

    @property
    def d(self) -> int:
        return self.values.ndim - 1

    @property
    def G(self) -> int:
        return self.values.shape[0]

    @property
    def j(self) -> int:
        return self.values.shape[-1]

    @property
    def spacing(self) -> float:
        return 2 * math.pi / self.G

    @property
    def points(self) -> np.ndarray:
        return grid_points(self.d, self.G)

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1, self.j)

    def inner(self, other: "SectionGrid") -> complex:
        return complex(np.sum(np.conj(self.values) * other.values) * self.spacing**self.d)

    def l2_norm(self) -> float:
        return math.sqrt(self.inner(self).real)

    def interpolate(self, x) -> np.ndarray:
        """Trigonometric interpolation at arbitrary points x (m, d) -> (m, j)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        G, d = self.G, self.d
        coef = np.fft.fftn(self.values, axes=tuple(range(d))) / G**d
        k = np.fft.fftfreq(G, 1.0 / G)
        mats = []
        for mu in range(d):
            E = np.exp(1j * np.outer(x[:, mu], k))
            if G % 2 == 0:
                E[:, G // 2] = np.cos(G / 2 * x[:, mu])
            mats.append(E)
        if d == 1:
            return np.einsum("ma,aj->mj", mats[0], coef)
        if d == 2:
            return np.einsum("ma,mb,abj->mj", mats[0], mats[1], coef)
        return np.einsum("ma,mb,mc,abcj->mj", mats[0], mats[1], mats[2], coef)


def grid_points(d: int, G: int) -> np.ndarray:
    axis = np.arange(G) * (2 * math.pi / G)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


# ---------------------------------------------------------------------------
# error budget


def _circle_tail(g: int, p: float, from_index: int) -> float:
    """Exact sum_{i >= from_index} ||e_i||_inf^2 on T^1 (where sup norms depend on |n| only)."""
    if 4 * p <= 1:
        return math.inf

    def c(n):
        n = np.asarray(n, dtype=float)
        return np.where(n == 0, 1.0, 2.0) / (2 * math.pi) / (1.0 + n ** (2 * p)) ** 2

    before = from_index - 1  # modes already excluded
    total = 0.0
    if before < g:
        total += (g - before) * float(c(0))
        n_first = 1
    else:
        full, rem = divmod(before - g, 2 * g)
        n_first = full + 1
        total += (2 * g - rem) * float(c(n_first))
        n_first += 1
    # sum_{n >= n_first} 2g c(n): direct part plus Euler-Maclaurin remainder
    cut = n_first + 4000
    total += 2 * g * float(np.sum(c(np.arange(n_first, cut))))

    def f(n):
        return 1.0 / math.pi / (1.0 + n ** (2 * p)) ** 2

    h = 1e-3 * cut
    df = (f(cut + h) - f(cut - h)) / (2 * h)
    tail = integrate.quad(f, cut, math.inf, epsabs=0, epsrel=1e-13, limit=200)[0] + 0.5 * f(cut) - df / 12
    return total + 2 * g * tail


def sup_norm_tail(basis: ModeBasis, from_index: int) -> float:
    """sum_{i >= from_index} ||e_i||_inf^2: exact on the circle, else built part plus bound."""
    if basis.d == 1:
        return _circle_tail(basis.g, basis.p, from_index)
    return condition_tail(basis, from_index)


def error_budget(basis: ModeBasis, length: float, K: int) -> float:
    """sum_{k > K} (2/k^2 + 1/2 (||e_k||_inf |p|)^2 + k^(-5/4))."""
    if K < 0:
        raise ConfigurationError("K must be nonnegative")
    a = K + 1
    return float(2.0 * special.zeta(2.0, a) + special.zeta(1.25, a)
                 + 0.5 * length**2 * sup_norm_tail(basis, a))


# ---------------------------------------------------------------------------
# Monte Carlo core


@dataclass
class _Plan:
    basis: ModeBasis
    K: int
    M: int
    background: np.ndarray  # (M,)
    coef: np.ndarray  # (P,) complex pair coefficients (overlaps included)
    means: np.ndarray  # (P, K)
    paths: list
    weights: np.ndarray  # (Q,) scalars or (Q, j, j) contraction matrices
    mode: str
    envelope_l: int
    seed: int
    stream: int
    levels: list = field(default_factory=list)
    profiles: list = field(default_factory=list)

    @property
    def contract(self) -> bool:
        return self.weights.ndim == 3


def _envelope_bounds(plan: _Plan) -> np.ndarray:
    k = np.arange(1, plan.K + 1, dtype=float)
    c = np.where(k >= plan.envelope_l, np.sqrt(2.0 * np.log(np.maximum(k, 1.0))), np.inf)
    return c


def _acceptance(plan: _Plan) -> np.ndarray:
    """Per-pair probability of the envelope set under N(m_ab, 1/2)."""
    if plan.mode != "envelope-truncated" or plan.K == 0:
        return np.ones(plan.coef.size)
    c = _envelope_bounds(plan)
    lo = np.sqrt(2.0) * (-c - plan.means)
    hi = np.sqrt(2.0) * (c - plan.means)
    return np.prod(special.ndtr(hi) - special.ndtr(lo), axis=1)


def _draws(plan: _Plan, block: int, n: int) -> np.ndarray:
    """Per-pair coefficient draws, shape (P, n, K)."""
    u = sampling.block_uniforms(plan.seed, plan.stream, block, n, plan.K)
    if plan.mode == "full-gaussian":
        z = special.ndtri(u)
        return plan.means[:, None, :] + SQRT_HALF * z[None]
    c = _envelope_bounds(plan)
    out = np.empty((plan.means.shape[0], n, plan.K))
    for q, m in enumerate(plan.means):
        lo = special.ndtr(np.sqrt(2.0) * (-c - m))
        hi = special.ndtr(np.sqrt(2.0) * (c - m))
        z = special.ndtri(lo + u * (hi - lo))
        out[q] = m + SQRT_HALF * z
    return out


def _sample_values(plan: _Plan, X_fluct: np.ndarray, coef: np.ndarray, backend=None) -> np.ndarray:
    """Per-sample integrand Y from pair draws X_fluct (P, n, K)."""
    P, n, _ = X_fluct.shape
    X = np.broadcast_to(plan.background, (P, n, plan.M)).copy()
    X[:, :, : plan.K] += X_fluct
    X = X.reshape(P * n, plan.M)
    j = gauge.group_spec(plan.basis.group).j
    Y = np.zeros((n,) if plan.contract else (n, j, j), dtype=complex)
    for q, path in enumerate(plan.paths):
        H = gauge.batch_holonomy(path, plan.basis, X, plan.levels[q], profile=plan.profiles[q],
                                 backend=backend)
        H = np.tensordot(coef, H.reshape(P, n, j, j), axes=(0, 0))  # (n, j, j)
        if plan.contract:
            Y += np.einsum("ij,nij->n", plan.weights[q], H)
        else:
            Y += plan.weights[q] * H
    return Y


def _block_stats(plan, coef, block, n, backend=None):
    Y = _sample_values(plan, _draws(plan, block, n), coef, backend)
    mean = Y.mean(axis=0)
    m2 = np.sum(np.abs(Y - mean) ** 2, axis=0)
    return n, mean, m2


def _combine(a, b):
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), sa + sb + np.abs(delta) ** 2 * (na * nb / n)


def _tree_combine(stats):
    stats = list(stats)
    while len(stats) > 1:
        nxt = [_combine(stats[i], stats[i + 1]) for i in range(0, len(stats) - 1, 2)]
        if len(stats) % 2:
            nxt.append(stats[-1])
        stats = nxt
    return stats[0]


def _plan_levels(plan: _Plan, tol: float, backend=None):
    """Step counts from a pilot on the first samples of block 0 (schedule independent)."""
    if plan.K == 0:
        pilot = plan.background[None, :]
    else:
        n = min(256, sampling.BLOCK_SIZE)
        Xf = _draws(plan, 0, n)[:, : max(1, 64 // max(1, plan.coef.size))].reshape(-1, plan.K)
        pilot = np.broadcast_to(plan.background, (Xf.shape[0], plan.M)).copy()
        pilot[:, : plan.K] += Xf
    pilot = np.ascontiguousarray(pilot)
    for path in plan.paths:
        level = gauge.choose_level(path, plan.basis, pilot, tol, backend=backend)
        plan.levels.append(level)
        plan.profiles.append(gauge.path_profile(path, plan.basis, plan.M, level))


def _run_plan(plan: _Plan, N: int, tol: float, workers: int | None, backend=None):
    """Returns (mean, stderr, samples, total steps)."""
    coef = plan.coef * _acceptance(plan)
    _plan_levels(plan, tol, backend)
    steps = int(sum(prof[1].size for prof in plan.profiles))
    if plan.K == 0:
        Y = _sample_values(plan, np.zeros((plan.coef.size, 1, 0)), coef, backend)[0]
        return Y, 0.0, 1, steps
    if N < 2:
        raise ConfigurationError("Monte Carlo estimates need N >= 2")
    sizes = sampling.block_sizes(N)
    workers = sampling.default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(sizes) == 1:
        stats = [_block_stats(plan, coef, b, n, backend) for b, n in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(lambda bn: _block_stats(plan, coef, bn[0], bn[1], backend),
                                  enumerate(sizes)))
    n, mean, m2 = _tree_combine(stats)
    var = m2 / (n - 1)
    stderr = float(np.sqrt(np.sum(var) / n))
    return mean, stderr, n, steps


def _make_plan(basis, K, s1, s2, paths, weights, background, mode, envelope_l, seed, stream):
    if mode not in TRUNCATION_MODES:
        raise ConfigurationError(f"unknown truncation mode {mode!r}")
    if not 0 <= K <= basis.K:
        raise ConfigurationError(f"cutoff K={K} outside the built basis (K <= {basis.K})")
    if envelope_l < 2:
        raise ConfigurationError("envelope index l must be at least 2")
    bg = np.zeros(0) if background is None else (
        background.coeffs if isinstance(background, OneFormCoeffs) else np.asarray(background, float))
    if bg.size > basis.K:
        raise ConfigurationError("background has more coefficients than the basis")
    M = max(K, bg.size, 1)
    bgp = np.zeros(M)
    bgp[: bg.size] = bg
    coef, delta, mean = pair_data(s1, s2)
    G = np.exp(-0.25 * np.sum(delta**2, axis=1))
    means = np.zeros((coef.size, K))
    w = min(K, mean.shape[1])
    means[:, :w] = mean[:, :w]
    return _Plan(basis, K, M, bgp, coef * G, means, list(paths), np.asarray(weights),
                 mode, envelope_l, int(seed), int(stream))


def _diag_acceptance(plan: _Plan) -> float:
    acc = _acceptance(plan)
    w = np.abs(plan.coef)
    return float(np.sum(w * acc) / np.sum(w))


def _finish(plan, value, stderr, n, steps, length, target_stderr) -> ExpectationResult:
    acc = _diag_acceptance(plan)
    if plan.mode == "envelope-truncated" and acc < 0.5:
        warnings.warn(f"envelope acceptance {acc:.3f} below 1/2", EnvelopeWarning, stacklevel=3)
    if target_stderr is not None and stderr > target_stderr:
        warnings.warn(f"stderr {stderr:.3g} above target {target_stderr:.3g}; increase N",
                      SampleSizeWarning, stacklevel=3)
    return ExpectationResult(
        value=np.asarray(value), mc_stderr=stderr, samples=n, K=plan.K,
        budget=error_budget(plan.basis, length, plan.K), mode=plan.mode, seed=plan.seed,
        acceptance=acc, steps=steps,
    )


def h_matrix_element(s1: FrameState, s2: FrameState, p: PathCurve, K: int, N: int, *,
                     basis: ModeBasis, background=None, mode: str = "full-gaussian",
                     envelope_l: int = 2, seed: int = 0, stream: int = 0,
                     workers: int | None = None, tol: float = MC_TOL,
                     target_stderr: float | None = None, backend=None) -> ExpectationResult:
    """<s1, h_p s2> where (h_p xi)(nabla) = Hol(p, nabla) xi(nabla)."""
    plan = _make_plan(basis, K, s1, s2, [p], [1.0], background, mode, envelope_l, seed, stream)
    value, se, n, steps = _run_plan(plan, N, tol, workers, backend)
    return _finish(plan, value, se, n, steps, p.length, target_stderr)


def _truncated_norm(plan: _Plan) -> float:
    return float(np.sum(plan.coef * _acceptance(plan)).real)


def expect_holonomy(p: PathCurve, s: FrameState, K: int, N: int,
                    mode: str = "full-gaussian", **kw) -> ExpectationResult:
    """Normalized <s, h_p s> / <s, s>; in envelope mode the measure is restricted to the envelope set."""
    basis = kw["basis"]
    plan = _make_plan(basis, K, s, s, [p], [1.0], kw.get("background"), mode,
                      kw.get("envelope_l", 2), kw.get("seed", 0), kw.get("stream", 0))
    norm = _truncated_norm(plan)
    if norm <= 0:
        raise ConfigurationError("state has zero norm")
    plan.coef = plan.coef / norm
    value, se, n, steps = _run_plan(plan, N, kw.get("tol", MC_TOL), kw.get("workers"), kw.get("backend"))
    return _finish(plan, value, se, n, steps, p.length, kw.get("target_stderr"))


def weighted_holonomy_element(s1: FrameState, s2: FrameState, paths, weights, K: int, N: int, *,
                              basis: ModeBasis, background=None, seed: int = 0, stream: int = 0,
                              workers: int | None = None, tol: float = MC_TOL,
                              mode: str = "full-gaussian", envelope_l: int = 2, backend=None):
    """sum_q w_q <s1, h_{p_q} s2> with common random numbers across paths.

    Scalar weights give a matrix; (j, j) weights are contracted entrywise to a scalar.
    Returns (value, stderr, samples).
    """
    plan = _make_plan(basis, K, s1, s2, paths, weights, background, mode, envelope_l, seed, stream)
    value, se, n, _ = _run_plan(plan, N, tol, workers, backend)
    return value, se, n


# ---------------------------------------------------------------------------
# abelian closed forms


def abelian_closed_form(p: PathCurve, s1: FrameState, s2: FrameState, K: int, *,
                        basis: ModeBasis, background=None) -> complex:
    """Exact <s1, h_p s2> for U(1): Gaussian characteristic functions of the line integrals."""
    if basis.group != "U1":
        raise ConfigurationError("closed form only for the abelian group")
    bg = np.zeros(0) if background is None else (
        background.coeffs if isinstance(background, OneFormCoeffs) else np.asarray(background, float))
    M = max(K, bg.size, 1)
    c = gauge.mode_line_integrals(p, basis, count=M)
    coef, delta, mean = pair_data(s1, s2)
    G = np.exp(-0.25 * np.sum(delta**2, axis=1))
    m = np.zeros((coef.size, K))
    w = min(K, mean.shape[1])
    m[:, :w] = mean[:, :w]
    phase = c[: bg.size] @ bg + m @ c[:K]
    return complex(np.sum(coef * G * np.exp(1j * phase)) * np.exp(-0.25 * c[:K] @ c[:K]))


# ---------------------------------------------------------------------------
# flows acting on connections times sections


def _flow_data(X: VectorFieldSpec, pts: np.ndarray):
    phi = np.array([flow_map(X, x, 1.0).coords for x in pts])
    dens = np.array([flow_density(X, x, 1.0) for x in pts])
    curves = [integral_curve(X, x, 1.0) if X.is_constant or np.any(X(x[None])[0] != 0)
              else PathCurve.point(x) for x in pts]
    return phi, dens, curves


def ex_matrix_element(X: VectorFieldSpec, s1: FrameState, eta1: SectionGrid,
                      s2: FrameState, eta2: SectionGrid, K: int, N: int, *, basis: ModeBasis,
                      background=None, seed: int = 0, stream: int = 0,
                      workers: int | None = None, tol: float = MC_TOL, backend=None) -> ScalarEstimate:
    """<s1 x eta1, e^X (s2 x eta2)> by grid quadrature over starting points.

    The integrand is (eta1(phi(x)), Dphi(x) <s1, h_{gamma_x} s2> eta2(x)) against
    dg(phi(x)) = Dphi(x) dx, with phi the time-one flow and gamma_x its integral curve.
    """
    if eta1.values.shape != eta2.values.shape:
        raise ConfigurationError("sections must share a grid")
    if eta1.d != basis.d or X.d != basis.d:
        raise ConfigurationError("dimension mismatch between sections, field and basis")
    pts = eta2.points
    phi, dens, curves = _flow_data(X, pts)
    e1 = eta1.interpolate(phi)
    e2 = eta2.flat()
    cell = eta2.spacing**eta2.d
    W = np.conj(e1)[:, :, None] * e2[:, None, :] * (dens**2 * cell)[:, None, None]
    value, se, _ = weighted_holonomy_element(s1, s2, curves, W, K, N, basis=basis, background=background,
                                             seed=seed, stream=stream, workers=workers, tol=tol,
                                             backend=backend)
    return ScalarEstimate(complex(value), se)


def covariant_derivative_element(X: VectorFieldSpec, s1: FrameState, eta1: SectionGrid,
                                 s2: FrameState, eta2: SectionGrid, h_step: float = 1e-2, *,
                                 K: int, N: int, basis: ModeBasis, **kw) -> ScalarEstimate:
    """d/dt <s1 x eta1, e^{tX} s2 x eta2> at t = 0 by Richardson-extrapolated central differences."""
    if not 1e-4 <= h_step <= 1e-1:
        raise ConfigurationError("h_step must lie in [1e-4, 1e-1]")
    if X.is_constant and not np.any(X.components):
        return ScalarEstimate(0j, 0.0, 0.0)

    def central(h):
        plus = ex_matrix_element(X.scaled(h), s1, eta1, s2, eta2, K, N, basis=basis, **kw)
        minus = ex_matrix_element(X.scaled(-h), s1, eta1, s2, eta2, K, N, basis=basis, **kw)
        return (plus.value - minus.value) / (2 * h), (plus.stderr + minus.stderr) / (2 * h)

    d1, e1 = central(h_step)
    d2, e2 = central(h_step / 2)
    value = (4 * d2 - d1) / 3
    stderr = (4 * e2 + e1) / 3
    if stderr > 1e-12 and stderr > abs(value):
        raise InsufficientPrecisionError(
            f"Monte Carlo error {stderr:.3g} exceeds the derivative estimate {abs(value):.3g}; increase N"
        )
    return ScalarEstimate(complex(value), stderr, float(abs(value - d2)))


# ---------------------------------------------------------------------------
# continuity of gamma -> h_gamma


@dataclass
class ContinuityTable:
    distance: np.ndarray
    difference: np.ndarray
    stderr: np.ndarray
    closed_form: np.ndarray | None  # abelian exact differences (complex)
    measured: np.ndarray | None  # matching Monte Carlo differences (complex)
    slope: float  # fitted log-log slope of difference versus distance

    @property
    def monotone(self) -> bool:
        """Nonincreasing in distance order within 3 stderr."""
        order = np.argsort(-self.distance)
        d, e = self.difference[order], self.stderr[order]
        return bool(np.all(d[1:] <= d[:-1] + 3 * np.hypot(e[1:], e[:-1])))

    def to_dict(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            if isinstance(v, np.ndarray) and np.iscomplexobj(v):
                v = {"re": v.real.tolist(), "im": v.imag.tolist()}
            elif isinstance(v, np.ndarray):
                v = v.tolist()
            out[k] = v
        return out


def continuity_experiment(gamma: PathCurve, family, s: FrameState, K: int, N: int, *,
                          basis: ModeBasis, background=None, seed: int = 0,
                          workers: int | None = None, tol: float = 1e-11, samples: int = 2048,
                          backend=None) -> ContinuityTable:
    """|<s, (h_gamma - h_gamma_k) s>| / ||s||^2 along a family gamma_k -> gamma."""
    from .geometry import curve_distance

    norm = s.norm_sq()
    dist, diff, errs, closed, raw = [], [], [], [], []
    for k, gk in enumerate(family):
        value, se, _ = weighted_holonomy_element(s, s, [gamma, gk], [1.0, -1.0], K, N, basis=basis,
                                                 background=background, seed=seed, stream=k,
                                                 workers=workers, tol=tol, backend=backend)
        dist.append(curve_distance(gamma, gk, samples))
        diff.append(float(np.linalg.norm(value, ord=2)) / norm)
        errs.append(se / norm)
        if basis.group == "U1":
            cf = (abelian_closed_form(gamma, s, s, K, basis=basis, background=background)
                  - abelian_closed_form(gk, s, s, K, basis=basis, background=background)) / norm
            closed.append(cf)
            raw.append(complex(value[0, 0]) / norm)
    dist, diff, errs = map(np.asarray, (dist, diff, errs))
    ok = (dist > 0) & (diff > 0)
    slope = float(np.polyfit(np.log(dist[ok]), np.log(diff[ok]), 1)[0]) if ok.sum() >= 2 else math.nan
    return ContinuityTable(dist, diff, errs, np.asarray(closed) if closed else None,
                           np.asarray(raw) if raw else None, slope)
