"""Structure groups, connections, holonomies and the second-order Dyson expansion.

Holonomies follow the factor order of the Dyson expansion: for p = p1 o p2
(p1 traversed first), Hol(p) = Hol(p1) Hol(p2).  Equivalently U solves
U' = U A(gamma'(t)) with U(a) = 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from . import kernels
from .errors import ConfigurationError, IntegrationError, OutOfRegimeWarning
from .geometry import PathCurve, gauss_legendre
from .spectrum import ModeBasis, OneFormCoeffs

DEFAULT_TOL = 1e-10
PROJECTION_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class GroupSpec:
    tag: str
    generators: np.ndarray  # (g, j, j) anti-hermitian, tr(T_a^* T_b) = delta_ab

    @property
    def j(self) -> int:
        return self.generators.shape[1]

    @property
    def g(self) -> int:
        return self.generators.shape[0]

    def algebra_element(self, c) -> np.ndarray:
        return np.tensordot(np.asarray(c, dtype=float), self.generators, axes=(-1, 0))

    def exp(self, c) -> np.ndarray:
        """exp(sum_a c_a T_a) via eigen-decomposition of the hermitian i X."""
        X = self.algebra_element(c)
        w, V = np.linalg.eigh(1j * X)
        return (V * np.exp(-1j * w)[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


@lru_cache(maxsize=None)
def group_spec(tag: str) -> GroupSpec:
    if tag == "U1":
        gens = np.array([[[1j]]])
    elif tag == "SU2":
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
        sz = np.array([[1, 0], [0, -1]], dtype=complex)
        gens = 1j / math.sqrt(2) * np.stack([sx, sy, sz])
    else:
        raise ConfigurationError(f"unknown structure group {tag!r}")
    gens.setflags(write=False)
    return GroupSpec(tag, gens)


@dataclass
class ConnectionSample:
    """nabla = nabla_0 + sum_i x_i e_i, with nabla_0 itself given in the e-basis."""

    basis: ModeBasis
    base: np.ndarray | None = None
    fluctuation: np.ndarray | None = None

    def __post_init__(self):
        self.base = np.zeros(0) if self.base is None else np.atleast_1d(np.asarray(self.base, float))
        self.fluctuation = (
            np.zeros(0) if self.fluctuation is None else np.atleast_1d(np.asarray(self.fluctuation, float))
        )
        if max(self.base.size, self.fluctuation.size) > self.basis.K:
            raise ConfigurationError("connection has more coefficients than the basis")
        if not (np.all(np.isfinite(self.base)) and np.all(np.isfinite(self.fluctuation))):
            raise ConfigurationError("connection coefficients must be finite")

    @property
    def coefficients(self) -> np.ndarray:
        m = max(self.base.size, self.fluctuation.size)
        out = np.zeros(m)
        out[: self.base.size] += self.base
        out[: self.fluctuation.size] += self.fluctuation
        return out

    def shifted(self, omega: OneFormCoeffs) -> "ConnectionSample":
        m = max(self.base.size, len(omega))
        base = np.zeros(m)
        base[: self.base.size] = self.base
        return ConnectionSample(self.basis, base + omega.padded(m), self.fluctuation)

    @property
    def group(self) -> GroupSpec:
        return group_spec(self.basis.group)


def evaluate_connection(conn: ConnectionSample, x, v) -> np.ndarray:
    """sum_i x_i e_i(x)(v) as a j x j anti-hermitian matrix."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.asarray(v, dtype=float)
    comps = conn.basis.evaluate(conn.coefficients, x)[0]  # (d, g)
    return conn.group.algebra_element(v @ comps)


# ---------------------------------------------------------------------------
# RK4 route (hot kernel)


def _segment_steps(path: PathCurve, level: int) -> list[int]:
    out = []
    for seg in path.segments:
        length = float(np.linalg.norm(seg.position(seg.t1) - seg.position(seg.t0)))
        length = max(length, 1e-300)
        base = 4 if length < 1e-14 else max(4, int(math.ceil(6.0 * length)))
        out.append(base * 2**level)
    return out


def path_profile(path: PathCurve, basis: ModeBasis, M: int, level: int):
    """Mode profiles at RK4 stage times: B (nsteps, 3, M, g) and step sizes H."""
    Bs, Hs = [], []
    for seg, n in zip(path.segments, _segment_steps(path, level)):
        h = (seg.t1 - seg.t0) / n
        t = seg.t0 + h * np.arange(2 * n + 1) / 2.0
        t[-1] = seg.t1
        pos, vel = seg.position(t), seg.velocity(t)
        prof = basis.scalar_profiles(pos, count=M) * vel[:, basis.mu[:M]]  # (2n+1, M)
        full = np.zeros((t.size, M, basis.g))
        full[:, np.arange(M), basis.gen[:M]] = prof
        idx = np.arange(n)[:, None] * 2 + np.array([0, 1, 2])[None, :]
        Bs.append(full[idx])
        Hs.append(np.full(n, h))
    B = np.ascontiguousarray(np.concatenate(Bs))
    H = np.ascontiguousarray(np.concatenate(Hs))
    return B, H


def batch_holonomy(path: PathCurve, basis: ModeBasis, X: np.ndarray, level: int,
                   profile=None, backend: str | None = None) -> np.ndarray:
    """Holonomies (N, j, j) for a batch of coefficient vectors X (N, M)."""
    X = np.ascontiguousarray(X, dtype=float)
    if X.ndim != 2:
        raise ConfigurationError("coefficient batch must be two-dimensional")
    G = group_spec(basis.group)
    B, H = profile if profile is not None else path_profile(path, basis, X.shape[1], level)
    out = np.empty((X.shape[0], G.j, G.j), dtype=complex)
    kernels.rk4_holonomy(X, B, np.ascontiguousarray(G.generators), H, out, backend=backend)
    return out


def unitarity_defect(U: np.ndarray) -> float:
    U = np.asarray(U)
    j = U.shape[-1]
    D = np.conj(np.swapaxes(U, -1, -2)) @ U - np.eye(j)
    return float(np.max(np.linalg.norm(D, ord=2, axis=(-2, -1))))


def polar_project(U: np.ndarray) -> np.ndarray:
    W, _, Vh = np.linalg.svd(U)
    return W @ Vh


@dataclass
class HolonomyValue:
    matrix: np.ndarray
    tolerance: float
    steps: int
    projected: bool = False
    path_id: str | None = None

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def holonomy(path: PathCurve, conn: ConnectionSample, tol: float = DEFAULT_TOL,
             max_level: int = 14, backend: str | None = None) -> HolonomyValue:
    """Hol(p, nabla) by RK4 with step halving until converged and unitary to ``tol``."""
    coeffs = conn.coefficients[None, :]
    if coeffs.shape[1] == 0:
        coeffs = np.zeros((1, 1))
    prev = batch_holonomy(path, conn.basis, coeffs, 0, backend=backend)[0]
    for level in range(1, max_level + 1):
        cur = batch_holonomy(path, conn.basis, coeffs, level, backend=backend)[0]
        diff = float(np.linalg.norm(cur - prev, ord=2))
        defect = unitarity_defect(cur)
        if diff <= tol and defect <= tol:
            projected = defect > PROJECTION_THRESHOLD
            if projected:
                cur = polar_project(cur)
            return HolonomyValue(cur, diff, sum(_segment_steps(path, level)), projected)
        prev = cur
    raise IntegrationError(
        f"holonomy did not converge to {tol:g} (last step difference {diff:.3g})"
    )


def choose_level(path: PathCurve, basis: ModeBasis, X: np.ndarray, tol: float,
                 max_level: int = 12, backend: str | None = None) -> int:
    """Smallest halving level whose Richardson error estimate |U_l - U_{l-1}| / 15 is <= tol on X."""
    prev = batch_holonomy(path, basis, X, 0, backend=backend)
    for level in range(1, max_level + 1):
        cur = batch_holonomy(path, basis, X, level, backend=backend)
        diff = float(np.max(np.linalg.norm(cur - prev, ord=2, axis=(-2, -1))))
        if diff / 15.0 <= tol:
            return level
        prev = cur
    raise IntegrationError(f"batch holonomy did not converge to {tol:g}; last diff {diff:.3g}")


# ---------------------------------------------------------------------------
# line integrals (abelian closed forms)


def mode_line_integrals(path: PathCurve, basis: ModeBasis, count: int | None = None,
                        tol: float = 1e-13) -> np.ndarray:
    """c_i = int_p e_i(gamma'(t)) dt, the scalar coefficient of T_{a_i} per mode."""
    count = basis.K if count is None else count

    def at(nodes):
        out = np.zeros(count)
        for seg in path.segments:
            x, w = gauss_legendre(nodes)
            t = seg.t0 + (seg.t1 - seg.t0) * x
            prof = basis.scalar_profiles(seg.position(t), count=count)
            prof *= seg.velocity(t)[:, basis.mu[:count]]
            out += (seg.t1 - seg.t0) * (w @ prof)
        return out

    nodes = 32
    prev = at(nodes)
    while nodes < 4096:
        nodes *= 2
        cur = at(nodes)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur
    raise IntegrationError("line integrals of modes did not converge")


# ---------------------------------------------------------------------------
# Dyson expansion


def _connection_matrix(basis: ModeBasis, coeffs: np.ndarray, path: PathCurve, t):
    t = np.atleast_1d(t)
    G = group_spec(basis.group)
    if coeffs.size == 0:
        return np.zeros((t.size, G.j, G.j), dtype=complex)
    comps = basis.evaluate(coeffs, path.position(t))  # (m, d, g)
    c = np.einsum("md,mdg->mg", path.velocity(t), comps)
    return G.algebra_element(c)


def transport(path: PathCurve, conn: ConnectionSample, times, rtol: float = 1e-12) -> np.ndarray:
    """L(t) = Hol(gamma|[t_start, t]) at sorted times, by an adaptive DOP853 solve."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ConfigurationError("transport times must be sorted")
    G = group_spec(conn.basis.group)
    j = G.j
    coeffs = conn.coefficients
    out = np.empty((times.size, j, j), dtype=complex)
    U0 = np.eye(j, dtype=complex)

    def rhs(t, y):
        U = (y[: j * j] + 1j * y[j * j :]).reshape(j, j)
        dU = U @ _connection_matrix(conn.basis, coeffs, seg_path, t)[0]
        return np.concatenate([dU.real.ravel(), dU.imag.ravel()])

    for k, seg in enumerate(path.segments):
        seg_path = PathCurve([seg])
        last = k == len(path.segments) - 1
        mask = (times >= seg.t0) & ((times <= seg.t1) if last else (times < seg.t1))
        y0 = np.concatenate([U0.real.ravel(), U0.imag.ravel()])
        sol = solve_ivp(rhs, (seg.t0, seg.t1), y0, method="DOP853", dense_output=True,
                        rtol=rtol, atol=rtol * 1e-2)
        if sol.status != 0:
            raise IntegrationError(f"transport failed: {sol.message}")
        pts = times[mask]
        if pts.size:
            Y = sol.sol(pts)
            out[mask] = (Y[: j * j] + 1j * Y[j * j :]).T.reshape(-1, j, j)
        yend = sol.y[:, -1]
        U0 = (yend[: j * j] + 1j * yend[j * j :]).reshape(j, j)
    return out


def dyson_terms(path: PathCurve, conn: ConnectionSample, omega: OneFormCoeffs,
                order: int = 2, tol: float = 1e-10, max_nodes: int = 256) -> list[np.ndarray]:
    """Orders 0..order of the expansion of Hol(p, nabla + omega) in omega.

    The second-order term is the ordered double integral over t1 <= t2, which
    equals the displayed factor-1/2 square integral once the integrand is
    symmetrized.  Quadrature is nested Gauss-Legendre per segment, doubled
    until all terms change by less than ``tol``.
    """
    if not 0 <= order <= 2:
        raise ConfigurationError("dyson_terms supports order 0, 1 or 2")
    basis = conn.basis
    w_coeffs = omega.coeffs
    if w_coeffs.size > basis.K:
        raise ConfigurationError("omega has more coefficients than the basis")

    def compute(n):
        x, w = gauss_legendre(n)
        segs = path.segments
        outer_t, outer_w, inner_t, inner_w, owner = [], [], [], [], []
        for k, seg in enumerate(segs):
            L = seg.t1 - seg.t0
            t2 = seg.t0 + L * x
            outer_t.append(t2)
            outer_w.append(L * w)
            # inner nodes on [seg.t0, t2] for every outer node
            inner_t.append(seg.t0 + (t2 - seg.t0)[:, None] * x[None, :])
            inner_w.append((t2 - seg.t0)[:, None] * w[None, :])
            owner.append(np.full(n, k))
        outer_t = np.concatenate(outer_t)
        outer_w = np.concatenate(outer_w)
        inner_t = np.concatenate(inner_t)  # (S n, n)
        inner_w = np.concatenate(inner_w)
        all_t = np.concatenate([outer_t, inner_t.ravel(), [path.t_end]])
        order_idx = np.argsort(all_t, kind="stable")
        Ls = np.empty((all_t.size, *(2 * [group_spec(basis.group).j])), dtype=complex)
        Ls[order_idx] = transport(path, conn, all_t[order_idx])
        H = Ls[-1]
        om = _connection_matrix(basis, w_coeffs, path, all_t[:-1])
        Lm = Ls[:-1]
        Bt = Lm @ om @ np.conj(np.swapaxes(Lm, -1, -2))  # L omega L^*
        no = outer_t.size
        B_outer = Bt[:no]
        B_inner = Bt[no:].reshape(no, n, *Bt.shape[1:])
        first = np.einsum("m,mij->ij", outer_w, B_outer)
        terms = [H, first @ H]
        if order >= 2:
            seg_full = np.stack(
                [np.einsum("m,mij->ij", outer_w[k * n : (k + 1) * n], B_outer[k * n : (k + 1) * n])
                 for k in range(len(path.segments))]
            )
            before = np.cumsum(seg_full, axis=0) - seg_full  # integral over earlier segments
            owner_seg = np.repeat(np.arange(len(path.segments)), n)
            inner = before[owner_seg] + np.einsum("mq,mqij->mij", inner_w, B_inner)
            second = np.einsum("m,mij,mjk->ik", outer_w, inner, B_outer)
            terms.append(second @ H)
        return terms[: order + 1]

    n = 16
    prev = compute(n)
    while True:
        n *= 2
        cur = compute(n)
        change = max(float(np.linalg.norm(a - b, ord=2)) for a, b in zip(cur, prev))
        if change <= tol:
            return cur
        if n >= max_nodes:
            raise IntegrationError(f"Dyson quadrature stalled at change {change:.3g}")
        prev = cur


def dyson_remainder_bound(omega_sup: float, length: float) -> float:
    """1/2 (||omega||_inf |p|)^3, valid for ||omega||_inf |p| <= 1.

    Outside that regime an OutOfRegimeWarning is issued and the Taylor bound
    (1/6) x^3 e^x is returned instead.
    """
    x = float(omega_sup) * float(length)
    if x < 0:
        raise ConfigurationError("norms and lengths are nonnegative")
    if x <= 1.0:
        return 0.5 * x**3
    warnings.warn(f"||omega|| |p| = {x:.3g} > 1; returning the Taylor bound", OutOfRegimeWarning,
                  stacklevel=2)
    return x**3 * math.exp(x) / 6.0


def term_bounds(omega_sup: float, length: float) -> tuple[float, float]:
    x = float(omega_sup) * float(length)
    return x, 0.5 * x**2
