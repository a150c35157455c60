"""Hodge-Laplace eigenbasis of g-valued one-forms on the flat torus.

On T^d with the flat metric the one-form Laplacian acts component-wise, so
the eigenforms are ``trig(n . x) dx^mu (x) T_a`` with eigenvalue ``|n|^2``.
Only half of the lattice is enumerated (first nonzero entry of n positive),
each n != 0 carrying a cos and a sin mode.

The Sobolev-type product weights an eigenform by ``(1 + lambda^p)^2`` and the
normalized basis is ``e_i = f_i / (1 + lambda_i^p)``.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import ConfigurationError, TruncationWarning
from .geometry import TWO_PI

GROUP_DIMS = {"U1": 1, "SU2": 3}


def default_p(d: int) -> float:
    return (2 * d - 1) / 4 + 0.05


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _half_lattice(d: int, radius_sq: int) -> np.ndarray:
    r = int(math.isqrt(radius_sq))
    axes = [np.arange(-r, r + 1)] * d
    n = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    n = n[(n**2).sum(1) <= radius_sq]
    # keep n = 0 and the half with first nonzero entry positive
    first = np.zeros(len(n), dtype=int)
    for mu in range(d - 1, -1, -1):
        nz = n[:, mu] != 0
        first[nz] = n[nz, mu]
    return n[(first > 0) | np.all(n == 0, axis=1)]


@dataclass(frozen=True)
class Mode:
    index: int  # 1-based position in the sorted basis
    n: tuple
    phase: str
    mu: int
    gen: int
    eigenvalue: float
    norm: float  # L2 normalization constant of f_i
    weight: float  # 1 / (1 + lambda^p)

    @property
    def sup_norm(self) -> float:
        return self.norm * self.weight


@dataclass(frozen=True, eq=False)
class ModeBasis:
    d: int
    group: str
    p: float
    K: int
    n: np.ndarray  # (K, d) int
    mu: np.ndarray  # (K,)
    phase: np.ndarray  # (K,) 0 = cos, 1 = sin
    gen: np.ndarray  # (K,)
    eigenvalues: np.ndarray
    norms: np.ndarray
    weights: np.ndarray
    complete_through: float  # every mode with lambda <= this value is present

    def __post_init__(self):
        for name in ("n", "mu", "phase", "gen", "eigenvalues", "norms", "weights"):
            getattr(self, name).setflags(write=False)

    @property
    def g(self) -> int:
        return GROUP_DIMS[self.group]

    def __len__(self):
        return self.K

    @property
    def modes(self) -> list[Mode]:
        return [self.mode(i) for i in range(1, self.K + 1)]

    def mode(self, index: int) -> Mode:
        k = index - 1
        return Mode(
            index=index,
            n=tuple(int(v) for v in self.n[k]),
            phase="sin" if self.phase[k] else "cos",
            mu=int(self.mu[k]),
            gen=int(self.gen[k]),
            eigenvalue=float(self.eigenvalues[k]),
            norm=float(self.norms[k]),
            weight=float(self.weights[k]),
        )

    @property
    def sup_norms(self) -> np.ndarray:
        """Exact ||e_i||_inf (pointwise fibre norm maximized over the torus)."""
        return self.norms * self.weights

    def same_modes(self, other: "ModeBasis") -> bool:
        return (
            self.d == other.d
            and self.group == other.group
            and self.p == other.p
            and self.K == other.K
            and all(
                np.array_equal(getattr(self, a), getattr(other, a))
                for a in ("n", "mu", "phase", "gen", "eigenvalues", "norms", "weights")
            )
        )

    # pointwise evaluation -------------------------------------------------
    def scalar_profiles(self, x, normalized: bool = True, count: int | None = None) -> np.ndarray:
        """s_i(x) = c_i [w_i] trig(n_i . x), shape (m, count)."""
        count = self.K if count is None else count
        x = np.atleast_2d(np.asarray(x, dtype=float))
        arg = x @ self.n[:count].T.astype(float)
        trig = np.where(self.phase[:count] == 0, np.cos(arg), np.sin(arg))
        scale = self.norms[:count] * (self.weights[:count] if normalized else 1.0)
        return trig * scale

    def evaluate(self, coeffs, x, normalized: bool = True) -> np.ndarray:
        """Components omega_{mu a}(x) of sum_i coeffs_i e_i, shape (m, d, g)."""
        coeffs = np.asarray(coeffs, dtype=float)
        m = coeffs.size
        prof = self.scalar_profiles(x, normalized, count=m) * coeffs
        out = np.zeros((prof.shape[0], self.d, self.g))
        np.add.at(out, (slice(None), self.mu[:m], self.gen[:m]), prof)
        return out

    def closed_form(self, index: int, normalized: bool = False) -> "ClosedFormOneForm":
        coeffs = np.zeros(index)
        coeffs[-1] = 1.0
        return ClosedFormOneForm(lambda x: self.evaluate(coeffs, x, normalized), self.d, self.g)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "n", "mu", "phase", "a", "lambda", "w", "sup_norm"])
        for m in self.modes:
            w.writerow(
                [m.index, " ".join(map(str, m.n)), m.mu + 1, m.phase, m.gen + 1,
                 repr(m.eigenvalue), repr(m.weight), repr(m.sup_norm)]
            )
        return buf.getvalue()


def build_basis(d: int, group: str = "U1", p: float | None = None, K: int = 1,
                lambda_max: float | None = None) -> ModeBasis:
    """The K lowest Hodge-Laplace eigenforms, sorted by (|n|^2, n, mu, phase, a)."""
    if d not in (1, 2, 3):
        raise ConfigurationError(f"d must be 1, 2 or 3, got {d}")
    if group not in GROUP_DIMS:
        raise ConfigurationError(f"unknown structure group {group!r}")
    p = default_p(d) if p is None else float(p)
    if not p > 0:
        raise ConfigurationError("Sobolev exponent p must be positive")
    if K < 1:
        raise ConfigurationError("cutoff K must be at least 1")
    g = GROUP_DIMS[group]
    per_point = d * g

    if lambda_max is not None:
        window = int(math.floor(lambda_max))
        n_half = _half_lattice(d, window)
        count = per_point * (2 * len(n_half) - 1)
        if count < K:
            raise ConfigurationError(
                f"K={K} exceeds the {count} modes with lambda <= {lambda_max}"
            )
    else:
        radius = max(1.0, (K / (per_point * unit_ball_volume(d))) ** (1 / d) + math.sqrt(d))
        window = int(math.ceil(radius**2))
        while True:
            n_half = _half_lattice(d, window)
            if per_point * (2 * len(n_half) - 1) >= K:
                break
            window *= 2

    rows = []
    for n in n_half:
        lam = int(n @ n)
        phases = (0,) if lam == 0 else (0, 1)
        for ph in phases:
            for mu in range(d):
                for a in range(g):
                    rows.append((lam, *n, mu, ph, a))
    rows = np.array(rows, dtype=np.int64)
    # lexicographic sort: (|n|^2, n_1..n_d, mu, phase, a)
    order = np.lexsort(rows.T[::-1])
    rows = rows[order]
    lam_all = rows[:, 0]
    rows = rows[:K]
    lam = rows[:, 0].astype(float)
    nvec = rows[:, 1 : 1 + d]
    mu = rows[:, 1 + d]
    phase = rows[:, 2 + d]
    gen = rows[:, 3 + d]
    vol = TWO_PI**d
    norms = np.where(lam == 0, 1.0 / math.sqrt(vol), math.sqrt(2.0 / vol))
    weights = 1.0 / (1.0 + lam**p)
    last = lam[-1]
    complete = last if (K == len(lam_all) or lam_all[K] > last) else last - 1
    return ModeBasis(d, group, p, K, nvec, mu, phase, gen, lam, norms, weights, float(complete))


# ---------------------------------------------------------------------------
# coefficient vectors and closed-form one-forms


@dataclass
class OneFormCoeffs:
    """omega = sum_i a_i e_i, coefficients in the Sobolev-orthonormal basis."""

    coeffs: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float)).copy()
        if not np.all(np.isfinite(self.coeffs)):
            raise ConfigurationError("one-form coefficients must be finite")

    @classmethod
    def unit(cls, index: int, size: int | None = None) -> "OneFormCoeffs":
        c = np.zeros(max(index, size or 0))
        c[index - 1] = 1.0
        return cls(c)

    @classmethod
    def zero(cls, size: int = 0) -> "OneFormCoeffs":
        return cls(np.zeros(size))

    def __len__(self):
        return self.coeffs.size

    def padded(self, size: int) -> np.ndarray:
        if size < self.coeffs.size:
            if np.any(self.coeffs[size:] != 0):
                raise ConfigurationError("one-form has components beyond the requested cutoff")
            return self.coeffs[:size].copy()
        out = np.zeros(size)
        out[: self.coeffs.size] = self.coeffs
        return out

    def _binary(self, other, op):
        m = max(len(self), len(other))
        return OneFormCoeffs(op(self.padded(m), other.padded(m)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return OneFormCoeffs(-self.coeffs)

    def __mul__(self, s):
        return OneFormCoeffs(float(s) * self.coeffs)

    __rmul__ = __mul__

    def sobolev_norm_sq(self) -> float:
        return float(self.coeffs @ self.coeffs)


@dataclass
class ClosedFormOneForm:
    """One-form given by a vectorized callable ``x (m, d) -> components (m, d, g)``."""

    fn: Callable
    d: int
    g: int = 1

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.asarray(self.fn(x), dtype=float).reshape(x.shape[0], self.d, self.g)

    @classmethod
    def from_coeffs(cls, coeffs: OneFormCoeffs, basis: ModeBasis) -> "ClosedFormOneForm":
        c = coeffs.coeffs
        return cls(lambda x: basis.evaluate(c, x), basis.d, basis.g)

    def __add__(self, other):
        return ClosedFormOneForm(lambda x: self(x) + other(x), self.d, self.g)

    def __mul__(self, s):
        return ClosedFormOneForm(lambda x: float(s) * self(x), self.d, self.g)

    __rmul__ = __mul__


def torus_grid(d: int, G: int) -> np.ndarray:
    axes = [np.arange(G) * (TWO_PI / G)] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def _fourier(form: ClosedFormOneForm, G: int) -> np.ndarray:
    vals = form(torus_grid(form.d, G)).reshape((G,) * form.d + (form.d * form.g,))
    return np.fft.fftn(vals, axes=tuple(range(form.d))) / G**form.d


def sobolev_inner(u, v, basis: ModeBasis | None = None, p: float | None = None,
                  grid: int = 64) -> float:
    """<u, v>_s = int ((1 + Delta^p) u, (1 + Delta^p) v) dg.

    Coefficient inputs reduce to the Euclidean product.  Closed-form inputs
    are sampled on a uniform grid and (1 + Delta^p) is applied spectrally.
    """
    if isinstance(u, OneFormCoeffs) and isinstance(v, OneFormCoeffs):
        m = max(len(u), len(v))
        return float(u.padded(m) @ v.padded(m))
    if isinstance(u, OneFormCoeffs) or isinstance(v, OneFormCoeffs):
        if basis is None:
            raise ConfigurationError("mixing coefficients and closed forms needs a basis")
        u = ClosedFormOneForm.from_coeffs(u, basis) if isinstance(u, OneFormCoeffs) else u
        v = ClosedFormOneForm.from_coeffs(v, basis) if isinstance(v, OneFormCoeffs) else v
    if p is None:
        if basis is None:
            raise ConfigurationError("closed-form Sobolev product needs p (or a basis)")
        p = basis.p
    d = u.d
    uh, vh = _fourier(u, grid), _fourier(v, grid)
    k = np.fft.fftfreq(grid, 1.0 / grid)
    ksq = sum(np.meshgrid(*([k**2] * d), indexing="ij"))
    wt = (1.0 + ksq**p) ** 2
    dens = wt[..., None] * np.real(np.conj(uh) * vh)
    edge = np.zeros(ksq.shape, dtype=bool)
    for ax in range(d):
        sl = [slice(None)] * d
        sl[ax] = grid // 2
        edge[tuple(sl)] = True
    tail = float(np.sum(wt[edge][..., None] * (np.abs(uh[edge]) ** 2 + np.abs(vh[edge]) ** 2)))
    if tail > 1e-20:
        warnings.warn(
            f"closed-form input not resolved on a {grid}-point grid; Nyquist-band "
            f"Sobolev energy {tail * TWO_PI**d:.3g}",
            TruncationWarning,
            stacklevel=2,
        )
    return float(TWO_PI**d * np.sum(dens))


def expand(omega: ClosedFormOneForm, basis: ModeBasis, grid: int | None = None) -> OneFormCoeffs:
    """a_i = <omega, e_i>_s by periodic-grid quadrature; L2 residual recorded."""
    if grid is None:
        grid = max(32, 4 * int(np.max(np.abs(basis.n))) + 8)
    pts = torus_grid(basis.d, grid)
    vals = omega(pts)  # (m, d, g)
    comp = vals[:, basis.mu, basis.gen]  # (m, K)
    f = basis.scalar_profiles(pts, normalized=False)
    dv = (TWO_PI / grid) ** basis.d
    l2 = np.sum(comp * f, axis=0) * dv  # <omega, f_i>_2
    a = l2 / basis.weights  # (1 + lambda^p) <omega, f_i>_2
    recon = basis.evaluate(a, pts)
    resid = float(np.sqrt(np.sum((vals - recon) ** 2) * dv))
    if resid > 1e-10:
        warnings.warn(f"one-form has out-of-span L2 residual {resid:.3g}", TruncationWarning,
                      stacklevel=2)
    return OneFormCoeffs(a, residual=resid)


def sup_norm(coeffs: OneFormCoeffs, basis: ModeBasis, grid: int | None = None) -> float:
    """sup_x |omega(x)| for omega = sum a_i e_i (grid search refined locally)."""
    c = coeffs.coeffs
    if not np.any(c):
        return 0.0
    nmax = int(np.max(np.abs(basis.n[: c.size]))) if c.size else 0
    if np.all(basis.eigenvalues[: c.size][c != 0] == 0):
        return float(np.linalg.norm(basis.evaluate(c, np.zeros((1, basis.d)))))
    if grid is None:
        grid = max(16, 8 * nmax + 1) if basis.d < 3 else max(12, 4 * nmax + 1)
    pts = torus_grid(basis.d, grid)

    def sq(x):
        return np.sum(basis.evaluate(c, x) ** 2, axis=(1, 2))

    vals = sq(pts)
    best = float(vals.max())
    for k in np.argsort(vals)[-4:]:
        res = optimize.minimize(lambda y: -sq(y[None, :])[0], pts[k], method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        best = max(best, -float(res.fun))
    return math.sqrt(best)


# ---------------------------------------------------------------------------
# summability and Weyl law


def p_criterion(d: int, p: float) -> bool:
    """Generic-manifold condition (1/d)((d-1)/2 - 2p) < -1/2."""
    return ((d - 1) / 2 - 2 * p) / d < -0.5


def torus_p_criterion(d: int, p: float) -> bool:
    """Sharper flat-torus sufficient condition 4p/d > 1 (constant sup norms)."""
    return 4 * p / d > 1


def eigenvalue_lower_bound(i, d: int, g: int):
    """lambda_i >= ((i / (d g omega_d))^(1/d) - sqrt(d)/2)^2, from the lattice-count bound."""
    r = (np.asarray(i, dtype=float) / (d * g * unit_ball_volume(d))) ** (1 / d) - math.sqrt(d) / 2
    return np.maximum(r, 0.0) ** 2


def analytic_tail_bound(d: int, g: int, p: float, start: float) -> float:
    """Upper bound for sum_{i > start} ||e_i||_inf^2 via integral comparison."""
    if not torus_p_criterion(d, p):
        return math.inf
    c2 = 2.0 / TWO_PI**d

    def f(x):
        return c2 / (1.0 + eigenvalue_lower_bound(x, d, g) ** p) ** 2

    # split so quad sees the flat region separately
    knee = d * g * unit_ball_volume(d) * (math.sqrt(d) / 2 + 1) ** d
    total = 0.0
    a = float(start)
    if a < knee:
        total += integrate.quad(f, a, knee, limit=200)[0]
        a = knee
    far = max(a, 1.0) * 1e4
    total += integrate.quad(f, a, far, limit=400, epsabs=1e-16, epsrel=1e-12)[0]
    return total + _power_tail(d, g, p, far)


def _power_tail(d: int, g: int, p: float, start: float) -> float:
    """Closed form of int_start^inf c2 lambda_lb(x)^(-2p) dx, an upper bound for the far tail.

    With lambda_lb = (alpha x^(1/d) - beta)^2 and y = alpha x^(1/d) - beta the
    integrand becomes a finite binomial sum of powers of y.
    """
    c2 = 2.0 / TWO_PI**d
    alpha = (d * g * unit_ball_volume(d)) ** (-1.0 / d)
    beta = math.sqrt(d) / 2
    y0 = alpha * start ** (1.0 / d) - beta
    if y0 <= 0:
        raise ConfigurationError("power tail needs the lattice bound to be positive")
    total = sum(math.comb(d - 1, k) * beta ** (d - 1 - k) * y0 ** (k + 1 - 4 * p) / (4 * p - k - 1)
                for k in range(d))
    return c2 * d / alpha**d * total


def condition_tail(basis: ModeBasis, from_index: int) -> float:
    """sum_{i >= from_index} ||e_i||_inf^2: built modes exactly, the rest bounded."""
    if from_index < 1:
        raise ConfigurationError("from_index is 1-based")
    sq = basis.sup_norms**2
    built = float(np.sum(sq[from_index - 1 :])) if from_index <= basis.K else 0.0
    start = max(basis.K, from_index - 1)
    return built + analytic_tail_bound(basis.d, basis.g, basis.p, start)


def weyl_constant(d: int, g: int) -> float:
    """Asymptotic N(lambda) / lambda^(d/2) for the full g-valued one-form spectrum."""
    return d * g * unit_ball_volume(d)


def weyl_check(basis: ModeBasis) -> list[tuple[float, int, float]]:
    """(lambda, N(lambda), N(lambda)/lambda^(d/2)) over fully built eigenvalues."""
    lam = basis.eigenvalues
    out = []
    for value in np.unique(lam):
        if value > basis.complete_through:
            break
        count = int(np.searchsorted(lam, value, side="right"))
        ratio = count / value ** (basis.d / 2) if value > 0 else math.inf
        out.append((float(value), count, ratio))
    return out


def weyl_deviation(rows, d: int, g: int, decade: float = 10.0) -> float:
    """Max relative deviation of the ratios from the Weyl constant in the top decade."""
    rows = [r for r in rows if r[0] > 0]
    top = rows[-1][0]
    c = weyl_constant(d, g)
    return max(abs(r[2] / c - 1.0) for r in rows if r[0] >= top / decade)
