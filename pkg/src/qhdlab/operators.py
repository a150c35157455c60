"""Heat-kernel smeared electric operators, Wilson-plaquette curvature and the
Yang-Mills energy built from them.

The electric quadratic form uses the positive convention of
``hilbert.quadratic_form_element``.  Double sums over modes are contracted
with the exact L^2 orthonormality of the unnormalized eigenforms f_k.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigurationError, InsufficientPrecisionError
from .expectation import MC_TOL, ScalarEstimate, abelian_closed_form, expect_holonomy, grid_points
from .geometry import PathCurve, _as_coords
from .hilbert import FrameState, pair_data
from .spectrum import ModeBasis, OneFormCoeffs


@dataclass(frozen=True)
class HeatKernelTruncation:
    t: float
    K: int
    coefficients: np.ndarray  # e^{-t lambda_k}, k = 1..K


def heat_kernel(basis: ModeBasis, t: float, K: int | None = None) -> HeatKernelTruncation:
    K = basis.K if K is None else K
    if not t > 0:
        raise ConfigurationError("diffusion time must be positive")
    if not 0 <= K <= basis.K:
        raise ConfigurationError("cutoff outside the built basis")
    return HeatKernelTruncation(float(t), K, np.exp(-t * basis.eigenvalues[:K]))


def _sobolev_factor(basis: ModeBasis, K: int) -> np.ndarray:
    """(1 + lambda^p): coefficient of f_k in the e-basis."""
    return 1.0 / basis.weights[:K]


def smeared_e(y, v, t: float, K: int, basis: ModeBasis) -> OneFormCoeffs:
    """e-basis coefficients of x -> (K_t(x, y), v)_2 for a cotangent g-vector v (d, g)."""
    y = _as_coords(y)
    v = np.asarray(v, dtype=float).reshape(basis.d, basis.g)
    hk = heat_kernel(basis, t, K)
    f_at_y = basis.scalar_profiles(y, normalized=False, count=K)[0]  # f_k(y) component
    pairing = f_at_y * v[basis.mu[:K], basis.gen[:K]]
    return OneFormCoeffs(hk.coefficients * _sobolev_factor(basis, K) * pairing)


def _diagonal_quadratic(s: FrameState, K: int) -> np.ndarray:
    """q_k = <s, E_{e_k} E_{e_k} s> / ||s||^2 for k = 1..K (positive convention)."""
    coef, delta, _ = pair_data(s, s, extra=np.zeros(K))
    G = np.exp(-0.25 * np.sum(delta**2, axis=1))
    dk = delta[:, :K]
    q = np.sum((coef * G)[:, None] * (0.5 - 0.25 * dk**2), axis=0)
    return (q / s.norm_sq()).real


def e_squared_t_expectation(s: FrameState, t: float, K: int, basis: ModeBasis) -> float:
    """<s, E^2_t s> / ||s||^2 = sum_k e^{-2 t lambda_k} (1 + lambda_k^p)^2 q_k."""
    hk = heat_kernel(basis, t, K)
    if K == 0:
        return 0.0
    return float(np.sum(hk.coefficients**2 * _sobolev_factor(basis, K) ** 2 * _diagonal_quadratic(s, K)))


def e_squared_g_expectation(s: FrameState, K: int, basis: ModeBasis) -> float:
    """Spectral weight g(x) = 1/(1 + x^p) in place of the heat kernel: sum_k w_k^2 q_k."""
    if not 0 <= K <= basis.K:
        raise ConfigurationError("cutoff outside the built basis")
    if K == 0:
        return 0.0
    return float(np.sum(basis.weights[:K] ** 2 * _diagonal_quadratic(s, K)))


def plaquette_curvature(s: FrameState, x, plane, eps: float, K: int, N: int, *,
                        basis: ModeBasis, background=None, seed: int = 0, stream: int = 0,
                        workers: int | None = None, tol: float = MC_TOL,
                        exact: bool = False) -> ScalarEstimate:
    """(2/eps^4) Re tr(1 - <Hol(square_eps)>) in the (mu, nu) plane at x.

    With ``exact=True`` the abelian closed form replaces Monte Carlo (U(1) only).
    """
    if basis.d < 2:
        raise ConfigurationError("plaquettes need d >= 2")
    if not 0 < eps <= math.pi / 4:
        raise ConfigurationError("eps must lie in (0, pi/4]")
    mu, nu = plane
    loop = PathCurve.square(_as_coords(x), mu, nu, eps)
    j = 1 if basis.group == "U1" else 2
    scale = 2.0 / eps**4
    if exact:
        w = abelian_closed_form(loop, s, s, K, basis=basis, background=background) / s.norm_sq()
        return ScalarEstimate(complex(scale * (1.0 - w.real)), 0.0)
    r = expect_holonomy(loop, s, K, N, basis=basis, background=background, seed=seed,
                        stream=stream, workers=workers, tol=tol)
    value = scale * float(np.real(j - np.trace(r.value)))
    stderr = scale * math.sqrt(j) * r.mc_stderr
    if stderr > 0 and stderr > abs(value):
        raise InsufficientPrecisionError(
            f"plaquette noise {stderr:.3g} exceeds the signal {abs(value):.3g}; increase N or eps"
        )
    return ScalarEstimate(complex(value), stderr)


@dataclass
class EnergyReport:
    electric: float
    magnetic: float
    electric_error: float
    magnetic_error: float
    params: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return self.electric + self.magnetic

    def to_dict(self) -> dict:
        out = asdict(self)
        out["total"] = self.total
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    CSV_FIELDS = ("t", "eps", "K", "N", "electric", "magnetic", "total", "electric_error", "magnetic_error")

    def csv_row(self, header: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(self.CSV_FIELDS)
        d = {**self.params, **self.to_dict()}
        w.writerow([d.get(k) for k in self.CSV_FIELDS])
        return buf.getvalue()


def yang_mills_energy(s: FrameState, t: float, eps: float, K: int, N: int, *, basis: ModeBasis,
                      background=None, grid: int = 2, seed: int = 0, workers: int | None = None,
                      tol: float = MC_TOL, exact: bool = False) -> EnergyReport:
    """Electric part E^2_t plus the volume-weighted plaquette sum over all planes and grid sites."""
    electric = e_squared_t_expectation(s, t, K, basis)
    magnetic, var = 0.0, 0.0
    if basis.d >= 2 and (K > 0 or background is not None):
        cell = (2 * math.pi / grid) ** basis.d
        stream = 0
        for x in grid_points(basis.d, grid):
            for mu in range(basis.d):
                for nu in range(mu + 1, basis.d):
                    r = plaquette_curvature(s, x, (mu, nu), eps, K, N, basis=basis, background=background,
                                            seed=seed, stream=stream, workers=workers, tol=tol,
                                            exact=exact)
                    magnetic += cell * r.value.real
                    var += (cell * r.stderr) ** 2
                    stream += 1
    return EnergyReport(electric, magnetic, 0.0, math.sqrt(var),
                        {"t": t, "eps": eps, "K": K, "N": N, "grid": grid})
