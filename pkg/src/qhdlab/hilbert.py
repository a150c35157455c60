"""Coherent-state frame for L^2 of connection space.

States are finite sums s = sum_a c_a U_{omega_a} Phi of translated ground
states.  With the per-mode density e^{-x^2}/sqrt(pi) and (U_omega xi)(x) =
xi(x - omega), every overlap is a Gaussian in the Sobolev distance of the
shifts, so all matrix elements below are closed form.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, IllConditionedFrameWarning
from .spectrum import OneFormCoeffs

MERGE_TOL = 1e-12
CONDITION_LIMIT = 1e10


def _as_coeffs(w) -> np.ndarray:
    if isinstance(w, OneFormCoeffs):
        return w.coeffs
    return np.atleast_1d(np.asarray(w, dtype=float))


def _pad(a: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(a.shape[:-1] + (m,))
    out[..., : a.shape[-1]] = a
    return out


class FrameState:
    """Immutable finite combination of coherent states U_omega Phi."""

    __slots__ = ("_amps", "_shifts")

    def __init__(self, terms=None):
        terms = [(complex(1.0), np.zeros(0))] if terms is None else list(terms)
        if not terms:
            raise ConfigurationError("a frame state needs at least one term")
        m = max(_as_coeffs(w).size for _, w in terms)
        amps, shifts = [], []
        for c, w in terms:
            w = _pad(_as_coeffs(w), m)
            if not np.all(np.isfinite(w)) or not np.isfinite(complex(c)):
                raise ConfigurationError("frame state entries must be finite")
            for k, v in enumerate(shifts):
                if np.linalg.norm(v - w) <= MERGE_TOL:
                    amps[k] += complex(c)
                    break
            else:
                amps.append(complex(c))
                shifts.append(w)
        self._amps = np.array(amps, dtype=complex)
        self._shifts = np.array(shifts, dtype=float).reshape(len(amps), m)
        self._amps.setflags(write=False)
        self._shifts.setflags(write=False)

    @classmethod
    def ground(cls) -> "FrameState":
        return cls()

    @classmethod
    def coherent(cls, omega, amplitude: complex = 1.0) -> "FrameState":
        return cls([(amplitude, omega)])

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def shifts(self) -> np.ndarray:
        """(terms, m) shift coefficient matrix."""
        return self._shifts

    @property
    def width(self) -> int:
        return self._shifts.shape[1]

    def __len__(self):
        return self._amps.size

    def padded_shifts(self, m: int) -> np.ndarray:
        if m < self.width and np.any(self._shifts[:, m:] != 0):
            raise ConfigurationError("frame shifts extend beyond the requested cutoff")
        return _pad(self._shifts[:, :m], m) if m < self.width else _pad(self._shifts, m)

    def norm_sq(self) -> float:
        return float(inner(self, self).real)

    def norm(self) -> float:
        return float(np.sqrt(max(self.norm_sq(), 0.0)))

    def normalized(self) -> "FrameState":
        n = self.norm()
        if n == 0:
            raise ConfigurationError("cannot normalize the zero state")
        return self * (1.0 / n)

    def __mul__(self, c):
        return FrameState([(c * a, w) for a, w in zip(self._amps, self._shifts)])

    __rmul__ = __mul__

    def __add__(self, other: "FrameState"):
        return FrameState(list(zip(self._amps, self._shifts)) + list(zip(other._amps, other._shifts)))

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    def to_list(self) -> list:
        return [[a.real, a.imag, list(map(float, w))] for a, w in zip(self._amps, self._shifts)]

    @classmethod
    def from_list(cls, data) -> "FrameState":
        return cls([(complex(re, im), np.asarray(w, float)) for re, im, w in data])

    @classmethod
    def from_json(cls, text: str) -> "FrameState":
        return cls.from_list(json.loads(text))

    def __repr__(self):
        return f"FrameState(terms={len(self)}, width={self.width})"


def pair_data(s1: FrameState, s2: FrameState, extra=None):
    """Coefficients conj(c_a) c_b, differences omega_b - omega_a and the shift means.

    ``extra`` is added to every omega_b first (used for translated right states).
    """
    m = max(s1.width, s2.width, 0 if extra is None else _as_coeffs(extra).size)
    A = s1.padded_shifts(m)
    B = s2.padded_shifts(m)
    if extra is not None:
        B = B + _pad(_as_coeffs(extra), m)
    coef = np.conj(s1.amplitudes)[:, None] * s2.amplitudes[None, :]
    delta = B[None, :, :] - A[:, None, :]
    mean = 0.5 * (B[None, :, :] + A[:, None, :])
    P = coef.size
    return coef.ravel(), delta.reshape(P, m), mean.reshape(P, m)


def coherent_overlap(omega, nu) -> float:
    """<U_omega Phi, U_nu Phi> = exp(-1/4 ||nu - omega||_s^2)."""
    a, b = _as_coeffs(omega), _as_coeffs(nu)
    m = max(a.size, b.size)
    diff = _pad(b, m) - _pad(a, m)
    return float(np.exp(-0.25 * diff @ diff))


def inner(s1: FrameState, s2: FrameState) -> complex:
    coef, delta, _ = pair_data(s1, s2)
    return complex(np.sum(coef * np.exp(-0.25 * np.sum(delta**2, axis=1))))


def apply_translation(mu, s: FrameState) -> FrameState:
    """U_mu s: every shift moves by mu, amplitudes unchanged."""
    m = max(s.width, _as_coeffs(mu).size)
    shift = _pad(_as_coeffs(mu), m)
    return FrameState([(a, w + shift) for a, w in zip(s.amplitudes, s.padded_shifts(m))])


def u_matrix_element(s1: FrameState, mu, s2: FrameState) -> complex:
    """<s1, U_mu s2>."""
    coef, delta, _ = pair_data(s1, s2, extra=mu)
    return complex(np.sum(coef * np.exp(-0.25 * np.sum(delta**2, axis=1))))


def e_matrix_element(s1: FrameState, mu, s2: FrameState) -> complex:
    """<s1, E_mu s2> with E_mu = d/dt U_{t mu} at t = 0."""
    coef, delta, _ = pair_data(s1, s2, extra=np.zeros(_as_coeffs(mu).size))
    mu = _pad(_as_coeffs(mu), delta.shape[1])
    G = np.exp(-0.25 * np.sum(delta**2, axis=1))
    return complex(np.sum(coef * (-0.5 * (delta @ mu)) * G))


def quadratic_form_element(s1: FrameState, omega1, omega2, s2: FrameState) -> complex:
    """-d^2/ds dt <s1, U_{s omega1} U_{t omega2} s2> at 0 (positive convention)."""
    m = max(_as_coeffs(omega1).size, _as_coeffs(omega2).size)
    coef, delta, _ = pair_data(s1, s2, extra=np.zeros(m))
    w1 = _pad(_as_coeffs(omega1), delta.shape[1])
    w2 = _pad(_as_coeffs(omega2), delta.shape[1])
    G = np.exp(-0.25 * np.sum(delta**2, axis=1))
    return complex(np.sum(coef * G * (0.5 * (w1 @ w2) - 0.25 * (delta @ w1) * (delta @ w2))))


def quadratic_e_expectation(omega1, omega2) -> float:
    """Ground-state two-point function 1/2 <omega1, omega2>_s."""
    return float(quadratic_form_element(FrameState.ground(), omega1, omega2, FrameState.ground()).real)


@dataclass(frozen=True)
class OverlapMatrix:
    matrix: np.ndarray
    condition: float
    min_eigenvalue: float


def gram(shifts, condition_limit: float = CONDITION_LIMIT) -> OverlapMatrix:
    rows = [_as_coeffs(w) for w in shifts]
    if not rows:
        raise ConfigurationError("gram needs at least one shift")
    m = max(r.size for r in rows)
    W = np.array([_pad(r, m) for r in rows])
    D = np.sum((W[:, None, :] - W[None, :, :]) ** 2, axis=-1)
    G = np.exp(-0.25 * D)
    ev = np.linalg.eigvalsh(G)
    cond = float(ev[-1] / ev[0]) if ev[0] > 0 else np.inf
    if cond > condition_limit:
        warnings.warn(f"frame Gram matrix has condition number {cond:.3g}", IllConditionedFrameWarning,
                      stacklevel=2)
    return OverlapMatrix(G, cond, float(ev[0]))
