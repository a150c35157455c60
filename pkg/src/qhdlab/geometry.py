"""Flat torus T^d = (R / 2 pi Z)^d: points, curves, vector fields and flows.

Curves are stored as lifts to the universal cover R^d, so positions are not
reduced modulo 2 pi; every function evaluated on them (trigonometric modes,
sections) is periodic anyway.  Reduction happens only for `TorusPoint` and in
`torus_displacement`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, DomainError, IntegrationError

TWO_PI = 2.0 * math.pi


def reduce_mod(x):
    """Reduce coordinates into [0, 2 pi)."""
    r = np.mod(np.asarray(x, dtype=float), TWO_PI)
    # np.mod can return exactly 2 pi for tiny negative inputs
    return np.where(r >= TWO_PI, 0.0, r)


def torus_displacement(a, b):
    """Per-coordinate minimal representative of ``b - a`` in (-pi, pi]."""
    diff = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    r = np.mod(diff + math.pi, TWO_PI) - math.pi
    return np.where(r == -math.pi, math.pi, r)


def torus_distance(a, b):
    """Flat-metric distance between points (broadcasts over leading axes)."""
    return np.linalg.norm(torus_displacement(a, b), axis=-1)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple

    def __init__(self, coords):
        arr = np.atleast_1d(np.asarray(coords, dtype=float))
        if arr.ndim != 1 or arr.size not in (1, 2, 3):
            raise ConfigurationError(f"torus dimension must be 1, 2 or 3, got shape {arr.shape}")
        object.__setattr__(self, "coords", tuple(float(c) for c in reduce_mod(arr)))

    @property
    def d(self) -> int:
        return len(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def _as_coords(x) -> np.ndarray:
    if isinstance(x, TorusPoint):
        return np.asarray(x.coords)
    return np.atleast_1d(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# curves


class Segment:
    """A C^1 map [t0, t1] -> R^d with its derivative."""

    t0: float
    t1: float
    d: int

    def position(self, t) -> np.ndarray:  # (n, d)
        raise NotImplementedError

    def velocity(self, t) -> np.ndarray:  # (n, d)
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise ConfigurationError(f"{type(self).__name__} has no declarative form")

    def reversed(self) -> "Segment":
        return _ReversedSegment(self)


class LineSegment(Segment):
    def __init__(self, start, end, t0: float = 0.0, t1: float = 1.0):
        self.start = _as_coords(start).copy()
        self.end = _as_coords(end).copy()
        if self.start.shape != self.end.shape:
            raise ConfigurationError("line endpoints differ in dimension")
        if not t1 > t0:
            raise ConfigurationError("segment needs t1 > t0")
        self.t0, self.t1 = float(t0), float(t1)
        self.d = self.start.size

    def position(self, t):
        u = (np.atleast_1d(np.asarray(t, dtype=float)) - self.t0) / (self.t1 - self.t0)
        return self.start + u[:, None] * (self.end - self.start)

    def velocity(self, t):
        n = np.atleast_1d(np.asarray(t, dtype=float)).size
        v = (self.end - self.start) / (self.t1 - self.t0)
        return np.broadcast_to(v, (n, self.d)).copy()

    def to_dict(self):
        return {"kind": "line", "start": self.start.tolist(), "end": self.end.tolist()}


class TrigSegment(Segment):
    """Straight line from ``start`` to ``end`` plus trigonometric bumps.

    Each term is ``(component, amp, freq, phase)`` and adds
    ``amp * sin(2 pi freq u)`` (or cos) to the given coordinate, where
    ``u in [0, 1]`` is the normalized segment parameter.
    """

    def __init__(self, start, end, terms=(), t0: float = 0.0, t1: float = 1.0):
        self.line = LineSegment(start, end, t0, t1)
        self.t0, self.t1, self.d = self.line.t0, self.line.t1, self.line.d
        self.terms = []
        for term in terms:
            if isinstance(term, dict):
                term = (term["component"], term["amp"], term.get("freq", 1), term.get("phase", "sin"))
            comp, amp, freq, phase = term
            if phase not in ("sin", "cos") or not 0 <= int(comp) < self.d:
                raise ConfigurationError(f"bad trig term {term!r}")
            self.terms.append((int(comp), float(amp), float(freq), phase))

    def position(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        pos = self.line.position(t)
        u = (t - self.t0) / (self.t1 - self.t0)
        for comp, amp, freq, phase in self.terms:
            arg = TWO_PI * freq * u
            pos[:, comp] += amp * (np.sin(arg) if phase == "sin" else np.cos(arg))
        return pos

    def velocity(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        vel = self.line.velocity(t)
        u = (t - self.t0) / (self.t1 - self.t0)
        scale = TWO_PI / (self.t1 - self.t0)
        for comp, amp, freq, phase in self.terms:
            arg = TWO_PI * freq * u
            dv = np.cos(arg) if phase == "sin" else -np.sin(arg)
            vel[:, comp] += amp * freq * scale * dv
        return vel

    def to_dict(self):
        out = self.line.to_dict()
        out["kind"] = "trig"
        out["terms"] = [
            {"component": c, "amp": a, "freq": f, "phase": ph} for c, a, f, ph in self.terms
        ]
        return out


class FunctionSegment(Segment):
    """Segment given by vectorized callables ``pos(t) -> (n, d)``, ``vel(t) -> (n, d)``."""

    def __init__(self, pos: Callable, vel: Callable, t0: float, t1: float, d: int):
        self._pos, self._vel = pos, vel
        self.t0, self.t1, self.d = float(t0), float(t1), int(d)

    def position(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.asarray(self._pos(t), dtype=float).reshape(t.size, self.d)

    def velocity(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.asarray(self._vel(t), dtype=float).reshape(t.size, self.d)


class _ReversedSegment(Segment):
    def __init__(self, base: Segment):
        self.base = base
        self.t0, self.t1, self.d = base.t0, base.t1, base.d

    def _flip(self, t):
        return self.t0 + self.t1 - np.atleast_1d(np.asarray(t, dtype=float))

    def position(self, t):
        return self.base.position(self._flip(t))

    def velocity(self, t):
        return -self.base.velocity(self._flip(t))

    def reversed(self):
        return self.base


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    if n not in _GL_CACHE:
        x, w = leggauss(n)
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[n]


def _segment_length(seg: Segment, a: float, b: float, nodes: int = 48, panels: int = 4) -> float:
    x, w = gauss_legendre(nodes)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    t = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    speed = np.linalg.norm(seg.velocity(t), axis=1).reshape(panels, nodes)
    return float(np.sum(h[:, None] * w[None, :] * speed))


def segment_length(seg: Segment, a: float | None = None, b: float | None = None) -> float:
    a = seg.t0 if a is None else a
    b = seg.t1 if b is None else b
    panels = 2
    prev = _segment_length(seg, a, b, panels=panels)
    for _ in range(12):
        panels *= 2
        cur = _segment_length(seg, a, b, panels=panels)
        if abs(cur - prev) <= 1e-14 * max(1.0, abs(cur)):
            return cur
        prev = cur
    return cur


class _ArcLengthSegment(Segment):
    """Unit-speed reparametrization of ``base`` onto [s0, s0 + length]."""

    def __init__(self, base: Segment, s0: float):
        self.base = base
        self.length = segment_length(base)
        self.t0, self.t1, self.d = float(s0), float(s0) + self.length, base.d
        # coarse table of (arc length, t) used as Newton starting guesses
        ts = np.linspace(base.t0, base.t1, 257)
        cum = [0.0]
        for a, b in zip(ts[:-1], ts[1:]):
            cum.append(cum[-1] + _segment_length(base, a, b, nodes=24, panels=1))
        self._table_t = ts
        self._table_s = np.asarray(cum)

    def _param(self, s):
        s = np.clip(np.atleast_1d(np.asarray(s, dtype=float)) - self.t0, 0.0, self.length)
        k = np.clip(np.searchsorted(self._table_s, s) - 1, 0, len(self._table_t) - 2)
        ta, sa = self._table_t[k], self._table_s[k]
        t = ta + (s - sa) / np.maximum(np.linalg.norm(self.base.velocity(ta), axis=1), 1e-300)
        t = np.clip(t, self._table_t[k], self._table_t[k + 1])
        x, w = gauss_legendre(24)
        for _ in range(30):
            h = t - ta
            nodes = ta[:, None] + h[:, None] * x[None, :]
            sp = np.linalg.norm(self.base.velocity(nodes.ravel()), axis=1).reshape(nodes.shape)
            resid = sa + h * (sp @ w) - s
            speed = np.linalg.norm(self.base.velocity(t), axis=1)
            if np.any(speed <= 0):
                raise IntegrationError("arc-length reparametrization needs a regular curve")
            step = resid / speed
            t = t - step
            if np.max(np.abs(step)) < 1e-15 * max(1.0, abs(self.base.t1)):
                break
        return t

    def position(self, s):
        return self.base.position(self._param(s))

    def velocity(self, s):
        t = self._param(s)
        v = self.base.velocity(t)
        return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass
class PathCurve:
    """Piecewise C^1 curve on T^d, stored as a lift to R^d."""

    segments: list
    arc_length_parametrized: bool = False
    _length: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.segments:
            raise ConfigurationError("a curve needs at least one segment")
        d = self.segments[0].d
        for a, b in zip(self.segments[:-1], self.segments[1:]):
            if b.d != d:
                raise ConfigurationError("segments differ in dimension")
            if abs(a.t1 - b.t0) > 1e-12:
                raise ConfigurationError("segment parameter intervals must abut")
            gap = torus_distance(a.position(a.t1)[0], b.position(b.t0)[0])
            if gap > 1e-10:
                raise ConfigurationError(f"curve is discontinuous at t={a.t1} (gap {gap:.3g})")

    # construction helpers -------------------------------------------------
    @classmethod
    def point(cls, x) -> "PathCurve":
        """Constant curve; its holonomy is the identity."""
        c = _as_coords(x)
        return cls([LineSegment(c, c)])

    @classmethod
    def polyline(cls, vertices, t0: float = 0.0, t1: float = 1.0) -> "PathCurve":
        v = [np.asarray(_as_coords(p)) for p in vertices]
        br = np.linspace(t0, t1, len(v))
        return cls([LineSegment(v[i], v[i + 1], br[i], br[i + 1]) for i in range(len(v) - 1)])

    @classmethod
    def loop(cls, d: int, axis: int = 0, start=None, winding: float = 1.0) -> "PathCurve":
        """Straight closed loop along coordinate ``axis`` on [0, 1]."""
        s = np.zeros(d) if start is None else _as_coords(start)
        e = s.copy()
        e[axis] += TWO_PI * winding
        return cls([LineSegment(s, e)])

    @classmethod
    def square(cls, x, mu: int, nu: int, eps: float) -> "PathCurve":
        """Counter-clockwise square of side ``eps`` in the (mu, nu) plane at x."""
        x = _as_coords(x)
        emu, enu = np.zeros(x.size), np.zeros(x.size)
        emu[mu], enu[nu] = eps, eps
        return cls.polyline([x, x + emu, x + emu + enu, x + enu, x])

    @property
    def d(self) -> int:
        return self.segments[0].d

    @property
    def t_start(self) -> float:
        return self.segments[0].t0

    @property
    def t_end(self) -> float:
        return self.segments[-1].t1

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array([s.t0 for s in self.segments] + [self.segments[-1].t1])

    @property
    def length(self) -> float:
        """Arc length |p| in metric units."""
        if self._length is None:
            self._length = float(sum(segment_length(s) for s in self.segments))
        return self._length

    def _locate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        idx = np.searchsorted(self.breakpoints[1:-1], t, side="right")
        return t, idx

    def _eval(self, t, which):
        t, idx = self._locate(t)
        out = np.empty((t.size, self.d))
        for k in np.unique(idx):
            m = idx == k
            out[m] = getattr(self.segments[k], which)(t[m])
        return out

    def position(self, t) -> np.ndarray:
        return self._eval(t, "position")

    def velocity(self, t) -> np.ndarray:
        return self._eval(t, "velocity")

    def reversed(self) -> "PathCurve":
        """The inverse path p^-1, on the same parameter interval."""
        a, b = self.t_start, self.t_end
        segs = []
        for s in reversed(self.segments):
            r = s.reversed()
            segs.append(_ShiftedSegment(r, a + b - s.t1 - s.t0))
        return PathCurve(segs)

    def reparametrize_arc_length(self) -> "PathCurve":
        segs, s0 = [], 0.0
        for seg in self.segments:
            a = _ArcLengthSegment(seg, s0)
            segs.append(a)
            s0 = a.t1
        return PathCurve(segs, arc_length_parametrized=True)

    def reparametrize(self, phi: Callable, dphi: Callable, u0: float, u1: float) -> "PathCurve":
        """Compose with a strictly increasing map phi: [u0, u1] -> [t_start, t_end]."""
        return PathCurve(
            [
                FunctionSegment(
                    lambda u: self.position(phi(u)),
                    lambda u: self.velocity(phi(u)) * np.asarray(dphi(u))[:, None],
                    u0,
                    u1,
                    self.d,
                )
            ]
        )

    # serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "segments": [s.to_dict() for s in self.segments],
            "breakpoints": self.breakpoints.tolist(),
        }

    @classmethod
    def from_dict(cls, desc: dict) -> "PathCurve":
        specs = desc["segments"]
        br = desc.get("breakpoints")
        if br is None:
            br = np.linspace(0.0, 1.0, len(specs) + 1)
        if len(br) != len(specs) + 1:
            raise ConfigurationError("need one more breakpoint than segments")
        segs = []
        for spec, a, b in zip(specs, br[:-1], br[1:]):
            kind = spec.get("kind")
            if kind == "line":
                segs.append(LineSegment(spec["start"], spec["end"], a, b))
            elif kind == "loop":
                s = np.asarray(spec["start"], dtype=float)
                e = s.copy()
                e[int(spec.get("axis", 0))] += TWO_PI * float(spec.get("winding", 1.0))
                segs.append(LineSegment(s, e, a, b))
            elif kind == "trig":
                segs.append(TrigSegment(spec["start"], spec["end"], spec.get("terms", ()), a, b))
            else:
                raise ConfigurationError(f"unknown segment kind {kind!r}")
        return cls(segs)


class _ShiftedSegment(Segment):
    def __init__(self, base: Segment, shift: float):
        self.base, self.shift = base, float(shift)
        self.t0, self.t1, self.d = base.t0 + shift, base.t1 + shift, base.d

    def position(self, t):
        return self.base.position(np.atleast_1d(t) - self.shift)

    def velocity(self, t):
        return self.base.velocity(np.atleast_1d(t) - self.shift)


def curve_distance(gamma1: PathCurve, gamma2: PathCurve, samples: int = 2048) -> float:
    """sup_t |gamma1(t) - gamma2(t)| + |gamma1'(t) - gamma2'(t)| over a uniform grid on [0, 1].

    Positions are compared with the flat torus distance, derivatives in R^d.
    """
    for g in (gamma1, gamma2):
        if abs(g.t_start) > 1e-12 or abs(g.t_end - 1.0) > 1e-12:
            raise DomainError("curve_distance needs both curves parametrized on [0, 1]")
    if gamma1.d != gamma2.d:
        raise DomainError("curves live on tori of different dimension")
    t = np.linspace(0.0, 1.0, samples)
    dpos = torus_distance(gamma1.position(t), gamma2.position(t))
    dvel = np.linalg.norm(gamma1.velocity(t) - gamma2.velocity(t), axis=1)
    return float(np.max(dpos + dvel))


# ---------------------------------------------------------------------------
# vector fields and flows


@dataclass
class VectorFieldSpec:
    """Smooth vector field on T^d.

    ``kind="constant"`` stores ``components`` (d reals).  ``kind="fourier"``
    stores, per component, a list of ``(amp, n, phase)`` terms meaning
    ``amp * cos(n . x)`` or ``amp * sin(n . x)``.  ``kind="callable"`` wraps
    user functions ``field(x) -> (m, d)`` and ``jacobian(x) -> (m, d, d)``.
    """

    kind: str
    d: int
    components: np.ndarray | None = None
    terms: list | None = None
    field_fn: Callable | None = None
    jacobian_fn: Callable | None = None

    @classmethod
    def constant(cls, v) -> "VectorFieldSpec":
        v = np.atleast_1d(np.asarray(v, dtype=float))
        return cls("constant", v.size, components=v)

    @classmethod
    def fourier(cls, terms: Sequence[Sequence]) -> "VectorFieldSpec":
        d = len(terms)
        parsed = []
        for comp in terms:
            row = []
            for term in comp:
                if isinstance(term, dict):
                    term = (term["amp"], term["n"], term.get("phase", "cos"))
                amp, n, phase = term
                n = np.asarray(n, dtype=float)
                if n.size != d or phase not in ("cos", "sin"):
                    raise ConfigurationError(f"bad fourier term {term!r}")
                row.append((float(amp), n, phase))
            parsed.append(row)
        return cls("fourier", d, terms=parsed)

    @classmethod
    def from_callable(cls, d: int, field_fn: Callable, jacobian_fn: Callable) -> "VectorFieldSpec":
        return cls("callable", d, field_fn=field_fn, jacobian_fn=jacobian_fn)

    def scaled(self, s: float) -> "VectorFieldSpec":
        """The field s X (flows satisfy exp_t(sX) = exp_{st}(X))."""
        if self.kind == "constant":
            return VectorFieldSpec.constant(s * self.components)
        if self.kind == "fourier":
            return VectorFieldSpec(
                "fourier", self.d, terms=[[(s * a, n, ph) for a, n, ph in c] for c in self.terms]
            )
        f, j = self.field_fn, self.jacobian_fn
        return VectorFieldSpec.from_callable(self.d, lambda x: s * f(x), lambda x: s * j(x))

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "constant":
            return np.broadcast_to(self.components, x.shape).copy()
        if self.kind == "callable":
            return np.asarray(self.field_fn(x), dtype=float).reshape(x.shape)
        out = np.zeros_like(x)
        for mu, comp in enumerate(self.terms):
            for amp, n, phase in comp:
                arg = x @ n
                out[:, mu] += amp * (np.cos(arg) if phase == "cos" else np.sin(arg))
        return out

    def jacobian(self, x) -> np.ndarray:
        """d X^mu / d x^nu, shape (m, d, d)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "constant":
            return np.zeros((x.shape[0], self.d, self.d))
        if self.kind == "callable":
            return np.asarray(self.jacobian_fn(x), dtype=float).reshape(x.shape[0], self.d, self.d)
        out = np.zeros((x.shape[0], self.d, self.d))
        for mu, comp in enumerate(self.terms):
            for amp, n, phase in comp:
                arg = x @ n
                dv = -np.sin(arg) if phase == "cos" else np.cos(arg)
                out[:, mu, :] += amp * dv[:, None] * n[None, :]
        return out

    def divergence(self, x) -> np.ndarray:
        return np.trace(self.jacobian(x), axis1=1, axis2=2)

    def sup_norm(self, grid: int = 64) -> float:
        """||X||_inf; exact for constant fields, grid estimate otherwise."""
        if self.kind == "constant":
            return float(np.linalg.norm(self.components))
        axes = [np.linspace(0, TWO_PI, grid, endpoint=False)] * self.d
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)
        return float(np.max(np.linalg.norm(self(pts), axis=1)))

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "components": self.components.tolist()}
        if self.kind == "fourier":
            return {
                "kind": "fourier",
                "terms": [
                    [{"amp": a, "n": n.tolist(), "phase": ph} for a, n, ph in comp]
                    for comp in self.terms
                ],
            }
        raise ConfigurationError("callable vector fields have no declarative form")

    @classmethod
    def from_dict(cls, desc: dict) -> "VectorFieldSpec":
        kind = desc.get("kind")
        if kind == "constant":
            return cls.constant(desc["components"])
        if kind == "fourier":
            return cls.fourier(desc["terms"])
        raise ConfigurationError(f"unknown vector field kind {kind!r}")


_ODE_RTOL = 1e-12
_ODE_ATOL = 1e-12


def _solve_flow(X: VectorFieldSpec, x0, t, with_jacobian=False, dense=False):
    d = X.d

    def rhs(_, y):
        pos = y[:d]
        dy = X(pos[None, :])[0]
        if not with_jacobian:
            return dy
        J = y[d:].reshape(d, d)
        return np.concatenate([dy, (X.jacobian(pos[None, :])[0] @ J).ravel()])

    y0 = np.asarray(x0, dtype=float)
    if with_jacobian:
        y0 = np.concatenate([y0, np.eye(d).ravel()])
    sol = solve_ivp(
        rhs, (0.0, t), y0, method="DOP853", rtol=_ODE_RTOL, atol=_ODE_ATOL, dense_output=dense
    )
    if sol.status != 0:
        raise IntegrationError(f"flow integration failed: {sol.message}")
    return sol


def flow_map(X: VectorFieldSpec, x, t: float) -> TorusPoint:
    """exp_t(X)(x)."""
    if not math.isfinite(t):
        raise ConfigurationError("flow time must be finite")
    x = _as_coords(x)
    if x.size != X.d:
        raise ConfigurationError("point and field dimensions differ")
    if X.is_constant or t == 0.0:
        return TorusPoint(x + t * (X.components if X.is_constant else 0.0))
    return TorusPoint(_solve_flow(X, x, t).y[:, -1])


def flow_density(X: VectorFieldSpec, x, t: float) -> float:
    """Jacobian determinant of exp_t(X) at x (volume distortion)."""
    if not math.isfinite(t):
        raise ConfigurationError("flow time must be finite")
    if X.is_constant or t == 0.0:
        return 1.0
    x = _as_coords(x)
    sol = _solve_flow(X, x, t, with_jacobian=True)
    J = sol.y[X.d :, -1].reshape(X.d, X.d)
    return float(np.linalg.det(J))


def integral_curve(X: VectorFieldSpec, x, t: float = 1.0) -> PathCurve:
    """gamma_x(s) = exp_{s t}(X)(x) for s in [0, 1], unreduced lift."""
    x = _as_coords(x)
    if X.is_constant:
        return PathCurve([LineSegment(x, x + t * X.components)])
    if t == 0.0:
        return PathCurve.point(x)
    sol = _solve_flow(X, x, t, dense=True)
    d = X.d

    def pos(s):
        return sol.sol(np.asarray(s) * t).T.reshape(-1, d)

    def vel(s):
        return t * X(pos(s))

    return PathCurve([FunctionSegment(pos, vel, 0.0, 1.0, d)])
