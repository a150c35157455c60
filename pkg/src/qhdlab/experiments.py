"""Named experiments: each takes a validated config dict and returns checks, data and plot series.

Every experiment is deterministic given its config (including the seed) and
independent of the worker count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import gauge, hilbert, operators, spectrum, support
from .errors import ConfigurationError
from .expectation import (
    abelian_closed_form,
    continuity_experiment as _continuity_table,
    error_budget,
    expect_holonomy,
    h_matrix_element,
)
from .geometry import PathCurve, TrigSegment
from .hilbert import FrameState
from .spectrum import OneFormCoeffs, build_basis, default_p


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        info = ", ".join(f"{k}={_fmt(v)}" for k, v in self.detail.items())
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {info}" if info else "")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


@dataclass
class Outcome:
    checks: list
    data: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)  # name -> list of (x, y, yerr)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


DEFAULTS = {
    "oracle-check": {"d": 1, "K": 8, "N": 100000},
    "overlap": {"d": 1, "params": {"pairs": 20, "scale": 1.5}},
    "dyson": {"d": 2, "group": "SU2", "K": 12, "params": {"instances": 100}},
    "convergence": {"d": 1, "N": 40000, "params": {"Ks": [4, 8, 16, 32, 64]}},
    "translation-continuity": {"d": 1, "K": 6, "params": {"states": 5, "terms": 3}},
    "continuity": {"d": 2, "K": 12, "N": 20000,
                   "params": {"eps_list": [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]}},
    "infinitesimal": {"d": 1, "K": 6, "params": {"instances": 50, "h": 1e-5}},
    "energy": {"d": 1, "p": 1.0, "K": 3, "t": 1.0, "eps": 0.05},
    "weyl": {"d": 2},
    "p-criterion": {"d": 3, "p": 1.3, "K": 5000},
    "envelope": {"d": 1, "K": 10000, "N": 10000, "params": {"a": 2.0, "l": 2, "a_small": 0.9}},
    "support": {"d": 1, "p": 1.0, "N": 2000,
                "params": {"s_grid": [0.5, 1.0, 1.5, 2.0, 2.5], "K_grid": [256, 512, 1024, 2048, 4096]}},
    "conjugation": {"d": 2, "K": 6, "N": 4000, "params": {"instances": 20}},
    "determinism": {"d": 1, "params": {"workers": [1, 2, 3]}},
}

WEYL_K = {1: 400, 2: 2000, 3: 20000}


def with_defaults(cfg: dict) -> dict:
    kind = cfg["kind"]
    base = DEFAULTS.get(kind, {})
    out = {**base, **cfg}
    out["params"] = {**base.get("params", {}), **cfg.get("params", {})}
    out.setdefault("seed", 0)
    if "p" not in out:
        out["p"] = default_p(out["d"])
    return out


def _state(cfg) -> FrameState:
    return FrameState.from_list(cfg["state"]) if cfg.get("state") else FrameState.ground()


def _path(cfg) -> PathCurve:
    return PathCurve.from_dict(cfg["path"]) if cfg.get("path") else PathCurve.loop(cfg["d"])


def _rng(cfg, salt: int = 0):
    return np.random.default_rng([int(cfg["seed"]), salt])


def _random_state(rng, terms: int, width: int, spread: float = 0.7) -> FrameState:
    amps = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    return FrameState([(a, spread * rng.normal(size=width)) for a in amps]).normalized()


# ---------------------------------------------------------------------------
# experiment kinds


def oracle_check(cfg, workers=None) -> Outcome:
    Ks = cfg["params"].get("Ks", [cfg["K"]])
    basis = build_basis(cfg["d"], cfg["group"], cfg["p"], max(max(Ks), 1))
    path, s = _path(cfg), _state(cfg)
    norm = s.norm_sq()
    checks, rows = [], []
    for i, K in enumerate(Ks):
        r = expect_holonomy(path, s, K, cfg["N"], basis=basis, seed=cfg["seed"], stream=i, workers=workers)
        exact = abelian_closed_form(path, s, s, K, basis=basis) / norm
        err = abs(complex(r.value[0, 0]) - exact)
        tol = max(3 * r.mc_stderr, 1e-3)
        checks.append(Check(f"abelian-oracle K={K}", err <= tol,
                            {"mc": complex(r.value[0, 0]), "exact": exact, "err": err, "tol": tol}))
        rows.append((K, float(r.value[0, 0].real), r.mc_stderr))
    return Outcome(checks, {"Ks": Ks}, {"value": rows})


def overlap(cfg, workers=None) -> Outcome:
    rng = _rng(cfg)
    P, scale = int(cfg["params"]["pairs"]), float(cfg["params"]["scale"])
    worst, rows = 0.0, []
    for i in range(P):
        m = 1 if i % 2 == 0 else 2
        w, v = scale * rng.normal(size=m), scale * rng.normal(size=m)
        value = hilbert.coherent_overlap(OneFormCoeffs(w), OneFormCoeffs(v))
        if m == 1:
            lo, hi = min(w[0], v[0]) - 12, max(w[0], v[0]) + 12
            oracle = integrate.quad(
                lambda x: math.exp(-0.5 * (x - w[0]) ** 2 - 0.5 * (x - v[0]) ** 2) / math.sqrt(math.pi),
                lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        else:
            lo = np.minimum(w, v) - 12
            hi = np.maximum(w, v) + 12
            oracle = integrate.dblquad(
                lambda y, x: math.exp(-0.5 * ((x - w[0]) ** 2 + (y - w[1]) ** 2)
                                      - 0.5 * ((x - v[0]) ** 2 + (y - v[1]) ** 2)) / math.pi,
                lo[0], hi[0], lo[1], hi[1], epsabs=1e-14, epsrel=1e-13)[0]
        worst = max(worst, abs(value - oracle))
        rows.append((float(np.linalg.norm(v - w)), value, abs(value - oracle)))
    return Outcome([Check("overlap-vs-quadrature", worst <= 1e-10, {"pairs": P, "max_err": worst})],
                   {"max_err": worst}, {"overlap": sorted(rows)})


def dyson(cfg, workers=None) -> Outcome:
    rng = _rng(cfg)
    basis = build_basis(cfg["d"], cfg["group"], cfg["p"], cfg["K"])
    n = int(cfg["params"]["instances"])
    worst_ratio, worst_t1, worst_t2 = 0.0, 0.0, 0.0
    rows = []
    for _ in range(n):
        verts = [rng.uniform(0, 2 * math.pi, size=cfg["d"])]
        for _ in range(3):
            verts.append(verts[-1] + rng.normal(scale=1.0, size=cfg["d"]))
        path = PathCurve.polyline(verts).reparametrize_arc_length()
        conn = gauge.ConnectionSample(basis, base=0.5 * rng.normal(size=basis.K))
        omega = OneFormCoeffs(rng.normal(size=basis.K))
        sup = spectrum.sup_norm(omega, basis)
        x = rng.uniform(0.05, 1.0)
        omega = omega * (x / (sup * path.length))
        terms = gauge.dyson_terms(path, conn, omega)
        full = gauge.holonomy(path, conn.shifted(omega)).matrix
        rem = float(np.linalg.norm(full - sum(terms), ord=2))
        bound = gauge.dyson_remainder_bound(x / path.length, path.length)
        b1, b2 = gauge.term_bounds(x / path.length, path.length)
        n1 = float(np.linalg.norm(terms[1], ord=2))
        n2 = float(np.linalg.norm(terms[2], ord=2))
        worst_ratio = max(worst_ratio, rem / bound)
        worst_t1 = max(worst_t1, n1 / b1)
        worst_t2 = max(worst_t2, n2 / b2)
        rows.append((x, rem, bound))
    checks = [
        Check("dyson-remainder", worst_ratio <= 1.0, {"instances": n, "max_remainder/bound": worst_ratio}),
        Check("dyson-term-bounds", worst_t1 <= 1.0 and worst_t2 <= 1.0,
              {"max_order1/bound": worst_t1, "max_order2/bound": worst_t2}),
    ]
    return Outcome(checks, {"max_ratio": worst_ratio}, {"remainder": sorted(rows)})


def convergence(cfg, workers=None) -> Outcome:
    Ks = sorted(cfg["params"]["Ks"])
    basis = build_basis(cfg["d"], cfg["group"], cfg["p"], Ks[-1])
    path, s = _path(cfg), _state(cfg)
    est = {}
    for i, K in enumerate(Ks):
        est[K] = expect_holonomy(path, s, K, cfg["N"], basis=basis, seed=cfg["seed"], stream=i,
                                 workers=workers)
    budget = {K: error_budget(basis, path.length, K) for K in Ks}
    worst = -math.inf
    for i, K in enumerate(Ks):
        for K2 in Ks[i + 1:]:
            diff = float(np.linalg.norm(est[K].value - est[K2].value))
            allowed = budget[K] - budget[K2] + 3 * math.hypot(est[K].mc_stderr, est[K2].mc_stderr)
            worst = max(worst, diff - allowed)
    ref = None
    if basis.group == "U1":
        ref = abelian_closed_form(path, s, s, Ks[-1], basis=basis) / s.norm_sq()
    rows = [(K, float(abs(est[K].value[0, 0] - ref)) if ref is not None else math.nan, est[K].mc_stderr)
            for K in Ks]
    return Outcome(
        [Check("cutoff-convergence", worst <= 0, {"Ks": Ks, "max_violation": worst})],
        {"budget": {str(K): budget[K] for K in Ks}},
        {"error": rows, "budget": [(K, budget[K], 0.0) for K in Ks]},
    )


def translation_continuity(cfg, workers=None) -> Outcome:
    rng = _rng(cfg)
    width, terms = cfg["K"], int(cfg["params"]["terms"])
    radii = np.logspace(-3, -1, 9)
    worst, rows = 0.0, []
    for _ in range(int(cfg["params"]["states"])):
        s = _random_state(rng, terms, width)
        direction = rng.normal(size=width)
        direction /= np.linalg.norm(direction)
        y = np.array([2 * s.norm_sq() - 2 * hilbert.u_matrix_element(s, r * direction, s).real
                      for r in radii])
        q = hilbert.quadratic_form_element(s, direction, direction, s).real
        slope = float(np.sum(y * radii**2) / np.sum(radii**4))
        worst = max(worst, abs(slope / q - 1.0))
        rows.extend((float(r**2), float(v), 0.0) for r, v in zip(radii, y))
    return Outcome([Check("translation-quadratic-law", worst < 0.05, {"max_rel_err": worst})],
                   {"max_rel_err": worst}, {"shift": rows})


def _index_of(basis, n, mu, phase=0, gen=0) -> int:
    for i in range(basis.K):
        if tuple(basis.n[i]) == tuple(n) and basis.mu[i] == mu and basis.phase[i] == phase \
                and basis.gen[i] == gen:
            return i + 1
    raise ConfigurationError(f"mode n={n} mu={mu} not in the basis")


def continuity(cfg, workers=None) -> Outcome:
    d = cfg["d"]
    if d < 2:
        raise ConfigurationError("the curve family needs d >= 2")
    basis = build_basis(d, cfg["group"], cfg["p"], cfg["K"])
    if cfg.get("state"):
        s = _state(cfg)
    else:
        n = [0] * d
        n[0] = 1
        s = FrameState.coherent(OneFormCoeffs.unit(_index_of(basis, n, 1)))
    start, end = np.zeros(d), np.zeros(d)
    end[0] = 2 * math.pi
    gamma = PathCurve([TrigSegment(start, end)])
    eps_list = [float(e) for e in cfg["params"]["eps_list"]]
    family = [PathCurve([TrigSegment(start, end, [(1, e, 1, "sin")])]) for e in eps_list]
    tab = _continuity_table(gamma, family, s, cfg["K"], cfg["N"], basis=basis, seed=cfg["seed"],
                            workers=workers)
    checks = [
        Check("continuity-monotone", tab.monotone, {"slope": tab.slope}),
        Check("continuity-decades", bool(tab.distance.max() / tab.distance.min() >= 1e4 * 0.999),
              {"span": float(tab.distance.max() / tab.distance.min())}),
    ]
    if tab.closed_form is not None:
        err = np.abs(tab.measured - tab.closed_form)
        ok = bool(np.all(err <= 3 * tab.stderr + 1e-12))
        checks.append(Check("continuity-closed-form", ok, {"max_err/stderr": float(np.max(err / tab.stderr))}))
    rows = [(float(a), float(b), float(c)) for a, b, c in zip(tab.distance, tab.difference, tab.stderr)]
    return Outcome(checks, tab.to_dict(), {"difference": sorted(rows)})


def infinitesimal(cfg, workers=None) -> Outcome:
    rng = _rng(cfg)
    width, h = cfg["K"], float(cfg["params"]["h"])
    worst = 0.0
    for _ in range(int(cfg["params"]["instances"])):
        s1, s2 = _random_state(rng, 3, width), _random_state(rng, 3, width)
        mu = rng.normal(size=width)
        fd = (hilbert.u_matrix_element(s1, h * mu, s2) - hilbert.u_matrix_element(s1, -h * mu, s2)) / (2 * h)
        worst = max(worst, abs(hilbert.e_matrix_element(s1, mu, s2) - fd))
    g = FrameState.ground()
    zeros = [hilbert.e_matrix_element(g, rng.normal(size=width), g) for _ in range(10)]
    return Outcome([
        Check("e-vs-finite-difference", worst <= 1e-8, {"max_err": worst, "h": h}),
        Check("ground-e-vanishes", all(z == 0 for z in zeros), {}),
    ], {"max_err": worst})


def _series_oracle(lams, p, t):
    return 0.5 * sum(math.exp(-2 * t * lam) * (1 + lam**p) ** 2 for lam in lams)


def energy(cfg, workers=None) -> Outcome:
    g = FrameState.ground()
    worst = 0.0
    grid = []
    for d in (1, 2, 3):
        for p in (1.0, default_p(d)):
            basis = build_basis(d, "U1", p, 60)
            for K in (1, 3, 10, 60):
                for t in (0.1, 0.5, 1.0, 2.0):
                    v = operators.e_squared_t_expectation(g, t, K, basis)
                    o = _series_oracle([float(x) for x in basis.eigenvalues[:K]], p, t)
                    worst = max(worst, abs(v - o) / max(1.0, abs(o)))
                    grid.append((d, p, K, t, v))
    b = build_basis(cfg["d"], cfg["group"], cfg["p"], cfg["K"])
    worked = operators.e_squared_t_expectation(g, cfg["t"], cfg["K"], b)
    weighted = operators.e_squared_g_expectation(g, cfg["K"], b)
    checks = [Check("heat-kernel-series", worst <= 1e-10, {"cases": len(grid), "max_rel_err": worst})]
    if cfg["d"] == 1 and cfg["K"] == 3 and cfg["p"] == 1.0 and cfg["t"] == 1.0 and cfg["group"] == "U1":
        checks.append(Check("worked-value", abs(worked - 1.04134) < 5e-6, {"value": worked}))
        checks.append(Check("spectral-weight-value", abs(weighted - 0.75) < 1e-12, {"value": weighted}))
    # plaquette limit for the background alpha sin(x_1) dx_2 on T^2
    alpha = 0.3
    b2 = build_basis(2, "U1", default_p(2), 12)
    bg = OneFormCoeffs.unit(_index_of(b2, (1, 0), 1, phase=1), b2.K) * (
        alpha / (b2.norms[_index_of(b2, (1, 0), 1, phase=1) - 1] * b2.weights[_index_of(b2, (1, 0), 1, phase=1) - 1]))
    plaq = []
    for eps in (0.2, 0.1, 0.05):
        r = operators.plaquette_curvature(g, [0.0, 0.3], (0, 1), eps, 0, 1, basis=b2, background=bg)
        plaq.append((eps, r.value.real, 0.0))
    checks.append(Check("plaquette-limit", abs(plaq[-1][1] - alpha**2) < 1e-3 * 1.5,
                        {"value": plaq[-1][1], "F^2": alpha**2}))
    return Outcome(checks, {"worked": worked, "weighted": weighted},
                   {"plaquette": plaq, "electric": [(t, v, 0.0) for (d, p, K, t, v) in grid
                                                    if d == 1 and K == 60 and p == 1.0]})


def weyl(cfg, workers=None) -> Outcome:
    d = cfg["d"]
    K = int(cfg["params"].get("K", WEYL_K[d]))
    basis = build_basis(d, cfg["group"], cfg["p"], K)
    rows = spectrum.weyl_check(basis)
    dev = spectrum.weyl_deviation(rows, d, basis.g)
    c = spectrum.weyl_constant(d, basis.g)
    return Outcome([Check(f"weyl d={d}", dev < 0.15, {"K": K, "max_dev": dev})],
                   {"K": K, "weyl_constant": c},
                   {"ratio": [(lam, ratio / c, 0.0) for lam, _, ratio in rows if lam > 0]})


def _required_cutoff(d, g, p, target):
    lo, hi = 1.0, 1e12
    if spectrum.analytic_tail_bound(d, g, p, hi) > target:
        return math.inf
    while hi / lo > 1.01:
        mid = math.sqrt(lo * hi)
        lo, hi = (mid, hi) if spectrum.analytic_tail_bound(d, g, p, mid) > target else (lo, mid)
    return hi


def p_criterion(cfg, workers=None) -> Outcome:
    d, p, K = cfg["d"], cfg["p"], cfg["K"]
    basis = build_basis(d, cfg["group"], p, K)
    tail = spectrum.condition_tail(basis, K + 1)
    partial = np.cumsum(basis.sup_norms**2)
    bound_bad = spectrum.analytic_tail_bound(d, basis.g, 0.2, K)
    checks = [
        Check("generic-p-criterion", spectrum.p_criterion(d, p), {"d": d, "p": p}),
        Check("tail-below-1e-3", tail < 1e-3, {"K": K, "tail": tail,
                                               "bound_K_for_1e-3": _required_cutoff(d, basis.g, p, 1e-3)}),
        Check("analytic-bound-finite", math.isfinite(spectrum.analytic_tail_bound(d, basis.g, p, K)), {}),
        Check("p=0.2 fails torus criterion", not spectrum.torus_p_criterion(d, 0.2), {}),
        Check("p=0.2 bound diverges", math.isinf(bound_bad), {}),
    ]
    idx = np.unique(np.geomspace(1, K, 40).astype(int))
    return Outcome(checks, {"tail": tail, "partial_sum": float(partial[-1])},
                   {"partial_sums": [(int(i), float(partial[i - 1]), 0.0) for i in idx]})


def envelope(cfg, workers=None) -> Outcome:
    a, l, a_small = cfg["params"]["a"], int(cfg["params"]["l"]), cfg["params"]["a_small"]
    K, N, seed = cfg["K"], cfg["N"], cfg["seed"]
    Ks = sorted({100, 1000, K} | {k for k in (10, 316, 3162) if k < K})
    frac = support.envelope_fractions(a, l, Ks, N, seed)
    oracle = support.envelope_probability(a, l, K)
    se = math.sqrt(oracle * (1 - oracle) / N)
    small = support.envelope_fractions(a_small, l, [100, 1000, K], N, seed)
    checks = [
        Check(f"envelope a={a}", abs(frac[-1] - oracle) <= 3 * se,
              {"fraction": float(frac[-1]), "oracle": oracle, "stderr": se}),
        Check(f"envelope a={a} positive", frac[-1] - 3 * se > 0, {}),
        Check(f"envelope a={a_small} decreasing", bool(np.all(np.diff(small) < 0)),
              {"fractions": [float(v) for v in small]}),
    ]
    rows = [(k, float(f), math.sqrt(max(f * (1 - f), 1e-300) / N)) for k, f in zip(Ks, frac)]
    rows_small = [(k, float(f), math.sqrt(max(f * (1 - f), 1e-300) / N)) for k, f in zip([100, 1000, K], small)]
    return Outcome(checks, {"oracle": oracle}, {f"a{a}": rows, f"a{a_small}": rows_small})


def support_crossover(cfg, workers=None) -> Outcome:
    prm = cfg["params"]
    tab = support.support_experiment(prm["s_grid"], cfg["p"], cfg["d"], prm["K_grid"], cfg["N"],
                                     seed=cfg["seed"], group=cfg["group"])
    dev = abs(tab.crossover - tab.predicted_crossover)
    checks = [Check("support-crossover", dev <= 3 * tab.crossover_err,
                    {"s*": tab.crossover, "err": tab.crossover_err, "2p-d/2": tab.predicted_crossover,
                     "2p-d": tab.stated_threshold})]
    series = {}
    for s in prm["s_grid"]:
        series[f"s{float(s):g}"] = [(r["K"], r["mean"], r["stderr"]) for r in tab.rows if r["s"] == float(s)]
    return Outcome(checks, tab.to_dict(), series)


def conjugation(cfg, workers=None) -> Outcome:
    rng = _rng(cfg)
    basis = build_basis(cfg["d"], cfg["group"], cfg["p"], cfg["K"])
    s = _state(cfg)
    path = _path(cfg)
    norm = s.norm_sq()
    worst, rows = 0.0, []
    for i in range(int(cfg["params"]["instances"])):
        omega = OneFormCoeffs(0.6 * rng.normal(size=cfg["K"]))
        moved = hilbert.apply_translation(-omega, s)
        lhs = h_matrix_element(moved, moved, path, cfg["K"], cfg["N"], basis=basis, seed=cfg["seed"],
                               stream=2 * i, workers=workers)
        rhs = expect_holonomy(path, s, cfg["K"], cfg["N"], basis=basis, background=-omega, seed=cfg["seed"],
                              stream=2 * i + 1, workers=workers)
        diff = float(np.linalg.norm(lhs.value / norm - rhs.value))
        se = math.hypot(lhs.mc_stderr / norm, rhs.mc_stderr)
        worst = max(worst, diff / se)
        rows.append((i, diff, se))
    return Outcome([Check("conjugation", worst <= 3.0, {"max_diff/stderr": worst})],
                   {"max_ratio": worst}, {"conjugation": rows})


def determinism(cfg, workers=None) -> Outcome:
    import json

    inner = dict(cfg["params"].get("inner", {"kind": "oracle-check", "d": 1, "group": cfg["group"],
                                              "K": 4, "N": 9000}))
    inner.setdefault("seed", cfg["seed"])
    texts = []
    for w in cfg["params"]["workers"]:
        rec = run_experiment(with_defaults(inner), workers=int(w))
        texts.append(json.dumps(canonical(rec), sort_keys=True))
    same = all(t == texts[0] for t in texts)
    return Outcome([Check("worker-count-determinism", same, {"workers": list(cfg["params"]["workers"])})])


KINDS = {
    "oracle-check": oracle_check,
    "overlap": overlap,
    "dyson": dyson,
    "convergence": convergence,
    "translation-continuity": translation_continuity,
    "continuity": continuity,
    "infinitesimal": infinitesimal,
    "energy": energy,
    "weyl": weyl,
    "p-criterion": p_criterion,
    "envelope": envelope,
    "support": support_crossover,
    "conjugation": conjugation,
    "determinism": determinism,
}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def run_experiment(cfg: dict, workers: int | None = None) -> dict:
    """Run one experiment and return its JSON-ready record (without timestamp)."""
    cfg = with_defaults(cfg)
    fn = KINDS.get(cfg["kind"])
    if fn is None:
        raise ConfigurationError(f"unknown experiment kind {cfg['kind']!r}")
    out = fn(cfg, workers)
    config = {k: v for k, v in cfg.items() if k != "output"}
    return _jsonable({
        "kind": cfg["kind"],
        "seed": cfg["seed"],
        "config": config,
        "passed": out.passed,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in out.checks],
        "data": out.data,
        "series": {k: [list(r) for r in v] for k, v in out.series.items()},
    })


def canonical(record: dict) -> dict:
    """Record with the fields excluded from reproducibility comparisons removed."""
    return {k: v for k, v in record.items() if k != "timestamp"}


def check_lines(record: dict) -> list[str]:
    return [Check(c["name"], c["passed"], c["detail"]).line() for c in record["checks"]]
