"""Coefficient transformations between the TQ, TM and TO classes.

A TQ equation S1 Phi = 0 is carried to R S1 R^-1 (R Phi) = 0 by the
time-dependent gauge map R = exp(i mu P) exp(i nu D) exp(i kappa P2).
Demanding that the new equation have no D and P terms and a kinetic factor
f gives three first-order ODEs for (kappa, nu, mu):

    dnu/dt    = (8 h2 kappa - h) / 2
    dkappa/dt = -h kappa + 4 h2 kappa^2 + (1 + k)/2 - f e^{2 nu} / 2
    dmu/dt    = -e^{-nu} (g - 4 h1 kappa) / 2

with kappa = nu = mu = 0 at the initial time.  The choice f = e^{-2 nu}
turns the kappa equation into a Riccati equation with source k/2; f = 1
targets TO directly.  TM and TO are then related by the time change
t' - t0' = int_{t0}^{t} f(s) ds.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .algebra import GaugeParams
from .errors import FiniteEscapeError, InvalidGaugeError, NotInvertibleError
from .systems import TMSystem, TOSystem, TQSystem, ZERO, AnySystem, as_tq
from .timefn import (
    Constant,
    Domain,
    Table,
    TimeFunction,
    TimeMap,
    add_constant,
    compose,
    composed,
    exp,
    integrate_cumulative,
    invert_monotone,
)

log = logging.getLogger(__name__)

DEFAULT_ESCAPE_BOUND = 1e6
GAUGE_TOL = 1e-7


# ---------------------------------------------------------------------------
# gauge trajectories


@dataclass(frozen=True, eq=False)
class GaugeTriple:
    kappa: TimeFunction
    mu: TimeFunction
    nu: TimeFunction
    dkappa: TimeFunction
    dmu: TimeFunction
    dnu: TimeFunction
    error_estimate: float = 0.0

    @classmethod
    def identity(cls, domain: Optional[Domain] = None) -> "GaugeTriple":
        z = Constant(0.0) if domain is None else Constant(0.0, domain)
        return cls(z, z, z, z, z, z)

    @classmethod
    def from_functions(cls, kappa: TimeFunction, mu: TimeFunction, nu: TimeFunction) -> "GaugeTriple":
        """Gauge from closed forms; derivatives are taken analytically."""
        return cls(kappa, mu, nu, kappa.diff(), mu.diff(), nu.diff())

    @property
    def domain(self) -> Domain:
        d = self.kappa.domain
        for f in (self.mu, self.nu, self.dkappa, self.dmu, self.dnu):
            d = d.intersect(f.domain)
        return d

    @property
    def grid(self):
        for f in (self.kappa, self.nu, self.mu):
            if f.nodes is not None:
                return f.nodes
        return None

    def at(self, t: float) -> GaugeParams:
        return GaugeParams(mu=self.mu(t), nu=self.nu(t), kappa=self.kappa(t))

    def summary(self, grid=None) -> dict:
        grid = _resolve_grid(grid, self)
        out = {"grid": {"start": float(grid[0]), "end": float(grid[-1]), "intervals": int(grid.size - 1)}}
        for name in ("kappa", "mu", "nu"):
            v = getattr(self, name)(grid)
            out[name] = {"max_abs": float(np.max(np.abs(v))), "final": float(v[-1])}
        out["richardson_error"] = self.error_estimate
        return out


@dataclass(frozen=True)
class GaugeTarget:
    """What the gauge should produce: TM with a given f, TM with f = e^{-2 nu}, or TO."""

    kind: str
    f: Optional[TimeFunction] = None

    def __post_init__(self):
        if self.kind not in ("tm", "restricted", "to"):
            raise ValueError(f"unknown gauge target {self.kind!r}")
        if (self.kind == "tm") != (self.f is not None):
            raise ValueError("a TM target needs f, and only a TM target takes one")

    @classmethod
    def tm(cls, f: TimeFunction) -> "GaugeTarget":
        return cls("tm", f)

    @classmethod
    def restricted(cls) -> "GaugeTarget":
        return cls("restricted")

    @classmethod
    def to(cls) -> "GaugeTarget":
        return cls("to")

    def kinetic(self, gauge: GaugeTriple) -> TimeFunction:
        """The kinetic factor 1 + k~ the gauge is supposed to deliver."""
        if self.kind == "tm":
            return self.f
        if self.kind == "to":
            return Constant(1.0)
        return exp(-2.0 * gauge.nu)


def _as_target(target) -> GaugeTarget:
    if isinstance(target, GaugeTarget):
        return target
    if isinstance(target, TimeFunction):
        return GaugeTarget.tm(target)
    if target == "restricted":
        return GaugeTarget.restricted()
    if target == "to":
        return GaugeTarget.to()
    raise ValueError(f"cannot interpret gauge target {target!r}")


def _rk4(grid, coef, target_kind, fvals, bound):
    """Fixed-step RK4 over ``grid``.

    ``coef`` maps coefficient names to arrays sampled at the stage times
    ``t_n + {0, 1/2, 1} h``, laid out as 2n+1 points (node, midpoint, node, ...).
    Returns node values (n+1, 3) ordered kappa, nu, mu.
    """
    k, h, g, h2, h1 = (np.asarray(coef[c], dtype=float).tolist() for c in ("k", "h", "g", "h2", "h1"))
    fv = None if fvals is None else np.asarray(fvals, dtype=float).tolist()
    mexp = math.exp

    def rhs(j, ka, nu):
        if target_kind == "restricted":
            src = 0.5 * k[j]
        elif target_kind == "to":
            src = 0.5 * (1.0 + k[j]) - 0.5 * mexp(2.0 * nu)
        else:
            src = 0.5 * (1.0 + k[j]) - 0.5 * fv[j] * mexp(2.0 * nu)
        return (-h[j] * ka + 4.0 * h2[j] * ka * ka + src,
                0.5 * (8.0 * h2[j] * ka - h[j]),
                -0.5 * mexp(-nu) * (g[j] - 4.0 * h1[j] * ka))

    n = grid.size - 1
    ts = grid.tolist()
    out = [(0.0, 0.0, 0.0)]
    ka = nu = mu = 0.0
    for i in range(n):
        dt = ts[i + 1] - ts[i]
        j = 2 * i
        a1, b1, c1 = rhs(j, ka, nu)
        a2, b2, c2 = rhs(j + 1, ka + 0.5 * dt * a1, nu + 0.5 * dt * b1)
        a3, b3, c3 = rhs(j + 1, ka + 0.5 * dt * a2, nu + 0.5 * dt * b2)
        a4, b4, c4 = rhs(j + 2, ka + dt * a3, nu + dt * b3)
        ka += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        nu += dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        mu += dt / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        if not (abs(ka) <= bound and math.isfinite(nu) and math.isfinite(mu)):
            raise FiniteEscapeError(ts[i + 1], bound)
        out.append((ka, nu, mu))
    return np.array(out)


def _stage_times(grid):
    st = np.empty(2 * grid.size - 1)
    st[0::2] = grid
    st[1::2] = 0.5 * (grid[:-1] + grid[1:])
    return st


def _rk4_on(s: TQSystem, grid, target: GaugeTarget, bound):
    st = _stage_times(grid)
    coef = {name: np.broadcast_to(c(st), st.shape) for name, c in s.coeffs().items()}
    fvals = None
    if target.kind == "tm":
        fvals = np.broadcast_to(target.f(st), st.shape)
        if np.any(fvals <= 0):
            j = int(np.argmax(fvals <= 0))
            raise ValueError(f"target f must be positive; f({float(st[j])!r}) = {float(fvals[j])!r}")
    return _rk4(grid, coef, target.kind, fvals, bound)


def gauge_rhs(s: TQSystem, target: GaugeTarget, kappa: TimeFunction, nu: TimeFunction):
    """Right-hand sides of the gauge ODEs as TimeFunctions of the given trajectories."""
    target = _as_target(target)
    dnu = 0.5 * (8.0 * s.h2 * kappa - s.h)
    if target.kind == "restricted":
        src = 0.5 * s.k
    elif target.kind == "to":
        src = 0.5 * add_constant(s.k, 1.0) - 0.5 * exp(2.0 * nu)
    else:
        src = 0.5 * add_constant(s.k, 1.0) - 0.5 * target.f * exp(2.0 * nu)
    dkappa = -1.0 * s.h * kappa + 4.0 * s.h2 * kappa * kappa + src
    return dkappa, dnu


def solve_gauge(s: TQSystem, target, grid, t0: Optional[float] = None,
                bound: float = DEFAULT_ESCAPE_BOUND) -> GaugeTriple:
    """Integrate the connecting ODEs from R(t0) = I across ``grid``.

    ``target`` is a GaugeTarget, a TimeFunction f (TM target), or one of the
    strings "restricted" and "to".  Each grid interval is one RK4 step; a
    second pass with halved steps supplies ``error_estimate``.
    """
    target = _as_target(target)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 4 or np.any(np.diff(grid) <= 0):
        raise ValueError("gauge grid must be strictly increasing with at least 4 nodes")
    if t0 is not None and grid[0] != t0:
        raise ValueError(f"gauge grid must start at t0 = {t0!r}")
    s = as_tq(s)
    ys = _rk4_on(s, grid, target, bound)
    fine = np.empty(2 * grid.size - 1)
    fine[0::2] = grid
    fine[1::2] = 0.5 * (grid[:-1] + grid[1:])
    ys_half = _rk4_on(s, fine, target, bound)[0::2]
    err = float(np.max(np.abs(ys - ys_half))) / 15.0
    log.debug("gauge RK4 on %d intervals: Richardson error estimate %.2e", grid.size - 1, err)

    # node derivatives straight from the right-hand side
    ka, nu, mu = ys.T
    c = {name: np.broadcast_to(f(grid), grid.shape) for name, f in s.coeffs().items()}
    dnu_n = 0.5 * (8.0 * c["h2"] * ka - c["h"])
    if target.kind == "restricted":
        src = 0.5 * c["k"]
    elif target.kind == "to":
        src = 0.5 * (1.0 + c["k"]) - 0.5 * np.exp(2.0 * nu)
    else:
        src = 0.5 * (1.0 + c["k"]) - 0.5 * target.f(grid) * np.exp(2.0 * nu)
    dka_n = -c["h"] * ka + 4.0 * c["h2"] * ka * ka + src
    dmu_n = -0.5 * np.exp(-nu) * (c["g"] - 4.0 * c["h1"] * ka)

    kappa_t = Table(grid, ka, dka_n)
    nu_t = Table(grid, nu, dnu_n)
    mu_t = Table(grid, mu, dmu_n)
    dkappa_e, dnu_e = gauge_rhs(s, target, kappa_t, nu_t)
    dmu_e = -0.5 * exp(-1.0 * nu_t) * (s.g - 4.0 * s.h1 * kappa_t)
    return GaugeTriple(
        kappa=kappa_t, mu=mu_t, nu=nu_t,
        dkappa=_node_exact(dkappa_e, grid, dka_n),
        dmu=_node_exact(dmu_e, grid, dmu_n),
        dnu=_node_exact(dnu_e, grid, dnu_n),
        error_estimate=err,
    )


def _node_exact(expr: TimeFunction, grid, node_values) -> Table:
    """Tabulate expr, pinning the node values to the ones the solver produced."""
    return Table(grid, node_values, expr.derivative(grid))


# ---------------------------------------------------------------------------
# conjugation and the connecting equations


def _resolve_grid(grid, *objs):
    if grid is not None:
        return np.asarray(grid, dtype=float)
    for o in objs:
        nodes = o.grid if isinstance(o, GaugeTriple) else o.nodes
        if nodes is not None:
            return np.asarray(nodes, dtype=float)
    raise ValueError("no sample grid available; pass grid explicitly")


def _tab(f: TimeFunction, grid) -> TimeFunction:
    if isinstance(f, Constant):
        return f
    return f.tabulate(grid)


def conjugate_tq_exprs(s: TQSystem, gauge: GaugeTriple) -> TQSystem:
    """R S1 R^-1 with coefficients as lazy expressions (no tabulation)."""
    ka, mu, nu = gauge.kappa, gauge.mu, gauge.nu
    e1, e2 = exp(nu), exp(2.0 * nu)
    dilation = 2.0 * gauge.dnu + s.h - 8.0 * s.h2 * ka
    drift = 2.0 * gauge.dmu + exp(-1.0 * nu) * (s.g - 4.0 * s.h1 * ka) + mu * dilation
    kin = (-2.0 * gauge.dkappa - 2.0 * s.h * ka + 8.0 * s.h2 * ka * ka + add_constant(s.k, 1.0)) * exp(-2.0 * nu)
    return TQSystem(
        k=add_constant(kin, -1.0),
        h=dilation,
        g=drift,
        h2=s.h2 * e2,
        h1=s.h1 * e1 + 2.0 * s.h2 * e2 * mu,
        h0=s.h0 + s.h1 * e1 * mu + s.h2 * e2 * mu * mu,
    )


def conjugate_tq(s: TQSystem, gauge: GaugeTriple, grid=None) -> TQSystem:
    """The transformed TQ system, each coefficient tabulated on the gauge grid."""
    s = as_tq(s)
    grid = _resolve_grid(grid, gauge, s)
    e = conjugate_tq_exprs(s, gauge)
    return TQSystem(**{name: _tab(c, grid) for name, c in e.coeffs().items()})


def gauge_residuals(s: TQSystem, gauge: GaugeTriple, target, grid=None) -> dict:
    """max |g~|, |h~| and |1 + k~ - f_target| on the grid."""
    target = _as_target(target)
    s = as_tq(s)
    grid = _resolve_grid(grid, gauge, s)
    e = conjugate_tq_exprs(s, gauge)
    f_target = target.kinetic(gauge)
    return {
        "g_tilde": float(np.max(np.abs(e.g(grid)))),
        "h_tilde": float(np.max(np.abs(e.h(grid)))),
        "kinetic": float(np.max(np.abs(1.0 + e.k(grid) - f_target(grid)))),
    }


def tq_to_tm(s: TQSystem, gauge: GaugeTriple, tol: float = GAUGE_TOL, grid=None) -> TMSystem:
    """TM system reached from s through ``gauge`` (which must kill the D and P terms)."""
    s = as_tq(s)
    grid = _resolve_grid(grid, gauge, s)
    c = conjugate_tq(s, gauge, grid)
    resid = max(float(np.max(np.abs(c.g(grid)))), float(np.max(np.abs(c.h(grid)))))
    if resid > tol:
        raise InvalidGaugeError(resid, tol)
    return TMSystem(f=add_constant(c.k, 1.0).tabulate(grid) if not isinstance(c.k, Constant)
                    else Constant(c.k.value + 1.0), f2=c.h2, f1=c.h1, f0=c.h0)


def time_map_from_f(f: TimeFunction, t0: float, t0p: float, grid) -> TimeMap:
    """t' = t0' + int_{t0}^{t} f, with its monotone inverse."""
    grid = np.asarray(grid, dtype=float)
    if grid[0] != t0:
        raise ValueError(f"map grid must start at t0 = {t0!r}")
    fv = f(grid)
    fv = np.broadcast_to(fv, grid.shape)
    if np.any(fv <= 0):
        j = int(np.argmax(fv <= 0))
        raise NotInvertibleError(
            f"time map not invertible: f({float(grid[j])!r}) = {float(fv[j])!r} <= 0", float(grid[j]))
    F = integrate_cumulative(f, t0, grid)
    forward = Table(F.times, F.values + t0p, F.derivs)
    return TimeMap(forward, invert_monotone(forward), t0, t0p)


def _zero_or(f: TimeFunction):
    return isinstance(f, Constant) and f.value == 0.0


def tm_to_to(s: TMSystem, m: TimeMap, grid=None) -> TOSystem:
    """g_j(t') = (f_j / f)(t(t')), tabulated on the t' nodes of the map."""
    grid = _resolve_grid(grid, m.inverse)
    out = {}
    for src, dst in (("f2", "g2"), ("f1", "g1"), ("f0", "g0")):
        fj = getattr(s, src)
        if _zero_or(fj):
            out[dst] = Constant(0.0, m.inverse.domain)
        else:
            out[dst] = compose(fj / s.f, m.inverse, grid)
    return TOSystem(**out)


def to_to_tm(s: TOSystem, m: TimeMap, grid=None) -> TMSystem:
    """f = dt'/dt and f_j(t) = f(t) g_j(t'(t)), tabulated on the t nodes of the map."""
    grid = _resolve_grid(grid, m.forward)
    f = m.forward.diff()
    fv = f(grid)
    if np.any(fv <= 0):
        j = int(np.argmax(fv <= 0))
        raise NotInvertibleError(f"time map not invertible: not increasing at t = {float(grid[j])!r}",
                                 float(grid[j]))
    out = {"f": f.tabulate(grid)}
    for src, dst in (("g2", "f2"), ("g1", "f1"), ("g0", "f0")):
        gj = getattr(s, src)
        out[dst] = Constant(0.0, m.forward.domain) if _zero_or(gj) else (f * composed(gj, m.forward)).tabulate(grid)
    return TMSystem(**out)


def tm_to_tq_exprs(s: TMSystem, gauge: GaugeTriple) -> TQSystem:
    """Inverse of ``conjugate_tq`` for a TM target, solved coefficient by coefficient."""
    ka, mu, nu = gauge.kappa, gauge.mu, gauge.nu
    em1, em2, e1, e2 = exp(-1.0 * nu), exp(-2.0 * nu), exp(nu), exp(2.0 * nu)
    h2 = s.f2 * em2
    h1 = (s.f1 - 2.0 * s.f2 * mu) * em1
    h0 = s.f0 - s.f1 * mu + s.f2 * mu * mu
    h = -2.0 * gauge.dnu + 8.0 * s.f2 * ka * em2
    g = -2.0 * gauge.dmu * e1 + 4.0 * ka * (s.f1 - 2.0 * s.f2 * mu) * em1
    kin = s.f * e2 + 2.0 * (gauge.dkappa - 2.0 * ka * gauge.dnu) + 8.0 * s.f2 * ka * ka * em2
    return TQSystem(k=add_constant(kin, -1.0), h=h, g=g, h2=h2, h1=h1, h0=h0)


def tm_to_tq_printed_exprs(s: TMSystem, gauge: GaugeTriple) -> TQSystem:
    """The TM->TQ coefficients exactly as they appear in print (g and k differ from the inverse)."""
    derived = tm_to_tq_exprs(s, gauge)
    ka, mu, nu = gauge.kappa, gauge.mu, gauge.nu
    em1, em2 = exp(-1.0 * nu), exp(-2.0 * nu)
    g = -2.0 * gauge.dmu * exp(nu) - 8.0 * s.f2 * ka * mu * em1 + s.f1 * ka * em1
    kin = 2.0 * (gauge.dkappa - 2.0 * ka * gauge.dnu) + 8.0 * s.f2 * ka * em2 + s.f * exp(2.0 * nu)
    return TQSystem(k=add_constant(kin, -1.0), h=derived.h, g=g, h2=derived.h2, h1=derived.h1, h0=derived.h0)


def tm_to_tq(s: TMSystem, gauge: GaugeTriple, grid=None) -> TQSystem:
    grid = _resolve_grid(grid, gauge, s)
    e = tm_to_tq_exprs(s, gauge)
    return TQSystem(**{name: _tab(c, grid) for name, c in e.coeffs().items()})


def printed_formula_discrepancy(s: TMSystem, gauge: GaugeTriple, grid=None) -> dict:
    """How far each TM->TQ formula set is from inverting the conjugation.

    Both candidate TQ systems are pushed forward through ``gauge``; an exact
    inverse lands back on the TM embedding.  Deviations are reported per
    coefficient for the printed and for the derived formulas.
    """
    grid = _resolve_grid(grid, gauge, s)
    f = s.f(grid)
    want = {"g": 0.0, "h": 0.0, "k": f - 1.0, "h2": s.f2(grid), "h1": s.f1(grid), "h0": s.f0(grid)}
    out = {}
    for label, build in (("printed", tm_to_tq_printed_exprs), ("derived", tm_to_tq_exprs)):
        back = conjugate_tq_exprs(build(s, gauge), gauge)
        dev = {name: float(np.max(np.abs(back.coeffs()[name](grid) - want[name]))) for name in want}
        out[label] = {"per_coefficient": dev, "max": max(dev.values())}
    printed, derived = tm_to_tq_printed_exprs(s, gauge), tm_to_tq_exprs(s, gauge)
    out["printed_minus_derived"] = {
        "g": float(np.max(np.abs(printed.g(grid) - derived.g(grid)))),
        "k": float(np.max(np.abs(printed.k(grid) - derived.k(grid)))),
    }
    return out


def to_from_gauge(s: TQSystem, gauge: GaugeTriple, f: TimeFunction, m: TimeMap, grid=None) -> TOSystem:
    """TO coefficients written through the source TQ coefficients and the gauge history.

    g2 = h2 e^{2nu} / f,  g1 = (2 mu h2 e^{2nu} + h1 e^{nu}) / f,
    g0 = (h0 + h1 e^{nu} mu + h2 e^{2nu} mu^2) / f, all composed with t(t').
    Used only to cross-check ``tm_to_to``.
    """
    s = as_tq(s)
    grid = _resolve_grid(grid, m.inverse)
    mu, nu = gauge.mu, gauge.nu
    e1, e2 = exp(nu), exp(2.0 * nu)
    exprs = {
        "g2": s.h2 * e2 / f,
        "g1": (2.0 * mu * s.h2 * e2 + s.h1 * e1) / f,
        "g0": (s.h0 + s.h1 * e1 * mu + s.h2 * e2 * mu * mu) / f,
    }
    return TOSystem(**{k: compose(v, m.inverse, grid) for k, v in exprs.items()})


def tq_to_to_direct(s: TQSystem, grid, t0: Optional[float] = None, tol: float = GAUGE_TOL):
    """Gauge straight to TO (f = 1, same time variable); returns (TOSystem, gauge)."""
    gauge = solve_gauge(s, GaugeTarget.to(), grid, t0)
    tm = tq_to_tm(s, gauge, tol)
    return TOSystem(g2=tm.f2, g1=tm.f1, g0=tm.f0), gauge


# ---------------------------------------------------------------------------
# reports


@dataclass(eq=False)
class TransformReport:
    source: str
    target: str
    result: AnySystem
    gauge: Optional[GaugeTriple] = None
    time_map: Optional[TimeMap] = None
    residuals: dict = field(default_factory=dict)
    discrepancies: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, v in self.residuals.items():
            if isinstance(v, (int, float)) and not v >= 0:
                raise ValueError(f"residual {k} must be nonnegative, got {v!r}")

    def to_dict(self) -> dict:
        out = {"source": self.source, "target": self.target}
        out["gauge_summary"] = self.gauge.summary() if self.gauge is not None and self.gauge.grid is not None else None
        if self.time_map is not None:
            out["map_domain"] = {"t": self.time_map.t_domain.to_dict(), "t_prime": self.time_map.tp_domain.to_dict()}
        else:
            out["map_domain"] = None
        out["residuals"] = self.residuals
        out["discrepancies"] = self.discrepancies
        out["result"] = self.result.to_dict()
        return out


def max_deviation(a: AnySystem, b: AnySystem, grid) -> dict:
    """Per-coefficient max |a - b| on grid (same class required)."""
    if type(a) is not type(b):
        raise TypeError(f"cannot compare {a.CLASS} with {b.CLASS}")
    ca, cb = a.coeffs(), b.coeffs()
    return {k: float(np.max(np.abs(np.asarray(ca[k](grid)) - np.asarray(cb[k](grid))))) for k in ca}
