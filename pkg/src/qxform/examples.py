"""Closed forms for the two worked systems with f = exp(-2 nu).

Example 1 (exponential mass):  TM  -e^{U(t-t0)} P^2 + 2T - w^2 e^{-U(t-t0)} X^2
    gauge nu = -U (t - t0)/2, TQ partner  -P^2 + 2T + U D - w^2 X^2,
    t' - t0' = (e^{U(t-t0)} - 1)/U,  g2(t') = (w^2/2) / [1 + U (t' - t0')]^2.

Example 2 (power law):  TM  -(t0/t)^a P^2 + 2T - (t/t0)^b w^2 X^2
    gauge nu = (a/2) ln(t/t0), TQ partner h = -a/t, h2 = (w^2/2)(t/t0)^{b-a},
    t' - t0' = t0 ln(t/t0)                               (a = 1)
             = t0/(1-a) [(t/t0)^{1-a} - 1]               (a != 0, 1)
    g2(t') = (w^2/2) exp[(1+b)(t'-t0')/t0]               (a = 1)
           = (w^2/2) [1 + (1-a)(t'-t0')/t0]^{(a+b)/(1-a)} (a != 0, 1)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .systems import TMSystem, TOSystem, TQSystem, ZERO
from .timefn import (
    Analytic,
    Constant,
    Domain,
    Exponential,
    Polynomial,
    Power,
    TimeMap,
    linspace,
)
from .transforms import (
    GaugeTarget,
    GaugeTriple,
    solve_gauge,
    time_map_from_f,
    tm_to_to,
    tq_to_tm,
)


@dataclass(frozen=True)
class Example1Params:
    upsilon: float
    omega: float
    t0: float = 0.0
    t0_prime: float = 0.0
    t_end: float = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if self.t_end is None:
            object.__setattr__(self, "t_end", self.t0 + 5.0)


@dataclass(frozen=True)
class Example2Params:
    a: float
    b: float
    omega: float
    t0: float = 1.0
    t0_prime: float = 0.0
    t_end: float = None

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("a = 0 is unsupported: the equation is already of TO form")
        if not self.t0 > 0:
            raise ValueError(f"t0 must be positive, got {self.t0!r}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if self.t_end is None:
            object.__setattr__(self, "t_end", 10.0 * self.t0)


class ExampleSystems(NamedTuple):
    tq: TQSystem
    tm: TMSystem
    to: TOSystem
    gauge: GaugeTriple
    map: TimeMap


def _zero_gauge(nu) -> GaugeTriple:
    z = Constant(0.0, nu.domain)
    return GaugeTriple(z, z, nu, z, z, nu.diff())


def example1_map(p: Example1Params) -> TimeMap:
    U, t0, tp = p.upsilon, p.t0, p.t0_prime
    t_dom = Domain(t0, math.inf)
    if U == 0.0:
        fwd = Polynomial((tp - t0, 1.0), t_dom)
        inv = Polynomial((t0 - tp, 1.0), Domain(tp, math.inf))
        return TimeMap(fwd, inv, t0, tp, "t' - t0' = t - t0")
    fwd = Analytic(
        lambda t: tp + np.expm1(U * (t - t0)) / U,
        lambda t: np.exp(U * (t - t0)),
        t_dom, "t0' + (exp(U (t - t0)) - 1)/U",
        d2func=lambda t: U * np.exp(U * (t - t0)),
    )
    if U < 0:
        tp_dom = Domain(tp, tp + 1.0 / abs(U), hi_open=True)
    else:
        tp_dom = Domain(tp, math.inf)
    inv = Analytic(
        lambda s: t0 + np.log1p(U * (s - tp)) / U,
        lambda s: 1.0 / (1.0 + U * (s - tp)),
        tp_dom, "t0 + ln(1 + U (t' - t0'))/U",
        d2func=lambda s: -U / (1.0 + U * (s - tp)) ** 2,
    )
    return TimeMap(fwd, inv, t0, tp, "t' - t0' = (exp(U (t - t0)) - 1)/U")


def example1_systems(p: Example1Params) -> ExampleSystems:
    U, w2, t0, tp = p.upsilon, p.omega ** 2, p.t0, p.t0_prime
    m = example1_map(p)
    tq = TQSystem(k=ZERO, h=Constant(U), g=ZERO, h2=Constant(0.5 * w2), h1=ZERO, h0=ZERO)
    tm = TMSystem(f=Exponential(1.0, U, t0), f2=Exponential(0.5 * w2, -U, t0), f1=ZERO, f0=ZERO)
    g2 = Analytic(
        lambda s: 0.5 * w2 / (1.0 + U * (s - tp)) ** 2,
        lambda s: -U * w2 / (1.0 + U * (s - tp)) ** 3,
        m.tp_domain, "(w^2/2)/(1 + U (t' - t0'))^2",
    )
    to = TOSystem(g2=g2, g1=ZERO, g0=ZERO)
    nu = Polynomial((0.5 * U * t0, -0.5 * U))
    return ExampleSystems(tq, tm, to, _zero_gauge(nu), m)


def example2_map(p: Example2Params) -> TimeMap:
    a, t0, tp = p.a, p.t0, p.t0_prime
    t_dom = Domain(0.0, math.inf, lo_open=True)
    if a == 1.0:
        fwd = Analytic(lambda t: tp + t0 * np.log(t / t0), lambda t: t0 / t, t_dom,
                       "t0' + t0 ln(t/t0)", d2func=lambda t: -t0 / t ** 2)
        inv = Exponential(t0, 1.0 / t0, tp)
        return TimeMap(fwd, inv, t0, tp, "t' - t0' = t0 ln(t/t0)")
    c = 1.0 - a
    fwd = Analytic(
        lambda t: tp + t0 / c * ((t / t0) ** c - 1.0),
        lambda t: (t / t0) ** (-a),
        t_dom, "t0' + t0/(1-a) ((t/t0)^(1-a) - 1)",
        d2func=lambda t: -a / t0 * (t / t0) ** (-a - 1.0),
    )
    if a > 1:
        tp_dom = Domain(tp, tp + t0 / (a - 1.0), hi_open=True)
    else:
        tp_dom = Domain(tp, math.inf)
    inv = Analytic(
        lambda s: t0 * (1.0 + c * (s - tp) / t0) ** (1.0 / c),
        lambda s: (1.0 + c * (s - tp) / t0) ** (1.0 / c - 1.0),
        tp_dom, "t0 (1 + (1-a)(t' - t0')/t0)^(1/(1-a))",
    )
    return TimeMap(fwd, inv, t0, tp, "t' - t0' = t0/(1-a) ((t/t0)^(1-a) - 1)")


def example2_systems(p: Example2Params) -> ExampleSystems:
    a, b, w2, t0, tp = p.a, p.b, p.omega ** 2, p.t0, p.t0_prime
    m = example2_map(p)
    tq = TQSystem(k=ZERO, h=Power(-a / t0, t0, -1.0), g=ZERO, h2=Power(0.5 * w2, t0, b - a), h1=ZERO, h0=ZERO)
    tm = TMSystem(f=Power(1.0, t0, -a), f2=Power(0.5 * w2, t0, b), f1=ZERO, f0=ZERO)
    if a == 1.0:
        g2 = Exponential(0.5 * w2, (1.0 + b) / t0, tp, m.tp_domain)
    else:
        c = 1.0 - a
        e = (a + b) / c
        g2 = Analytic(
            lambda s: 0.5 * w2 * (1.0 + c * (s - tp) / t0) ** e,
            lambda s: 0.5 * w2 * e * c / t0 * (1.0 + c * (s - tp) / t0) ** (e - 1.0),
            m.tp_domain, "(w^2/2)(1 + (1-a)(t' - t0')/t0)^((a+b)/(1-a))",
        )
    to = TOSystem(g2=g2, g1=ZERO, g0=ZERO)
    nu = Analytic(lambda t: 0.5 * a * np.log(t / t0), lambda t: 0.5 * a / t,
                  Domain(0.0, math.inf, lo_open=True), "(a/2) ln(t/t0)",
                  d2func=lambda t: -0.5 * a / t ** 2)
    return ExampleSystems(tq, tm, to, _zero_gauge(nu), m)


class PipelineResult(NamedTuple):
    gauge: GaugeTriple
    tm: TMSystem
    map: TimeMap
    to: TOSystem


def run_pipeline(tq: TQSystem, grid, t0p: float = 0.0, target="restricted") -> PipelineResult:
    """TQ -> gauge -> TM -> time map -> TO through the generic machinery."""
    grid = np.asarray(grid, dtype=float)
    gauge = solve_gauge(tq, target, grid)
    tm = tq_to_tm(tq, gauge)
    m = time_map_from_f(tm.f, float(grid[0]), t0p, grid)
    return PipelineResult(gauge, tm, m, tm_to_to(tm, m))


@dataclass
class DegeneracyReport:
    a_values: list
    omega: float
    max_pairwise_deviation: float
    max_deviation_from_constant: float
    tp_window: tuple

    def to_dict(self):
        return {
            "a_values": list(self.a_values),
            "omega": self.omega,
            "max_pairwise_deviation": self.max_pairwise_deviation,
            "max_deviation_from_half_omega_sq": self.max_deviation_from_constant,
            "t_prime_window": list(self.tp_window),
        }


def example2_degeneracy_check(a_values: Sequence[float], omega: float, t0: float = 1.0,
                              t_end: float = None, n: int = 4000, n_probe: int = 401) -> DegeneracyReport:
    """Push each (a, b = -a) TQ partner through the pipeline and compare the TO g2.

    The g2 tables live on different t' ranges; they are compared on the
    common window at ``n_probe`` points.
    """
    a_values = [float(a) for a in a_values]
    for a in a_values:
        if a in (0.0, 1.0):
            raise ValueError(f"degeneracy check needs a not in {{0, 1}}, got {a!r}")
    if t_end is None:
        t_end = 10.0 * t0
    grid = linspace(t0, t_end, n)
    images = []
    for a in a_values:
        ex = example2_systems(Example2Params(a=a, b=-a, omega=omega, t0=t0, t_end=t_end))
        images.append(run_pipeline(ex.tq, grid).to.g2)
    lo = max(g.domain.lo for g in images)
    hi = min(g.domain.hi for g in images)
    probe = np.linspace(lo, hi, n_probe)
    vals = np.array([g(probe) for g in images])
    pair = float(np.max(vals.max(axis=0) - vals.min(axis=0)))
    const = float(np.max(np.abs(vals - 0.5 * omega ** 2)))
    return DegeneracyReport(a_values, omega, pair, const, (float(lo), float(hi)))


def random_smooth_tq(rng: np.random.Generator, t0: float = 0.0, t1: float = 1.0, scale: float = 0.3) -> TQSystem:
    """A TQ system with small quadratic-polynomial or exponential coefficients.

    Every coefficient stays within ``scale`` of zero on [t0, t1], so 1 + k
    stays above 1 - scale.  Used as test vehicles for round trips.
    """
    span = t1 - t0

    def coef():
        if rng.random() < 0.5:
            c = rng.uniform(-scale, scale, 3) / np.array([1.0, span, span * span])
            return Polynomial(_shifted(c / 3.0, t0))
        return Exponential(rng.uniform(-scale, scale) / 3.0, rng.uniform(-1.0, 1.0) / span, t0)

    return TQSystem(k=coef(), h=coef(), g=coef(), h2=coef(), h1=coef(), h0=coef())


def _shifted(c, t0):
    """Ascending coefficients of sum_i c_i (t - t0)^i."""
    p = np.polynomial.Polynomial(c)
    q = p(np.polynomial.Polynomial([-t0, 1.0]))
    out = np.zeros(3)
    out[:len(q.coef)] = q.coef
    return tuple(float(v) for v in out)
