"""Real functions of time with derivatives.

Every coefficient of a Schrodinger-equation class and every gauge
trajectory is a :class:`TimeFunction`.  Five kinds are serializable
(constant, polynomial, exponential, power, table); the remaining classes are
analytic closed forms, lazily evaluated expressions and monotone inverses,
all of which can be frozen to a table with :meth:`TimeFunction.tabulate`.

Tables interpolate with piecewise cubic Hermite polynomials.  Node
derivatives are taken from the caller when known (this keeps the
interpolant fourth-order accurate) and otherwise estimated from a
not-a-knot cubic spline.  Strictly monotone data gets the Fritsch-Carlson
limiter so the interpolant stays monotone.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import NotInvertibleError, OutOfDomainError

log = logging.getLogger(__name__)

_SLACK = 1e-10


@dataclass(frozen=True)
class Domain:
    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty domain [{self.lo}, {self.hi}]")

    def _slack(self, x):
        return _SLACK * max(1.0, abs(x)) if math.isfinite(x) else 0.0

    def check(self, t):
        """Raise OutOfDomainError for the first offending entry of ``t``."""
        t = np.asarray(t, dtype=float)
        if t.size == 0:
            return
        if np.any(np.isnan(t)):
            raise OutOfDomainError(math.nan, self.lo, self.hi)
        tmin, tmax = float(np.min(t)), float(np.max(t))
        if self.lo_open:
            if tmin <= self.lo:
                raise OutOfDomainError(tmin, self.lo, self.hi)
        elif tmin < self.lo - self._slack(self.lo):
            raise OutOfDomainError(tmin, self.lo, self.hi)
        if self.hi_open:
            if tmax >= self.hi:
                raise OutOfDomainError(tmax, self.lo, self.hi)
        elif tmax > self.hi + self._slack(self.hi):
            raise OutOfDomainError(tmax, self.lo, self.hi)

    def contains(self, t) -> bool:
        try:
            self.check(t)
        except OutOfDomainError:
            return False
        return True

    def clip(self, t):
        """Pull values lying within the rounding slack back onto a closed bound."""
        lo = self.lo if not self.lo_open else -math.inf
        hi = self.hi if not self.hi_open else math.inf
        return np.clip(t, lo, hi)

    def intersect(self, other: "Domain") -> "Domain":
        if self.lo > other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif other.lo > self.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if self.hi < other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif other.hi < self.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        return Domain(lo, hi, lo_open, hi_open)

    def as_list(self):
        """[lo, hi] with None for an unbounded end (JSON has no infinity)."""
        return [self.lo if math.isfinite(self.lo) else None, self.hi if math.isfinite(self.hi) else None]

    def to_dict(self):
        lo, hi = self.as_list()
        return {"lo": lo, "hi": hi, "lo_open": self.lo_open, "hi_open": self.hi_open}


EVERYWHERE = Domain()


def _as_domain(d) -> Domain:
    if d is None:
        return EVERYWHERE
    if isinstance(d, Domain):
        return d
    lo, hi = d
    return Domain(-math.inf if lo is None else float(lo), math.inf if hi is None else float(hi))


def _freeze(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class TimeFunction:
    """Base class.  Subclasses implement ``_value`` and ``_deriv`` on arrays."""

    domain: Domain

    # -- evaluation ---------------------------------------------------------
    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        arr = np.asarray(t, dtype=float)
        self.domain.check(arr)
        out = self._value(self.domain.clip(arr))
        return float(out) if np.ndim(t) == 0 else out

    def derivative(self, t):
        arr = np.asarray(t, dtype=float)
        self.domain.check(arr)
        out = self._deriv(self.domain.clip(arr))
        return float(out) if np.ndim(t) == 0 else out

    def _value(self, t):
        raise NotImplementedError

    def _deriv(self, t):
        raise NotImplementedError

    def diff(self) -> "TimeFunction":
        """The derivative as a TimeFunction in its own right."""
        return _Derivative(self)

    @property
    def nodes(self) -> Optional[np.ndarray]:
        return None

    def tabulate(self, grid=None) -> "Table":
        grid = self._grid(grid)
        return Table(grid, self.eval(grid), self.derivative(grid))

    def _grid(self, grid):
        if grid is None:
            grid = self.nodes
            if grid is None:
                raise ValueError(f"{type(self).__name__} has no sample grid; pass one")
        return np.asarray(grid, dtype=float)

    def to_dict(self) -> dict:
        raise TypeError(f"{type(self).__name__} is not directly serializable; tabulate it first")

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        return _Sum(self, _lift(other))

    __radd__ = __add__

    def __neg__(self):
        return _Scaled(self, -1.0)

    def __sub__(self, other):
        return _Sum(self, -_lift(other))

    def __rsub__(self, other):
        return _Sum(_lift(other), -self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return _Scaled(self, float(other))
        return _Product(self, _lift(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return _Scaled(self, 1.0 / float(other))
        return _Quotient(self, _lift(other))

    def __rtruediv__(self, other):
        return _Quotient(_lift(other), self)


def _lift(x) -> TimeFunction:
    if isinstance(x, TimeFunction):
        return x
    return Constant(float(x))


def add_constant(f: TimeFunction, c: float) -> TimeFunction:
    """f + c, kept in closed form where possible so that adding -c undoes it exactly."""
    c = float(c)
    if c == 0.0:
        return f
    if isinstance(f, (Constant, Polynomial)):
        v0 = f.value if isinstance(f, Constant) else f.coeffs[0]
        if (v0 + c) - c == v0:
            if isinstance(f, Constant):
                return Constant(v0 + c, f.domain)
            return Polynomial((v0 + c,) + f.coeffs[1:], f.domain)
    if isinstance(f, _Sum) and isinstance(f.args[1], Constant) and f.args[1].value == -c:
        return f.args[0]
    return _Sum(f, Constant(c))


def exp(f: TimeFunction) -> TimeFunction:
    """Pointwise e^f."""
    return _Exp(_lift(f))


# ---------------------------------------------------------------------------
# serializable kinds


@dataclass(frozen=True, eq=False)
class Constant(TimeFunction):
    value: float
    domain: Domain = EVERYWHERE

    def _value(self, t):
        return np.full(np.shape(t), self.value, dtype=float)

    def _deriv(self, t):
        return np.zeros(np.shape(t))

    def diff(self):
        return Constant(0.0, self.domain)

    def to_dict(self):
        return _with_domain({"kind": "constant", "value": self.value}, self.domain)


@dataclass(frozen=True, eq=False)
class Polynomial(TimeFunction):
    """sum_i coeffs[i] * t**i"""

    coeffs: tuple
    domain: Domain = EVERYWHERE

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs) or (0.0,))

    def _value(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    def _deriv(self, t):
        return np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(self.coeffs))

    def diff(self):
        return Polynomial(tuple(np.polynomial.polynomial.polyder(self.coeffs)), self.domain)

    def to_dict(self):
        return _with_domain({"kind": "poly", "coeffs": list(self.coeffs)}, self.domain)


@dataclass(frozen=True, eq=False)
class Exponential(TimeFunction):
    """scale * exp(rate * (t - t0))"""

    scale: float
    rate: float
    t0: float = 0.0
    domain: Domain = EVERYWHERE

    def _value(self, t):
        return self.scale * np.exp(self.rate * (t - self.t0))

    def _deriv(self, t):
        return self.scale * self.rate * np.exp(self.rate * (t - self.t0))

    def diff(self):
        return Exponential(self.scale * self.rate, self.rate, self.t0, self.domain)

    def to_dict(self):
        return _with_domain(
            {"kind": "exp", "scale": self.scale, "rate": self.rate, "t0": self.t0}, self.domain
        )


@dataclass(frozen=True, eq=False)
class Power(TimeFunction):
    """scale * (t / t0) ** exponent, defined for t / t0 > 0."""

    scale: float
    t0: float
    exponent: float
    domain: Domain = None

    def __post_init__(self):
        if self.t0 == 0:
            raise ValueError("power base time t0 must be nonzero")
        if self.domain is None:
            d = Domain(0.0, math.inf, lo_open=True) if self.t0 > 0 else Domain(-math.inf, 0.0, hi_open=True)
            object.__setattr__(self, "domain", d)

    def _value(self, t):
        return self.scale * np.power(t / self.t0, self.exponent)

    def _deriv(self, t):
        return self.scale * self.exponent / self.t0 * np.power(t / self.t0, self.exponent - 1.0)

    def diff(self):
        return Power(self.scale * self.exponent / self.t0, self.t0, self.exponent - 1.0, self.domain)

    def to_dict(self):
        d = {"kind": "power", "scale": self.scale, "t0": self.t0, "exponent": self.exponent}
        default = Power(1.0, self.t0, 1.0).domain
        return d if self.domain == default else _with_domain(d, self.domain)


def _with_domain(d, domain):
    if domain != EVERYWHERE:
        d["domain"] = domain.as_list()
    return d


def _fritsch_carlson(x, y, d):
    """Limit node slopes so the Hermite interpolant of strictly monotone data is monotone."""
    d = d.copy()
    delta = np.diff(y) / np.diff(x)
    sign = np.sign(delta[0])
    d[sign * d < 0] = 0.0
    for k, dk in enumerate(delta):
        a, b = d[k] / dk, d[k + 1] / dk
        r = a * a + b * b
        if r > 9.0:
            tau = 3.0 / math.sqrt(r)
            d[k] = tau * a * dk
            d[k + 1] = tau * b * dk
    return d


class Table(TimeFunction):
    """Cubic (or linear, ``order=1``) interpolant of samples; no extrapolation."""

    def __init__(self, times, values, derivs=None, order=3):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("table times and values must be 1-D arrays of equal length")
        if times.size < 4:
            raise ValueError(f"table needs at least 4 samples, got {times.size}")
        if np.any(np.diff(times) <= 0):
            raise ValueError("table sample times must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("table values must be finite")
        if order not in (1, 3):
            raise ValueError(f"unsupported interpolation order {order}")
        self.order = order
        self.times = _freeze(times)
        self.values = _freeze(values)
        self.domain = Domain(float(times[0]), float(times[-1]))
        self.given_derivs = derivs is not None
        if order == 1:
            self.derivs = None
            self._pp = None
            return
        if derivs is None:
            derivs = CubicSpline(times, values)(times, 1)
            delta = np.diff(values)
            if np.all(delta > 0) or np.all(delta < 0):
                derivs = _fritsch_carlson(times, values, derivs)
        derivs = np.asarray(derivs, dtype=float)
        if derivs.shape != times.shape:
            raise ValueError("table derivatives must match sample times")
        self.derivs = _freeze(derivs)
        self._pp = CubicHermiteSpline(times, values, derivs)
        self._dpp = self._pp.derivative()

    @property
    def nodes(self):
        return self.times

    def _value(self, t):
        if self.order == 1:
            return np.interp(t, self.times, self.values)
        return self._pp(t)

    def _deriv(self, t):
        if self.order == 1:
            i = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, self.times.size - 2)
            return (self.values[i + 1] - self.values[i]) / (self.times[i + 1] - self.times[i])
        return self._dpp(t)

    def _deriv2(self, t):
        if self.order == 1:
            return np.zeros(np.shape(t))
        return self._pp(t, 2)

    def diff(self):
        return _TableDerivative(self)

    def to_dict(self):
        d = {"kind": "table", "times": self.times.tolist(), "values": self.values.tolist()}
        if self.order == 1:
            d["order"] = 1
        elif self.given_derivs:
            d["derivs"] = self.derivs.tolist()
        return d

    def __repr__(self):
        return f"Table(n={self.times.size}, domain=[{self.domain.lo:g}, {self.domain.hi:g}])"


class _TableDerivative(TimeFunction):
    def __init__(self, table: Table):
        self.table = table
        self.domain = table.domain

    @property
    def nodes(self):
        return self.table.times

    def _value(self, t):
        return self.table._deriv(t)

    def _deriv(self, t):
        return self.table._deriv2(t)


# ---------------------------------------------------------------------------
# closed forms and expressions


class Analytic(TimeFunction):
    """Closed form given by callables; used for the worked examples and oracles."""

    def __init__(self, func: Callable, dfunc: Callable, domain=None, label: str = "",
                 d2func: Optional[Callable] = None):
        self.func = func
        self.dfunc = dfunc
        self.d2func = d2func
        self.domain = _as_domain(domain)
        self.label = label

    def _value(self, t):
        return np.asarray(self.func(t), dtype=float) * np.ones(np.shape(t))

    def _deriv(self, t):
        return np.asarray(self.dfunc(t), dtype=float) * np.ones(np.shape(t))

    def diff(self):
        if self.d2func is None:
            return _Derivative(self)
        return Analytic(self.dfunc, self.d2func, self.domain, f"d/dt[{self.label}]")

    def __repr__(self):
        return f"Analytic({self.label or '?'})"


class _Expr(TimeFunction):
    def __init__(self, *args: TimeFunction):
        self.args = args
        dom = EVERYWHERE
        for a in args:
            dom = dom.intersect(a.domain)
        self.domain = dom

    @property
    def nodes(self):
        for a in self.args:
            if a.nodes is not None:
                return a.nodes
        return None


class _Sum(_Expr):
    def to_dict(self):
        a, b = self.args
        if isinstance(a, Constant) and isinstance(b, Constant):
            return Constant(a.value + b.value, self.domain).to_dict()
        return super().to_dict()

    def _value(self, t):
        return self.args[0]._value(t) + self.args[1]._value(t)

    def _deriv(self, t):
        return self.args[0]._deriv(t) + self.args[1]._deriv(t)

    def diff(self):
        return _Sum(self.args[0].diff(), self.args[1].diff())


class _Scaled(_Expr):
    def __init__(self, f, c):
        super().__init__(f)
        self.c = c

    def _value(self, t):
        return self.c * self.args[0]._value(t)

    def _deriv(self, t):
        return self.c * self.args[0]._deriv(t)

    def diff(self):
        return _Scaled(self.args[0].diff(), self.c)


class _Product(_Expr):
    def _value(self, t):
        return self.args[0]._value(t) * self.args[1]._value(t)

    def _deriv(self, t):
        a, b = self.args
        return a._deriv(t) * b._value(t) + a._value(t) * b._deriv(t)

    def diff(self):
        a, b = self.args
        return a.diff() * b + a * b.diff()


class _Quotient(_Expr):
    def _value(self, t):
        return self.args[0]._value(t) / self.args[1]._value(t)

    def _deriv(self, t):
        a, b = self.args
        bv = b._value(t)
        return (a._deriv(t) * bv - a._value(t) * b._deriv(t)) / (bv * bv)

    def diff(self):
        a, b = self.args
        return (a.diff() * b - a * b.diff()) / (b * b)


class _Exp(_Expr):
    def _value(self, t):
        return np.exp(self.args[0]._value(t))

    def _deriv(self, t):
        a = self.args[0]
        return np.exp(a._value(t)) * a._deriv(t)

    def diff(self):
        return self * self.args[0].diff()


class _Composed(TimeFunction):
    """f(m(t)); the range of m is checked against f's domain on every call."""

    def __init__(self, f: TimeFunction, m: TimeFunction):
        self.f = f
        self.m = m
        self.domain = m.domain

    @property
    def nodes(self):
        return self.m.nodes

    def _value(self, t):
        return self.f.eval(self.m._value(t))

    def _deriv(self, t):
        return self.f.derivative(self.m._value(t)) * self.m._deriv(t)

    def diff(self):
        return _Composed(self.f.diff(), self.m) * self.m.diff()


class _Derivative(TimeFunction):
    """Fallback derivative node; its own derivative is a central difference."""

    def __init__(self, f: TimeFunction):
        self.f = f
        self.domain = f.domain

    @property
    def nodes(self):
        return self.f.nodes

    def _value(self, t):
        return self.f._deriv(t)

    def _deriv(self, t):
        h = 1e-5 * np.maximum(1.0, np.abs(t))
        lo = self.domain.clip(t - h)
        hi = self.domain.clip(t + h)
        return (self.f._deriv(hi) - self.f._deriv(lo)) / (hi - lo)


# ---------------------------------------------------------------------------
# serialization


def from_dict(spec: dict) -> TimeFunction:
    kind = spec.get("kind")
    domain = _as_domain(spec["domain"]) if "domain" in spec else None
    kw = {} if domain is None else {"domain": domain}
    if kind == "constant":
        return Constant(float(spec["value"]), **kw)
    if kind == "poly":
        return Polynomial(tuple(spec["coeffs"]), **kw)
    if kind == "exp":
        return Exponential(float(spec["scale"]), float(spec["rate"]), float(spec.get("t0", 0.0)), **kw)
    if kind == "power":
        return Power(float(spec["scale"]), float(spec["t0"]), float(spec["exponent"]), **kw)
    if kind == "table":
        tab = Table(spec["times"], spec["values"], spec.get("derivs"), order=int(spec.get("order", 3)))
        return tab
    raise ValueError(f"unknown time-function kind {kind!r}")


def sample(f: TimeFunction, grid) -> dict:
    """Serializable snapshot of any TimeFunction on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    return {"kind": "table", "times": grid.tolist(), "values": f.eval(grid).tolist(),
            "derivs": f.derivative(grid).tolist()}


# ---------------------------------------------------------------------------
# quadrature, inversion, composition


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-D array with at least two points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def cumulative_simpson(f: TimeFunction, grid):
    """Running integral of f from grid[0]; returns (values, max per-interval error estimate).

    Each interval gets a one-panel and a two-panel Simpson estimate; the
    Richardson combination of the two is used and their difference is the
    error estimate.
    """
    grid = _check_grid(grid)
    a, b = grid[:-1], grid[1:]
    h = b - a
    m = 0.5 * (a + b)
    fa, fb, fm = f.eval(a), f.eval(b), f.eval(m)
    fq1, fq3 = f.eval(a + 0.25 * h), f.eval(a + 0.75 * h)
    s1 = h / 6.0 * (fa + 4.0 * fm + fb)
    s2 = h / 12.0 * (fa + 4.0 * fq1 + 2.0 * fm + 4.0 * fq3 + fb)
    panel = s2 + (s2 - s1) / 15.0
    err = float(np.max(np.abs(s2 - s1))) / 15.0
    return np.concatenate([[0.0], np.cumsum(panel)]), err


def integrate_cumulative(f: TimeFunction, t0: float, grid) -> Table:
    """F(t) = integral of f from t0 to t, tabulated on ``grid`` (which must start at t0)."""
    grid = _check_grid(grid)
    if grid[0] != t0:
        raise ValueError(f"grid must start at t0={t0!r}, starts at {float(grid[0])!r}")
    values, err = cumulative_simpson(f, grid)
    log.debug("cumulative Simpson on %d nodes, max panel error estimate %.2e", grid.size, err)
    return Table(grid, values, f.eval(grid))


class Inverse(TimeFunction):
    """Inverse of a strictly monotone function.

    A Hermite table through (F(t_i), t_i) gives the starting point; Newton
    steps safeguarded by bisection inside the bracketing sample interval
    polish it to the forward function's precision.
    """

    def __init__(self, forward: TimeFunction, ts):
        ts = np.asarray(ts, dtype=float)
        ys = forward.eval(ts)
        dys = forward.derivative(ts)
        self.forward = forward
        self.increasing = bool(ys[-1] > ys[0])
        order = slice(None) if self.increasing else slice(None, None, -1)
        self._ys = _freeze(ys[order])
        self._ts = _freeze(ts[order])
        self._guess = Table(self._ys, self._ts, 1.0 / dys[order])
        self.domain = Domain(float(self._ys[0]), float(self._ys[-1]))

    @property
    def nodes(self):
        return self._ys

    def _value(self, y):
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        i = np.clip(np.searchsorted(self._ys, y) - 1, 0, self._ys.size - 2)
        lo, hi = self._ts[i].copy(), self._ts[i + 1].copy()
        if not self.increasing:
            lo, hi = hi, lo
        lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
        x = np.clip(self._guess._value(y), lo, hi)
        sgn = 1.0 if self.increasing else -1.0
        fwd = self.forward
        # a few ulp: Newton on rounded values jitters at the last bit
        tol = 8.0 * np.finfo(float).eps
        done = np.zeros(x.shape, dtype=bool)
        for _ in range(60):
            r = sgn * (fwd._value(x) - y)
            lo = np.where(r < 0, x, lo)
            hi = np.where(r > 0, x, hi)
            step = r / (sgn * fwd._deriv(x))
            xn = x - step
            bad = ~((xn > lo) & (xn < hi)) | ~np.isfinite(xn)
            xn = np.where(bad, 0.5 * (lo + hi), xn)
            conv = (r == 0) | (np.abs(xn - x) <= tol * np.maximum(1.0, np.abs(x)))
            x = np.where(done | (r == 0), x, xn)
            done |= conv
            if np.all(done):
                break
        return x[0] if scalar else x

    def _deriv(self, y):
        return 1.0 / self.forward._deriv(self._value(y))

    def diff(self):
        return 1.0 / _Composed(self.forward.diff(), self)

    def tabulate(self, grid=None):
        grid = self._grid(grid)
        return Table(grid, self.eval(grid), self.derivative(grid))

    def to_dict(self):
        return sample(self, self._ys)


def invert_monotone(F: TimeFunction, grid=None, tol: float = 1e-12) -> Inverse:
    """Inverse of F, checked for strict monotonicity at the sample points."""
    ts = F._grid(grid)
    d = F.derivative(ts)
    pos, neg = d > tol, d < -tol
    if not (np.all(pos) or np.all(neg)):
        if np.any(pos) and np.any(neg):
            bad = ts[np.argmax(neg) if pos[0] else np.argmax(pos)]
            raise NotInvertibleError(f"map not invertible: derivative changes sign near t = {bad!r}", bad)
        bad = ts[np.argmax(~(pos | neg))]
        raise NotInvertibleError(f"map not invertible: derivative vanishes at t = {bad!r}", bad)
    return Inverse(F, ts)


def compose(f: TimeFunction, m: TimeFunction, grid=None) -> TimeFunction:
    """f o m, tabulated on m's sample grid (or ``grid``)."""
    if isinstance(f, Constant):
        return Constant(f.value, m.domain)
    return _Composed(f, m).tabulate(grid)


def composed(f: TimeFunction, m: TimeFunction) -> TimeFunction:
    """Lazy f o m without tabulation."""
    return _Composed(f, m)


@dataclass(frozen=True, eq=False)
class TimeMap:
    """Monotone change of evolution variable t <-> t'."""

    forward: TimeFunction
    inverse: TimeFunction
    t0: float
    t0p: float
    closed_form: str = field(default="", compare=False)

    def __post_init__(self):
        if self.forward(self.t0) != self.t0p:
            raise ValueError(f"forward(t0) = {self.forward(self.t0)!r} != t0' = {self.t0p!r}")

    @property
    def t_domain(self) -> Domain:
        return self.forward.domain

    @property
    def tp_domain(self) -> Domain:
        return self.inverse.domain

    def max_roundtrip_error(self, grid=None, refine: int = 10) -> float:
        """max |inverse(forward(t)) - t| on a refined probe grid."""
        ts = self.forward._grid(grid)
        probe = np.interp(np.linspace(0, ts.size - 1, (ts.size - 1) * refine + 1), np.arange(ts.size), ts)
        return float(np.max(np.abs(self.inverse(self.forward(probe)) - probe)))

    @classmethod
    def from_forward(cls, forward: TimeFunction, t0: float, grid=None, closed_form: str = ""):
        return cls(forward, invert_monotone(forward, grid), t0, forward(t0), closed_form)


def linspace(t0: float, t1: float, n: int) -> np.ndarray:
    """n+1 equally spaced nodes including both ends."""
    return np.linspace(t0, t1, int(n) + 1)


__all__ = [
    "Analytic", "Constant", "add_constant", "Domain", "Exponential", "Inverse", "Polynomial", "Power",
    "Table", "TimeFunction", "TimeMap", "compose", "composed", "cumulative_simpson", "exp",
    "from_dict", "integrate_cumulative", "invert_monotone", "linspace", "sample",
]
