"""Coefficient bundles for the three equation classes.

All coefficients are stored in operator form, e.g. for TQ

    {-(1 + k) P^2 + 2T + h D + g P - 2 h2 X^2 - 2 h1 X - 2 h0} Phi = 0,

with T = i d/dt.  TM replaces 1 + k by f and drops D and P; TO additionally
fixes the kinetic factor to one and runs in the primed time.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import NamedTuple, Union

import numpy as np

from .timefn import EVERYWHERE, Constant, Domain, TimeFunction, add_constant, from_dict, sample

ZERO = Constant(0.0)
ONE = Constant(1.0)


class _System:
    CLASS = ""

    def coeffs(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def domain(self) -> Domain:
        dom = EVERYWHERE
        for c in self.coeffs().values():
            dom = dom.intersect(c.domain)
        return dom

    @property
    def nodes(self):
        for c in self.coeffs().values():
            if c.nodes is not None:
                return c.nodes
        return None

    def to_dict(self, grid=None) -> dict:
        """JSON form; non-serializable coefficients are sampled on ``grid``."""
        out = {}
        for name, c in self.coeffs().items():
            try:
                out[name] = c.to_dict()
            except TypeError:
                g = grid if grid is not None else c.nodes
                if g is None:
                    raise
                out[name] = sample(c, g)
        return {"class": self.CLASS, "coeffs": out}

    def evaluate(self, t) -> dict:
        return {name: c(t) for name, c in self.coeffs().items()}


@dataclass(frozen=True, eq=False)
class TQSystem(_System):
    k: TimeFunction = ZERO
    h: TimeFunction = ZERO
    g: TimeFunction = ZERO
    h2: TimeFunction = ZERO
    h1: TimeFunction = ZERO
    h0: TimeFunction = ZERO
    CLASS = "TQ"

    def kinetic(self) -> TimeFunction:
        return add_constant(self.k, 1.0)


@dataclass(frozen=True, eq=False)
class TMSystem(_System):
    f: TimeFunction = ONE
    f2: TimeFunction = ZERO
    f1: TimeFunction = ZERO
    f0: TimeFunction = ZERO
    CLASS = "TM"


@dataclass(frozen=True, eq=False)
class TOSystem(_System):
    g2: TimeFunction = ZERO
    g1: TimeFunction = ZERO
    g0: TimeFunction = ZERO
    CLASS = "TO"


AnySystem = Union[TQSystem, TMSystem, TOSystem]

_CLASSES = {"TQ": TQSystem, "TM": TMSystem, "TO": TOSystem}


def system_from_dict(d: dict) -> AnySystem:
    cls = _CLASSES[d["class"]]
    names = {f.name for f in fields(cls)}
    unknown = set(d.get("coeffs", {})) - names
    if unknown:
        raise ValueError(f"unknown {d['class']} coefficients: {sorted(unknown)}")
    return cls(**{k: from_dict(v) for k, v in d.get("coeffs", {}).items()})


def embed_tm_in_tq(s: TMSystem) -> TQSystem:
    return TQSystem(k=add_constant(s.f, -1.0), h=ZERO, g=ZERO, h2=s.f2, h1=s.f1, h0=s.f0)


def embed_to_in_tq(s: TOSystem) -> TQSystem:
    return TQSystem(k=ZERO, h=ZERO, g=ZERO, h2=s.g2, h1=s.g1, h0=s.g0)


def as_tq(s: AnySystem) -> TQSystem:
    if isinstance(s, TQSystem):
        return s
    if isinstance(s, TMSystem):
        return embed_tm_in_tq(s)
    if isinstance(s, TOSystem):
        return embed_to_in_tq(s)
    raise TypeError(f"not a system: {s!r}")


def tm_from_tq(s: TQSystem) -> TMSystem:
    """Read a TQ system with h = g = 0 back as TM (inverse of the embedding)."""
    return TMSystem(f=add_constant(s.k, 1.0), f2=s.h2, f1=s.h1, f0=s.h0)


class HamiltonianCoeffs(NamedTuple):
    """H = kinetic P^2 + dilation D + drift P + x2 X^2 + x1 X + x0."""

    kinetic: float
    dilation: float
    drift: float
    x2: float
    x1: float
    x0: float


def hamiltonian_coeffs(s: AnySystem, t: float) -> HamiltonianCoeffs:
    """Coefficients of the Hamiltonian with i dPhi/dt = H Phi.

    From S = 2T - 2H: kinetic (1+k)/2, dilation -h/2, drift -g/2; the
    potential terms pass through unchanged.
    """
    q = as_tq(s)
    v = q.evaluate(t)
    return HamiltonianCoeffs(
        kinetic=0.5 * (1.0 + v["k"]),
        dilation=-0.5 * v["h"],
        drift=-0.5 * v["g"],
        x2=v["h2"],
        x1=v["h1"],
        x0=v["h0"],
    )


def coefficient_arrays(s: AnySystem, ts) -> dict:
    """TQ-form coefficient values on an array of times (used by the propagator)."""
    q = as_tq(s)
    ts = np.asarray(ts, dtype=float)
    return {name: np.broadcast_to(c(ts), ts.shape).astype(float) for name, c in q.coeffs().items()}
