"""The six-dimensional Schrodinger algebra spanned by I, X, P, X^2, P^2, D.

Elements are complex coefficient vectors in the fixed basis order
``I, X, P, X2, P2, D``.  Brackets come from one structure-constant table built
from the nonzero commutators

    [X, P] = iI          [X2, P2] = 4iD       [D, X2] = -2iX2
    [D, P2] = 2iP2       [P2, X] = -2iP       [X2, P] = 2iX
    [D, X] = -iX         [D, P] = iP

with D = (XP + PX)/2 = -i x d/dx - i/2 and P = -i d/dx.

``conjugate_element`` applies R = exp(i mu P) exp(i nu D) exp(i kappa P2)
as A -> R A R^-1 using closed forms; ``conjugate_series`` evaluates the same
map factor by factor through the exponential of the adjoint action and
serves as its independent check.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class BasisOp(enum.IntEnum):
    I = 0
    X = 1
    P = 2
    X2 = 3
    P2 = 4
    D = 5


DIM = len(BasisOp)

# (a, b, coefficient, result): [a, b] = coefficient * result
BRACKETS = (
    (BasisOp.X, BasisOp.P, 1j, BasisOp.I),
    (BasisOp.X2, BasisOp.P2, 4j, BasisOp.D),
    (BasisOp.D, BasisOp.X2, -2j, BasisOp.X2),
    (BasisOp.D, BasisOp.P2, 2j, BasisOp.P2),
    (BasisOp.P2, BasisOp.X, -2j, BasisOp.P),
    (BasisOp.X2, BasisOp.P, 2j, BasisOp.X),
    (BasisOp.D, BasisOp.X, -1j, BasisOp.X),
    (BasisOp.D, BasisOp.P, 1j, BasisOp.P),
)


def _structure_constants():
    c = np.zeros((DIM, DIM, DIM), dtype=complex)
    for a, b, coef, r in BRACKETS:
        c[a, b, r] = coef
        c[b, a, r] = -coef
    c.setflags(write=False)
    return c


STRUCTURE = _structure_constants()


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(DIM)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, op: BasisOp) -> "AlgebraElement":
        c = np.zeros(DIM, dtype=complex)
        c[op] = 1.0
        return cls(c)

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls(np.zeros(DIM))

    @classmethod
    def of(cls, **terms) -> "AlgebraElement":
        """AlgebraElement.of(X2=1, P2=1) == X2 + P2."""
        c = np.zeros(DIM, dtype=complex)
        for name, v in terms.items():
            c[BasisOp[name]] = v
        return cls(c)

    def __getitem__(self, op: BasisOp) -> complex:
        return complex(self.coeffs[op])

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.coeffs - other.coeffs)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(-self.coeffs)

    def __mul__(self, s: complex) -> "AlgebraElement":
        return AlgebraElement(s * self.coeffs)

    __rmul__ = __mul__

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= atol)

    def __repr__(self):
        terms = [f"({c:.6g}){op.name}" for op, c in zip(BasisOp, self.coeffs) if c != 0]
        return " + ".join(terms) if terms else "0"


# basis elements as module constants
I, X, P, X2, P2, D = (AlgebraElement.basis(op) for op in BasisOp)


@dataclass(frozen=True)
class GaugeParams:
    """Parameters of R = exp(i mu P) exp(i nu D) exp(i kappa P2)."""

    mu: float = 0.0
    nu: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.mu, self.nu, self.kappa)):
            raise ValueError(f"gauge parameters must be finite, got {self}")


IDENTITY = GaugeParams()


def commutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(np.einsum("i,j,ijk->k", a.coeffs, b.coeffs, STRUCTURE))


def adjoint_matrix(a: AlgebraElement) -> np.ndarray:
    """Matrix M with M @ b.coeffs == commutator(a, b).coeffs."""
    return np.einsum("i,ijk->kj", a.coeffs, STRUCTURE)


def conjugate_element(a: AlgebraElement, g: GaugeParams) -> AlgebraElement:
    """R(g) a R(g)^-1 from the closed-form images of the basis."""
    return AlgebraElement(conjugation_matrix(g) @ a.coeffs)


def conjugation_matrix(g: GaugeParams) -> np.ndarray:
    """Column j holds the coefficients of R e_j R^-1."""
    mu, nu, ka = g.mu, g.nu, g.kappa
    en, em = math.exp(nu), math.exp(-nu)
    m = np.zeros((DIM, DIM), dtype=complex)
    m[BasisOp.I, BasisOp.I] = 1.0
    # R X R^-1 = e^nu X + 2 kappa e^-nu P + e^nu mu I
    m[BasisOp.X, BasisOp.X] = en
    m[BasisOp.P, BasisOp.X] = 2 * ka * em
    m[BasisOp.I, BasisOp.X] = en * mu
    # R P R^-1 = e^-nu P
    m[BasisOp.P, BasisOp.P] = em
    # R X2 R^-1 = e^2nu X2 + 4 kappa D + 4 kappa^2 e^-2nu P2 + 2 e^2nu mu X + 4 kappa mu P + e^2nu mu^2 I
    m[BasisOp.X2, BasisOp.X2] = en * en
    m[BasisOp.D, BasisOp.X2] = 4 * ka
    m[BasisOp.P2, BasisOp.X2] = 4 * ka * ka * em * em
    m[BasisOp.X, BasisOp.X2] = 2 * en * en * mu
    m[BasisOp.P, BasisOp.X2] = 4 * ka * mu
    m[BasisOp.I, BasisOp.X2] = en * en * mu * mu
    # R P2 R^-1 = e^-2nu P2
    m[BasisOp.P2, BasisOp.P2] = em * em
    # R D R^-1 = D + mu P + 2 kappa e^-2nu P2
    m[BasisOp.D, BasisOp.D] = 1.0
    m[BasisOp.P, BasisOp.D] = mu
    m[BasisOp.P2, BasisOp.D] = 2 * ka * em * em
    return m


def exp_ad(generator: AlgebraElement, b: AlgebraElement, max_terms: int = 60,
           tiny: float = 1e-18) -> AlgebraElement:
    """exp(ad_G) b = b + [G, b] + [G, [G, b]]/2! + ... truncated at stagnation."""
    ad = adjoint_matrix(generator)
    term = b.coeffs.astype(complex)
    total = term.copy()
    for n in range(1, max_terms):
        term = ad @ term / n
        total = total + term
        if np.max(np.abs(term)) < tiny:
            break
    return AlgebraElement(total)


def conjugate_series(b: AlgebraElement, g: GaugeParams) -> AlgebraElement:
    """R b R^-1 via three exp(ad) series, innermost factor (kappa) first."""
    out = exp_ad(1j * g.kappa * P2, b)
    out = exp_ad(1j * g.nu * D, out)
    return exp_ad(1j * g.mu * P, out)


def compose_gauge(outer: GaugeParams, inner: GaugeParams) -> GaugeParams:
    """Parameters of R(outer) R(inner)."""
    return GaugeParams(
        mu=outer.mu + inner.mu * math.exp(-outer.nu),
        nu=outer.nu + inner.nu,
        kappa=inner.kappa + outer.kappa * math.exp(2 * inner.nu),
    )


def inverse_gauge(g: GaugeParams) -> GaugeParams:
    """Parameters of R(g)^-1, which is again of the three-factor form."""
    return GaugeParams(mu=-g.mu * math.exp(g.nu), nu=-g.nu, kappa=-g.kappa * math.exp(-2 * g.nu))
