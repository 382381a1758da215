"""Maps between time-dependent quadratic Schrodinger equations.

Three nested classes are handled: TQ (general quadratic Hamiltonian with
dilation and drift terms), TM (time-dependent mass) and TO (time-dependent
oscillator).  TQ reaches TM through the gauge map
R = exp(i mu P) exp(i nu D) exp(i kappa P^2) and TM reaches TO through a
change of time variable.
"""
from .algebra import AlgebraElement, BasisOp, GaugeParams, commutator, conjugate_element, conjugate_series
from .errors import (
    BoundaryError,
    FiniteEscapeError,
    InvalidGaugeError,
    NotInvertibleError,
    NumericalError,
    OutOfDomainError,
)
from .systems import TMSystem, TOSystem, TQSystem
from .timefn import Constant, Domain, Exponential, Polynomial, Power, Table, TimeFunction, TimeMap
from .transforms import (
    GaugeTarget,
    GaugeTriple,
    solve_gauge,
    time_map_from_f,
    tm_to_to,
    tm_to_tq,
    to_to_tm,
    tq_to_tm,
)

__version__ = "0.1.0"
