"""Grid wavefunctions: Crank-Nicolson propagation, the gauge map R, retiming, residuals.

Every system is propagated through its Hamiltonian (i dpsi/dt = H psi)

    H = A P^2 + B D + C P + x2 X^2 + x1 X + x0

on a uniform grid with Dirichlet walls.  P^2 uses the three-point Laplacian,
P the central difference, and D the symmetrized product (XP + PX)/2 of the
two, so the discrete H is Hermitian and tridiagonal and Crank-Nicolson keeps
the norm to rounding.  Coefficients are sampled at step midpoints.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import lapack
from scipy.signal import czt

from .algebra import AlgebraElement, BasisOp, GaugeParams
from .errors import BoundaryError, GridMismatchError, NumericalError
from .systems import AnySystem, as_tq, coefficient_arrays
from .timefn import TimeMap

log = logging.getLogger(__name__)

CONTAINED = 1e-8
ESCAPED = 1e-5


class BoundaryWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SpatialGrid:
    x_min: float
    dx: float
    n: int

    def __post_init__(self):
        if self.n < 64 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two >= 64, got {self.n}")
        if not (self.dx > 0 and math.isfinite(self.dx) and math.isfinite(self.x_min)):
            raise ValueError(f"bad grid spacing dx={self.dx!r}, x_min={self.x_min!r}")

    @classmethod
    def box(cls, lo: float, hi: float, n: int) -> "SpatialGrid":
        """n points x_j = lo + j (hi - lo)/n, i.e. [lo, hi) periodic-style."""
        return cls(float(lo), (hi - lo) / n, int(n))

    @property
    def length(self) -> float:
        return self.n * self.dx

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def p(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, self.dx)


@dataclass(frozen=True, eq=False)
class WaveState:
    grid: SpatialGrid
    amps: np.ndarray
    t: float

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex)
        if a.shape != (self.grid.n,):
            raise ValueError(f"amplitudes have shape {a.shape}, grid expects ({self.grid.n},)")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)
        object.__setattr__(self, "t", float(self.t))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2) * self.grid.dx)

    def normalized(self) -> "WaveState":
        return WaveState(self.grid, self.amps / math.sqrt(self.norm()), self.t)

    def boundary_ratio(self) -> float:
        return _boundary_ratio(self.amps)

    def at_time(self, t: float) -> "WaveState":
        return WaveState(self.grid, self.amps, t)


class Observables(NamedTuple):
    norm: float
    mean_x: float
    mean_p: float
    dx: float
    dp: float


def observables(psi: WaveState) -> Observables:
    """Norm and first two moments of x and p (p spectrally)."""
    g = psi.grid
    a = psi.amps
    rho = np.abs(a) ** 2
    nrm = float(np.sum(rho) * g.dx)
    x = g.x
    mx = float(np.sum(x * rho) * g.dx / nrm)
    vx = float(np.sum((x - mx) ** 2 * rho) * g.dx / nrm)
    c = np.fft.fft(a)
    w = np.abs(c) ** 2
    p = g.p
    mp = float(np.sum(p * w) / np.sum(w))
    vp = float(np.sum((p - mp) ** 2 * w) / np.sum(w))
    return Observables(nrm, mx, mp, math.sqrt(max(vx, 0.0)), math.sqrt(max(vp, 0.0)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: tuple
    observables: tuple = field(default=None)

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValueError("empty trajectory")
        ts = np.array([s.t for s in states])
        if np.any(np.diff(ts) <= 0):
            raise ValueError("trajectory time stamps must be strictly increasing")
        object.__setattr__(self, "states", states)
        if self.observables is None:
            object.__setattr__(self, "observables", tuple(observables(s) for s in states))

    @property
    def grid(self) -> SpatialGrid:
        return self.states[0].grid

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def amps(self) -> np.ndarray:
        return np.stack([s.amps for s in self.states])

    def __len__(self):
        return len(self.states)

    def observable(self, name: str) -> np.ndarray:
        return np.array([getattr(o, name) for o in self.observables])

    def to_csv(self, path) -> None:
        rows = ["t,norm,mean_x,mean_p,dx,dp"]
        for s, o in zip(self.states, self.observables):
            rows.append(",".join(repr(float(v)) for v in (s.t, *o)))
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")

    def dump_amps(self, path) -> None:
        """Little-endian complex64, row-major [state][grid]."""
        self.amps().astype("<c8").tofile(path)


def gaussian(grid: SpatialGrid, x0: float = 0.0, p0: float = 0.0, width: float = 1.0,
             t: float = 0.0) -> WaveState:
    """Normalized pi^{-1/4} w^{-1/2} exp(-(x - x0)^2 / 2w^2 + i p0 x)."""
    x = grid.x
    a = (np.pi ** -0.25 / math.sqrt(width)) * np.exp(-0.5 * ((x - x0) / width) ** 2 + 1j * p0 * x)
    return WaveState(grid, a, t)


# ---------------------------------------------------------------------------
# discrete Hamiltonian


def hamiltonian_bands(grid: SpatialGrid, kin, dil, drift, x2, x1, x0):
    """(lower, diag, upper) of the Hermitian tridiagonal H for scalar coefficients."""
    x = grid.x
    dx = grid.dx
    diag = (2.0 * kin / dx ** 2 + x2 * x * x + x1 * x + x0).astype(complex)
    upper = (-kin / dx ** 2) - 1j * drift / (2.0 * dx) - 1j * dil * (x[:-1] + x[1:]) / (4.0 * dx)
    return np.conj(upper), diag, upper


def apply_bands(bands, psi: np.ndarray) -> np.ndarray:
    lower, diag, upper = bands
    out = diag * psi
    out[:-1] += upper * psi[1:]
    out[1:] += lower * psi[:-1]
    return out


def _ham_arrays(s: AnySystem, ts):
    c = coefficient_arrays(s, ts)
    return {
        "kin": 0.5 * (1.0 + c["k"]),
        "dil": -0.5 * c["h"],
        "drift": -0.5 * c["g"],
        "x2": c["h2"],
        "x1": c["h1"],
        "x0": c["h0"],
    }


def _bands_at(grid, ham, i):
    return hamiltonian_bands(grid, ham["kin"][i], ham["dil"][i], ham["drift"][i],
                             ham["x2"][i], ham["x1"][i], ham["x0"][i])


def _boundary_ratio(a: np.ndarray) -> float:
    peak = np.max(np.abs(a))
    return 0.0 if peak == 0 else float(max(abs(a[0]), abs(a[-1])) / peak)


def _check_boundary(a: np.ndarray, t: float, where: str) -> None:
    r = _boundary_ratio(a)
    if r > ESCAPED:
        raise BoundaryError(f"{where}: boundary amplitude ratio {r:.2e} at t = {float(t)!r}")
    if r > CONTAINED:
        warnings.warn(f"{where}: boundary amplitude ratio {r:.2e} at t = {float(t)!r}", BoundaryWarning,
                      stacklevel=3)


def propagate(s: AnySystem, psi0: WaveState, t_end: float, n_steps: int, save_every: int = 1) -> Trajectory:
    """Crank-Nicolson from psi0.t to t_end in n_steps equal steps.

    Every ``save_every``-th state is kept, plus the final one.
    """
    if n_steps < 1:
        raise ValueError(f"need at least one step, got {n_steps}")
    if not t_end > psi0.t:
        raise ValueError(f"t_end={t_end!r} must exceed the initial time {psi0.t!r}")
    r0 = psi0.boundary_ratio()
    if r0 > CONTAINED:
        raise ValueError(f"initial state not contained: boundary amplitude ratio {r0:.2e}")
    grid = psi0.grid
    ts = np.linspace(psi0.t, t_end, n_steps + 1)
    mids = 0.5 * (ts[:-1] + ts[1:])
    ham = _ham_arrays(s, mids)
    if np.any(ham["kin"] <= 0):
        j = int(np.argmax(ham["kin"] <= 0))
        raise ValueError(f"kinetic factor 1 + k must be positive; vanishes near t = {float(mids[j])!r}")

    psi = psi0.amps.copy()
    states = [psi0]
    for i in range(n_steps):
        dt = ts[i + 1] - ts[i]
        bands = _bands_at(grid, ham, i)
        half = 0.5j * dt
        rhs = psi - half * apply_bands(bands, psi)
        lower, diag, upper = bands
        _, _, _, sol, info = lapack.zgtsv(half * lower, 1.0 + half * diag, half * upper, rhs[:, None],
                                          overwrite_dl=1, overwrite_d=1, overwrite_du=1, overwrite_b=1)
        if info != 0:
            raise NumericalError(f"tridiagonal solve failed (info={info}) at step {i}")
        psi = sol[:, 0]
        if not np.all(np.isfinite(psi)):
            raise NumericalError(f"non-finite amplitudes at t = {float(ts[i + 1])!r}")
        _check_boundary(psi, ts[i + 1], "propagate")
        if (i + 1) % save_every == 0 or i == n_steps - 1:
            states.append(WaveState(grid, psi, ts[i + 1]))
    return Trajectory(tuple(states))


# ---------------------------------------------------------------------------
# the gauge map on grid states


def _dilate(a: np.ndarray, grid: SpatialGrid, nu: float) -> np.ndarray:
    """e^{nu/2} psi(e^nu x) from the trigonometric interpolant of ``a``.

    The interpolant is evaluated at the scaled grid with a chirp-z transform.
    Samples that land outside the box are taken as zero (containment).
    """
    n, L = grid.n, grid.length
    s = math.exp(nu)
    c = np.fft.fftshift(np.fft.fft(a)) / n  # index m <-> wavenumber m - n/2
    u0 = (s * grid.x_min - grid.x_min) / L
    du = s / n
    w = np.exp(2j * np.pi * du)
    start = np.exp(-2j * np.pi * u0)
    vals = czt(c, m=n, w=w, a=start)
    u = u0 + du * np.arange(n)
    vals = vals * np.exp(-1j * np.pi * n * u)
    # split the Nyquist coefficient evenly between +n/2 and -n/2
    vals += 1j * c[0] * np.sin(np.pi * n * u)
    vals[(u < 0) | (u >= 1)] = 0.0
    return math.sqrt(s) * vals


def apply_r(psi: WaveState, g: GaugeParams) -> WaveState:
    """R psi with R = exp(i mu P) exp(i nu D) exp(i kappa P^2), innermost factor first."""
    grid = psi.grid
    if psi.boundary_ratio() > CONTAINED:
        raise BoundaryError(f"apply_r: input not contained (ratio {psi.boundary_ratio():.2e})")
    a = psi.amps
    p = grid.p
    if g.kappa != 0.0:
        a = np.fft.ifft(np.exp(1j * g.kappa * p * p) * np.fft.fft(a))
    if g.nu != 0.0:
        a = _dilate(a, grid, g.nu)
    if g.mu != 0.0:
        a = np.fft.ifft(np.exp(1j * g.mu * p) * np.fft.fft(a))
    out = WaveState(grid, a, psi.t)
    r = out.boundary_ratio()
    if r > CONTAINED:
        raise BoundaryError(f"apply_r: transformed state leaves the grid (boundary ratio {r:.2e}); "
                            f"widen the box or reduce |nu|, |mu|, |kappa|")
    return out


def apply_r_trajectory(traj: Trajectory, gauge) -> Trajectory:
    """Apply R(g(t)) state by state; ``gauge`` is a GaugeTriple."""
    return Trajectory(tuple(apply_r(s, gauge.at(s.t)) for s in traj.states))


def expectation(psi: WaveState, a: AlgebraElement) -> complex:
    """<psi|A|psi>/<psi|psi> with P applied spectrally."""
    g = psi.grid
    x = g.x
    p = g.p
    v = psi.amps

    def P(u):
        return np.fft.ifft(p * np.fft.fft(u))

    images = {
        BasisOp.I: v,
        BasisOp.X: x * v,
        BasisOp.P: P(v),
        BasisOp.X2: x * x * v,
        BasisOp.P2: np.fft.ifft(p * p * np.fft.fft(v)),
        BasisOp.D: 0.5 * (x * P(v) + P(x * v)),
    }
    total = sum(a.coeffs[op] * images[op] for op in BasisOp)
    return complex(np.vdot(v, total) / np.vdot(v, v))


# ---------------------------------------------------------------------------
# time relabelling and residuals


def retime_trajectory(traj: Trajectory, m: TimeMap, direction: str = "forward") -> Trajectory:
    if direction == "forward":
        fn = m.forward
    elif direction == "inverse":
        fn = m.inverse
    else:
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    new_t = np.atleast_1d(fn(traj.times))
    states = tuple(s.at_time(t) for s, t in zip(traj.states, new_t))
    return Trajectory(states, traj.observables)


class ResidualReport(NamedTuple):
    value: float
    constant: float  # value / (dt_max^2 + dx^2)
    dt_max: float
    dx: float
    per_state: np.ndarray

    def __float__(self):
        return self.value


def residual(s: AnySystem, traj: Trajectory) -> ResidualReport:
    """max over interior states of ||S psi|| / ||psi||, S = 2 (i d/dt - H).

    The time derivative is the three-point (nonuniform) centered difference;
    H is the same tridiagonal operator used by ``propagate``.
    """
    if len(traj) < 3:
        raise ValueError("residual needs at least three states")
    grid = traj.grid
    for st in traj.states:
        if st.grid != grid:
            raise GridMismatchError("trajectory states live on different grids")
    ts = traj.times
    ham = _ham_arrays(s, ts[1:-1])
    if np.any(ham["kin"] <= 0):
        raise ValueError("kinetic factor must be positive along the trajectory")
    out = np.empty(len(ts) - 2)
    for i in range(1, len(ts) - 1):
        h1 = ts[i] - ts[i - 1]
        h2 = ts[i + 1] - ts[i]
        a0, a1, a2 = (st.amps for st in traj.states[i - 1:i + 2])
        dpsi = (-h2 / (h1 * (h1 + h2))) * a0 + ((h2 - h1) / (h1 * h2)) * a1 + (h1 / (h2 * (h1 + h2))) * a2
        r = 2.0 * (1j * dpsi - apply_bands(_bands_at(grid, ham, i - 1), a1))
        out[i - 1] = math.sqrt(np.sum(np.abs(r) ** 2) / np.sum(np.abs(a1) ** 2))
    value = float(np.max(out))
    dtm = float(np.max(np.diff(ts)))
    return ResidualReport(value, value / (dtm ** 2 + grid.dx ** 2), dtm, grid.dx, out)


def stationary_trajectory(s: AnySystem, grid: SpatialGrid, times: Sequence[float], level: int = 0) -> Trajectory:
    """Eigenstate of the discrete H of a constant-coefficient system, phase-evolved.

    Using the grid operator's own eigenvector makes the trajectory exact up
    to the time differencing, which is what a residual oracle needs.
    """
    from scipy.linalg import eigh_tridiagonal

    q = as_tq(s)
    for name, c in q.coeffs().items():
        if c.to_dict().get("kind") != "constant":
            raise ValueError(f"stationary states need constant coefficients; {name} is not")
    t0 = float(times[0])
    lower, diag, upper = _bands_at(grid, _ham_arrays(s, np.array([t0])), 0)
    if np.any(np.abs(upper.imag) > 0):
        raise ValueError("stationary states are only built for real (drift- and dilation-free) H")
    e, v = eigh_tridiagonal(diag.real, upper.real, select="i", select_range=(level, level))
    phi = v[:, 0] / math.sqrt(grid.dx)
    return Trajectory(tuple(WaveState(grid, phi * np.exp(-1j * e[0] * (t - t0)), t) for t in times))
