import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qxform.errors import FiniteEscapeError, InvalidGaugeError, NotInvertibleError
from qxform.examples import (
    Example1Params,
    Example2Params,
    example1_systems,
    example2_systems,
    random_smooth_tq,
)
from qxform.systems import TMSystem, TOSystem, TQSystem, embed_tm_in_tq
from qxform.timefn import Constant, Exponential, Polynomial, TimeMap, linspace
from qxform.transforms import (
    GaugeTarget,
    GaugeTriple,
    TransformReport,
    conjugate_tq,
    conjugate_tq_exprs,
    gauge_residuals,
    max_deviation,
    printed_formula_discrepancy,
    solve_gauge,
    time_map_from_f,
    tm_to_to,
    tm_to_tq,
    to_from_gauge,
    to_to_tm,
    tq_to_tm,
    tq_to_to_direct,
)

GRID1 = linspace(0.0, 5.0, 2000)
GRID2 = linspace(1.0, 10.0, 2000)
SEEDS = st.integers(0, 2 ** 32 - 1)


def _maxdev(a, b, grid):
    return max(max_deviation(a, b, grid).values())


def _probe(grid):
    return np.sort(np.concatenate([grid, 0.5 * (grid[:-1] + grid[1:])]))


# -- conjugation ---------------------------------------------------------------


def test_identity_gauge_leaves_system_unchanged():
    s = random_smooth_tq(np.random.default_rng(1))
    grid = linspace(0, 1, 50)
    c = conjugate_tq(s, GaugeTriple.identity(), grid)
    assert _maxdev(c, s, grid) < 1e-15


def test_dilation_only_on_free_particle():
    nu = Polynomial((0.0, 0.3, -0.2))
    c = conjugate_tq_exprs(TQSystem(), GaugeTriple.from_functions(Constant(0.0), Constant(0.0), nu))
    ts = np.linspace(0, 2, 21)
    assert np.allclose(c.k(ts), np.exp(-2 * nu(ts)) - 1, atol=1e-15)
    assert np.allclose(c.h(ts), 2 * nu.derivative(ts), atol=1e-15)
    assert np.all(c.g(ts) == 0)


def test_example1_closed_form_gauge_conjugation():
    U, w = 0.7, 1.3
    ex = example1_systems(Example1Params(U, w))
    c = conjugate_tq_exprs(ex.tq, ex.gauge)
    ts = np.linspace(0, 5, 51)
    assert np.max(np.abs(c.h(ts))) < 1e-15
    assert np.allclose(1 + c.k(ts), np.exp(U * ts), rtol=1e-14)
    assert np.allclose(c.h2(ts), 0.5 * w * w * np.exp(-U * ts), rtol=1e-14)


# -- gauge ODEs ------------------------------------------------------------------


@pytest.mark.parametrize("U", [-1.0, -0.1, 0.1, 1.0])
def test_solve_gauge_example1(U):
    ex = example1_systems(Example1Params(U, 1.0))
    g = solve_gauge(ex.tq, "restricted", GRID1)
    assert np.max(np.abs(g.kappa(GRID1))) < 1e-12
    assert np.max(np.abs(g.mu(GRID1))) < 1e-12
    assert np.max(np.abs(g.nu(GRID1) + 0.5 * U * GRID1)) < 1e-9


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_solve_gauge_example2(a):
    ex = example2_systems(Example2Params(a, -a, 1.0))
    g = solve_gauge(ex.tq, "restricted", GRID2)
    assert np.max(np.abs(g.kappa(GRID2))) < 1e-12
    assert np.max(np.abs(g.nu(GRID2) - 0.5 * a * np.log(GRID2))) < 1e-9


def test_tm_form_input_gives_zero_gauge():
    f = Exponential(1.0, 0.4)
    s = embed_tm_in_tq(TMSystem(f=f, f2=Constant(0.5), f1=Polynomial((0.1, 0.2))))
    g = solve_gauge(s, GaugeTarget.tm(f), linspace(0, 2, 200))
    for part in (g.kappa, g.mu, g.nu):
        assert np.max(np.abs(part(linspace(0, 2, 200)))) < 1e-13


@settings(max_examples=15)
@given(SEEDS, st.sampled_from(["restricted", "to", "tm"]))
def test_gauge_residual_property(seed, kind):
    s = random_smooth_tq(np.random.default_rng(seed))
    grid = linspace(0.0, 1.0, 200)
    target = GaugeTarget.tm(Exponential(1.0, 0.3)) if kind == "tm" else GaugeTarget(kind)
    g = solve_gauge(s, target, grid)
    res = gauge_residuals(s, g, target, _probe(grid))
    assert max(res.values()) < 1e-7


@settings(max_examples=15)
@given(SEEDS)
def test_riccati_trivial_solution(seed):
    s = random_smooth_tq(np.random.default_rng(seed))
    s = TQSystem(k=Constant(0.0), h=s.h, g=s.g, h2=s.h2, h1=s.h1, h0=s.h0)
    g = solve_gauge(s, "restricted", linspace(0.0, 1.0, 200))
    assert np.max(np.abs(g.kappa(linspace(0.0, 1.0, 200)))) < 1e-12


def test_rk4_convergence_ratio():
    s = random_smooth_tq(np.random.default_rng(7), scale=0.9)
    fine = [solve_gauge(s, "restricted", linspace(0.0, 1.0, n)) for n in (10, 20, 40)]
    nodes = linspace(0.0, 1.0, 10)
    for name in ("kappa", "nu", "mu"):
        v = [getattr(g, name)(nodes) for g in fine]
        ratio = np.max(np.abs(v[0] - v[1])) / np.max(np.abs(v[1] - v[2]))
        assert 12.0 <= ratio <= 20.0, (name, ratio)


def test_gauge_derivatives_match_finite_differences():
    s = random_smooth_tq(np.random.default_rng(3))
    g = solve_gauge(s, "to", linspace(0.0, 1.0, 400))
    h = 1e-5
    for t in (0.1234, 0.5, 0.8765):
        for prim, der in ((g.kappa, g.dkappa), (g.mu, g.dmu), (g.nu, g.dnu)):
            fd = (prim(t + h) - prim(t - h)) / (2 * h)
            assert abs(fd - der(t)) <= 1e-6 * max(1.0, abs(der(t)))


def test_finite_escape_reported():
    s = TQSystem(k=Constant(1.0), h2=Constant(1.0))
    # kappa' = 4 kappa^2 + 1/2 blows up at pi / (2 sqrt 2)
    with pytest.raises(FiniteEscapeError) as e:
        solve_gauge(s, "restricted", linspace(0.0, 3.0, 3000))
    # reported at the first node past the bound; the grid step is 1e-3
    assert 0.0 <= e.value.t_escape - math.pi / (2 * math.sqrt(2)) < 2e-3
    with pytest.raises(FiniteEscapeError):
        solve_gauge(s, "restricted", linspace(0.0, 3.0, 3000), bound=10.0)


def test_nonpositive_target_rejected():
    with pytest.raises(ValueError, match="positive"):
        solve_gauge(TQSystem(), GaugeTarget.tm(Polynomial((1.0, -1.0))), linspace(0, 2, 20))


# -- TQ -> TM -------------------------------------------------------------------


def test_tq_to_tm_examples():
    ex = example1_systems(Example1Params(0.4, 1.1))
    tm = tq_to_tm(ex.tq, solve_gauge(ex.tq, "restricted", GRID1))
    assert _maxdev(tm, ex.tm, _probe(GRID1)) < 1e-8
    ex = example2_systems(Example2Params(2.0, 0.5, 0.8))
    tm = tq_to_tm(ex.tq, solve_gauge(ex.tq, "restricted", GRID2))
    assert _maxdev(tm, ex.tm, _probe(GRID2)) < 1e-8


def test_tq_to_tm_zero_gauge_on_tm_input():
    tm = TMSystem(f=Exponential(1.0, 0.2), f2=Constant(0.5))
    grid = linspace(0, 1, 40)
    back = tq_to_tm(embed_tm_in_tq(tm), GaugeTriple.identity(), grid=grid)
    assert _maxdev(back, tm, grid) < 1e-15


def test_invalid_gauge_rejected():
    s = TQSystem(h=Constant(0.5))
    with pytest.raises(InvalidGaugeError) as e:
        tq_to_tm(s, GaugeTriple.identity(), grid=linspace(0, 1, 10))
    assert e.value.residual == 0.5


# -- time maps and TM <-> TO ----------------------------------------------------


def test_time_map_examples():
    grid = linspace(0.0, 2.0, 400)
    m = time_map_from_f(Constant(1.0), 0.0, 0.3, grid)
    assert np.allclose(m.forward(grid), grid + 0.3, atol=1e-14)
    m = time_map_from_f(Exponential(1.0, 1.0), 0.0, 0.0, grid)
    assert abs(m.forward(math.log(2.0)) - 1.0) < 1e-10
    probe = _probe(grid)
    assert np.max(np.abs(m.forward.derivative(probe) - np.exp(probe))) < 1e-8
    grid = np.geomspace(1.0, 1e3, 3000)
    m = time_map_from_f(example2_systems(Example2Params(2.0, 0.0, 1.0)).tm.f, 1.0, 0.0, grid)
    assert m.tp_domain.hi < 1.0 and abs(m.tp_domain.hi - (1 - 1e-3)) < 1e-9


def test_time_map_rejects_nonpositive_f():
    with pytest.raises(NotInvertibleError, match="time map not invertible"):
        time_map_from_f(Polynomial((1.0, -1.0)), 0.0, 0.0, linspace(0.0, 2.0, 40))


def test_tm_to_to_identity_map():
    tm = TMSystem(f2=Exponential(0.5, 0.2), f1=Polynomial((0.1, 0.3)))
    grid = linspace(0.0, 1.0, 100)
    to = tm_to_to(tm, time_map_from_f(tm.f, 0.0, 0.0, grid))
    assert np.max(np.abs(to.g2(grid) - tm.f2(grid))) < 1e-12
    assert np.max(np.abs(to.g1(grid) - tm.f1(grid))) < 1e-12


@pytest.mark.parametrize("U", [-1.0, -0.1, 0.1, 1.0])
def test_tm_to_to_example1(U):
    ex = example1_systems(Example1Params(U, 1.0))
    grid = linspace(0.0, 5.0, 4000)
    m = time_map_from_f(ex.tm.f, 0.0, 0.0, grid)
    to = tm_to_to(ex.tm, m)
    tp = np.linspace(0.0, m.tp_domain.hi, 3001)
    assert np.max(np.abs(to.g2(tp) - ex.to.g2(tp))) < 1e-7
    assert np.all(to.g1(tp) == 0) and np.all(to.g0(tp) == 0)


@pytest.mark.parametrize("a", [0.5, 2.0, -1.0])
def test_tm_to_to_example2_degenerate(a):
    ex = example2_systems(Example2Params(a, -a, 1.0))
    m = time_map_from_f(ex.tm.f, 1.0, 0.0, GRID2)
    to = tm_to_to(ex.tm, m)
    tp = np.linspace(m.tp_domain.lo, m.tp_domain.hi, 1001)
    assert np.max(np.abs(to.g2(tp) - 0.5)) < 1e-8


def test_to_to_tm_examples():
    grid = linspace(0.0, 1.0, 100)
    to = TOSystem(g2=Polynomial((0.5, 0.1)))
    ident = TimeMap.from_forward(Polynomial((0.0, 1.0)), 0.0, grid)
    tm = to_to_tm(to, ident, grid)
    assert np.max(np.abs(tm.f(grid) - 1.0)) < 1e-14
    assert np.max(np.abs(tm.f2(grid) - to.g2(grid))) < 1e-14
    ex = example1_systems(Example1Params(0.5, 1.0))
    tm = to_to_tm(ex.to, TimeMap.from_forward(ex.map.forward, 0.0, GRID1), GRID1)
    assert _maxdev(tm, ex.tm, _probe(GRID1)) < 1e-8
    # constant g2 with the a = 2 map lands on the b = -2 power law
    ex = example2_systems(Example2Params(2.0, -2.0, 1.0))
    tm = to_to_tm(TOSystem(g2=Constant(0.5)), TimeMap.from_forward(ex.map.forward, 1.0, GRID2), GRID2)
    assert _maxdev(tm, ex.tm, _probe(GRID2)) < 1e-8


def test_to_to_tm_rejects_decreasing_map():
    grid = linspace(0.0, 1.0, 50)
    m = TimeMap.from_forward(Polynomial((0.0, -1.0)), 0.0, grid)
    with pytest.raises(NotInvertibleError):
        to_to_tm(TOSystem(), m, grid)


@settings(max_examples=10)
@given(SEEDS)
def test_to_composition_route_matches_gauge_expressions(seed):
    s = random_smooth_tq(np.random.default_rng(seed))
    grid = linspace(0.0, 1.0, 400)
    g = solve_gauge(s, "restricted", grid)
    tm = tq_to_tm(s, g)
    m = time_map_from_f(tm.f, 0.0, 0.0, grid)
    a, b = tm_to_to(tm, m), to_from_gauge(s, g, tm.f, m)
    tp = _probe(m.inverse.nodes)
    assert _maxdev(a, b, tp) < 1e-8


# -- TM -> TQ and round trips ------------------------------------------------------


def test_tm_to_tq_examples():
    tm = TMSystem(f=Exponential(1.0, 0.3), f2=Constant(0.5), f0=Constant(0.2))
    grid = linspace(0.0, 1.0, 50)
    q = tm_to_tq(tm, GaugeTriple.identity(), grid)
    assert _maxdev(q, embed_tm_in_tq(tm), grid) < 1e-15
    ex = example1_systems(Example1Params(0.3, 1.2))
    assert _maxdev(tm_to_tq(ex.tm, ex.gauge, GRID1), ex.tq, _probe(GRID1)) < 1e-8
    ex = example2_systems(Example2Params(1.5, 0.7, 0.9))
    assert _maxdev(tm_to_tq(ex.tm, ex.gauge, GRID2), ex.tq, _probe(GRID2)) < 1e-8


@settings(max_examples=20)
@given(SEEDS)
def test_round_trips_on_random_systems(seed):
    s = random_smooth_tq(np.random.default_rng(seed))
    grid = linspace(0.0, 1.0, 400)
    probe = _probe(grid)
    g = solve_gauge(s, "restricted", grid)
    tm = tq_to_tm(s, g)
    assert _maxdev(tm_to_tq(tm, g, grid), s, probe) < 1e-8
    m = time_map_from_f(tm.f, 0.0, 0.0, grid)
    assert _maxdev(to_to_tm(tm_to_to(tm, m), m, grid), tm, probe) < 1e-8


@settings(max_examples=10)
@given(SEEDS)
def test_tm_to_tq_inverts_conjugation(seed):
    rng = np.random.default_rng(seed)
    q = random_smooth_tq(rng)
    tm = TMSystem(f=Exponential(1.0, rng.uniform(-0.5, 0.5)), f2=q.h2, f1=q.h1, f0=q.h0)
    gauge = GaugeTriple.from_functions(Polynomial(tuple(rng.uniform(-0.5, 0.5, 3))),
                                       Polynomial(tuple(rng.uniform(-0.5, 0.5, 3))),
                                       Polynomial(tuple(rng.uniform(-0.5, 0.5, 3))))
    d = printed_formula_discrepancy(tm, gauge, linspace(0.0, 1.0, 100))
    assert d["derived"]["max"] < 1e-8


def test_printed_formula_discrepancy_flagged():
    tm = TMSystem(f=Polynomial((1.0, 0.2)), f2=Polynomial((0.5, 0.1)), f1=Polynomial((0.3, -0.2)))
    gauge = GaugeTriple.from_functions(Polynomial((0.0, 0.4)), Polynomial((0.0, 0.3)), Polynomial((0.0, -0.2)))
    d = printed_formula_discrepancy(tm, gauge, linspace(0.0, 1.0, 100))
    assert d["printed"]["per_coefficient"]["g"] > 1e-3
    assert d["derived"]["per_coefficient"]["g"] < 1e-8
    assert d["printed_minus_derived"]["g"] > 1e-3
    # without f1 and kappa the printed g agrees
    tm0 = TMSystem(f=tm.f, f2=tm.f2)
    g0 = GaugeTriple.from_functions(Constant(0.0), gauge.mu, gauge.nu)
    assert printed_formula_discrepancy(tm0, g0, linspace(0.0, 1.0, 100))["printed"]["per_coefficient"]["g"] < 1e-12


# -- direct TQ -> TO ------------------------------------------------------------


def test_direct_to_gauge_residuals():
    ex = example1_systems(Example1Params(0.3, 1.0))
    to, g = tq_to_to_direct(ex.tq, GRID1)
    res = gauge_residuals(ex.tq, g, "to")
    assert max(res.values()) < 1e-7


def test_direct_and_composite_to_agree_without_dilation():
    ex = example1_systems(Example1Params(0.0, 1.0))
    direct, _ = tq_to_to_direct(ex.tq, GRID1)
    g = solve_gauge(ex.tq, "restricted", GRID1)
    tm = tq_to_tm(ex.tq, g)
    composite = tm_to_to(tm, time_map_from_f(tm.f, 0.0, 0.0, GRID1))
    assert _maxdev(direct, composite, GRID1) < 1e-7


def test_direct_and_composite_to_differ_with_dilation():
    # the two routes produce TO equations in different time variables
    ex = example1_systems(Example1Params(0.3, 1.0))
    direct, _ = tq_to_to_direct(ex.tq, GRID1)
    assert abs(direct.g2(2.0) - ex.to.g2(2.0)) > 1e-3


def test_report_rejects_negative_residuals():
    with pytest.raises(ValueError):
        TransformReport("TQ", "TM", TMSystem(), residuals={"g": -1.0})
