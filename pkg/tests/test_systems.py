import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qxform.examples import Example1Params, example1_systems, random_smooth_tq
from qxform.systems import (
    TMSystem,
    TOSystem,
    TQSystem,
    as_tq,
    embed_tm_in_tq,
    embed_to_in_tq,
    hamiltonian_coeffs,
    system_from_dict,
    tm_from_tq,
)
from qxform.timefn import Constant, Exponential, Polynomial


def _same(a, b, ts):
    return all(np.array_equal(np.broadcast_to(ca(ts), ts.shape), np.broadcast_to(cb(ts), ts.shape))
               for ca, cb in zip(a.coeffs().values(), b.coeffs().values()))


def test_embed_tm_examples():
    q = embed_tm_in_tq(TMSystem())
    assert all(c(0.3) == 0.0 for c in q.coeffs().values())
    U, w = 0.3, 1.2
    ex = example1_systems(Example1Params(U, w))
    q = embed_tm_in_tq(ex.tm)
    ts = np.linspace(0, 2, 9)
    assert np.allclose(q.k(ts), np.exp(U * ts) - 1.0, atol=1e-15)
    assert q.h(1.0) == 0.0 and q.g(1.0) == 0.0
    assert embed_tm_in_tq(TMSystem(f0=Constant(0.7))).h0(2.0) == 0.7


def test_embed_to_examples():
    q = embed_to_in_tq(TOSystem(g2=Constant(0.5)))
    assert q.h2(1.0) == 0.5 and q.k(1.0) == 0.0 and q.h1(1.0) == 0.0
    assert embed_to_in_tq(TOSystem(g1=Constant(-0.2))).h1(0.0) == -0.2
    U, w = -0.5, 1.0
    ex = example1_systems(Example1Params(U, w))
    q = embed_to_in_tq(ex.to)
    tp = np.linspace(0, 1.5, 7)
    assert np.allclose(q.h2(tp), 0.5 * w * w / (1 + U * tp) ** 2, rtol=1e-15)


@given(st.integers(0, 2 ** 32 - 1))
def test_embedding_round_trip_exact(seed):
    rng = np.random.default_rng(seed)
    q = random_smooth_tq(rng)
    tm = TMSystem(f=Exponential(1.0, rng.uniform(-1, 1)), f2=q.h2, f1=q.h1, f0=q.h0)
    ts = np.linspace(0, 1, 11)
    assert _same(tm_from_tq(embed_tm_in_tq(tm)), tm, ts)
    to = TOSystem(g2=q.h2, g1=q.h1, g0=q.h0)
    back = embed_to_in_tq(to)
    assert _same(TOSystem(g2=back.h2, g1=back.h1, g0=back.h0), to, ts)


def test_hamiltonian_coeffs_examples():
    assert hamiltonian_coeffs(TQSystem(), 0.0) == (0.5, 0.0, 0.0, 0.0, 0.0, 0.0)
    U, w = 0.2, 1.5
    ex = example1_systems(Example1Params(U, w))
    hc = hamiltonian_coeffs(ex.tq, 0.7)
    # S-form  -P^2 + 2T + U D - w^2 X^2   <=>   H = P^2/2 - (U/2) D + w^2 X^2/2
    assert hc == (0.5, -U / 2, 0.0, 0.5 * w * w, 0.0, 0.0)
    hc = hamiltonian_coeffs(ex.tm, 0.0)
    assert hc.kinetic == 0.5 and hc.x2 == 0.5 * w * w


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 1.0))
def test_hamiltonian_coeffs_real(seed, t):
    q = random_smooth_tq(np.random.default_rng(seed))
    assert all(isinstance(v, float) and math.isfinite(v) for v in hamiltonian_coeffs(q, t))


def test_serialization_round_trip():
    q = TQSystem(k=Polynomial((0.1, 0.2)), h=Constant(0.3), h2=Exponential(0.5, -0.1))
    again = system_from_dict(q.to_dict())
    assert isinstance(again, TQSystem)
    assert _same(q, again, np.linspace(0, 1, 5))


def test_unknown_coefficient_rejected():
    with pytest.raises(ValueError, match="unknown TM"):
        system_from_dict({"class": "TM", "coeffs": {"h": {"kind": "constant", "value": 1.0}}})


def test_as_tq_dispatch():
    assert isinstance(as_tq(TOSystem()), TQSystem)
    with pytest.raises(TypeError):
        as_tq("nope")


def test_domain_intersection():
    ex = example1_systems(Example1Params(-1.0, 1.0))
    assert ex.to.domain.hi == 1.0 and ex.to.domain.hi_open
