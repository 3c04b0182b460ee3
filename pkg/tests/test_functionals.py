import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from zetagaps.errors import DomainError
from zetagaps.functionals import (
    Mode,
    Poly,
    d_parts,
    h_value,
    kernel_expansion,
    n_parts,
    n_subparts,
    nested_reference,
    rebase_pair,
    TERMS,
    weighted_moment,
)
from zetagaps.special import KernelCache, adaptive_quad
from zetagaps.witnesses import LAMBDA_WITNESS, MU_WITNESS

SI_PI = 1.8519370519824661704
N1_UNIT = 2 / math.pi * (SI_PI - 2 / math.pi)      # 0.7736950099...
ONE = Poly((1.0,))
ZERO = Poly((0.0,))

# tiny coefficients only probe floating-point underflow, so snap them to zero
coef = st.floats(-3, 3, allow_nan=False).map(lambda x: 0.0 if abs(x) < 1e-6 else x)
polys = st.lists(coef, min_size=1, max_size=4).map(lambda c: Poly(tuple(c)))


# -- Poly ------------------------------------------------------------------------

def test_poly_basics():
    p = Poly((1.0, -2.0, 3.0))
    assert p.degree == 2
    assert p(0.5) == pytest.approx(1 - 1 + 0.75)
    assert Poly((0.0, 0.0)).is_zero()
    assert Poly.monomial(2).coeffs == (0.0, 0.0, 1.0)
    assert (p * Poly((0.0, 1.0))).coeffs == (0.0, 1.0, -2.0, 3.0)


def test_poly_rejects_nonfinite():
    with pytest.raises(DomainError):
        Poly((1.0, float("nan")))


@given(polys, st.floats(0, 1))
def test_in_one_minus_roundtrip(p, v):
    phi = p.in_one_minus()
    assert sum(ph * (1 - v) ** i for i, ph in enumerate(phi)) == pytest.approx(p(v), abs=1e-10)


# -- rebase_pair -------------------------------------------------------------------

def test_rebase_pair_examples():
    assert rebase_pair(ONE, ONE, 2.0) == [(0, pytest.approx(1 / 3))]
    out = dict(rebase_pair(ONE, Poly((0.0, 1.0)), 1.0))
    assert out[1] == pytest.approx(1 / 6, abs=1e-15)
    assert out.get(0, 0.0) == pytest.approx(0.0, abs=1e-15)


@given(polys, polys, st.floats(0.0, 10.0))
def test_rebase_pair_matches_quadrature(f, g, a):
    w = 0.37
    terms = rebase_pair(f, g, a)
    assert len(terms) <= (f.degree + 1) * (g.degree + 1) + g.degree
    lhs = adaptive_quad(lambda v: (1 - v) ** a * f(v) * g(v - w), w, 1.0, tol=1e-13)
    rhs = sum(gm * (1 - w) ** (a + 1 + m) for m, gm in terms)
    assert rhs == pytest.approx(lhs, abs=1e-10)


def test_weighted_moment():
    assert weighted_moment(ONE, ONE, 0.0) == pytest.approx(1.0)
    assert weighted_moment(Poly((0, 1)), ONE, 2.0) == pytest.approx(1 / 12)


# -- denominator ---------------------------------------------------------------------

def test_d_parts_examples():
    assert d_parts(ONE, ZERO, 1.0) == pytest.approx((1.0, 0.0, 0.0))
    assert d_parts(ONE, ONE, 1.0)[1] == pytest.approx(1 / 3, rel=1e-14)
    assert d_parts(ONE, ONE, 1.0)[2] == pytest.approx(7 / 120, rel=1e-14)


def test_d_parts_rejects_small_r():
    with pytest.raises(DomainError):
        d_parts(ONE, ONE, 0.99)


def test_nested_denominator_examples():
    assert nested_reference(ONE, ONE, 1.0, 1.0, "D2") == pytest.approx(1 / 3, abs=1e-9)
    f1, f2 = Poly((0.3, -1.0, 2.0)), Poly((1.0, 0.5))
    for r in (1.0, 1.7, 2.6):
        assert nested_reference(f1, f2, r, 1.0, "D1") == pytest.approx(d_parts(f1, f2, r)[0], abs=1e-9)


# -- numerator -------------------------------------------------------------------------

def test_n_parts_unit_case():
    n = n_parts(ONE, ZERO, 1.0, 1.0)
    assert n[0] == pytest.approx(N1_UNIT, rel=1e-13)
    assert n[0] == pytest.approx(0.7736950099, abs=1e-10)
    assert n[1:] == (0.0, 0.0, 0.0)
    assert nested_reference(ONE, ZERO, 1.0, 1.0, "N1") == pytest.approx(N1_UNIT, abs=1e-9)


def test_n_parts_zero_polys():
    assert n_parts(ZERO, ZERO, 2.1, 1.3) == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("r,c", [(0.5, 1.0), (1.0, 0.0), (2.0, -1.0)])
def test_n_parts_domain(r, c):
    with pytest.raises(DomainError):
        n_parts(ONE, ONE, r, c)


def test_witness_parts_match_nested():
    w = LAMBDA_WITNESS
    sub = n_subparts(w.f1, w.f2, w.r, w.c)
    for name, val in sub.items():
        ref = nested_reference(w.f1, w.f2, w.r, w.c, name)
        assert val == pytest.approx(ref, rel=1e-8)


def test_n31_against_scipy_tplquad():
    # independent library oracle for one triple integral
    f1, f2, r, c = Poly((1.0, 0.5)), Poly((0.2, 1.0)), 1.3, 1.1
    e = r * r - 1

    def integrand(w, v, u):
        return (1 - u) * (u - v) ** e * f1(v) * math.sin(math.pi * c * w) / w * f2(v - w)

    val, _ = integrate.tplquad(integrand, 0, 1, 0, lambda u: u, 0, lambda u, v: v,
                               epsabs=1e-11, epsrel=1e-11)
    ref = 2 * r**7 / math.pi * val
    assert n_subparts(f1, f2, r, c)["N31"] == pytest.approx(ref, rel=1e-7)


def test_kernel_exponents_are_r2_plus_integer():
    f1, f2 = Poly((1, 2, 3, 4)), Poly((1, 1, 1, 1))
    r = 1.37
    for name in ("N1", "N2", "N31", "N32", "N4a", "N4b"):
        t = TERMS[name]
        F, G = (f1 if s == "f1" else f2 for s in t.slots)
        for b, _ in kernel_expansion(t, F, G, r):
            k = b - r * r
            assert abs(k - round(k)) < 1e-12
            assert 0 <= round(k) <= 4 + 3 + 3


@given(st.floats(1e-6, 1e-3))
def test_numerator_vanishes_as_c_to_zero(c):
    f1, f2 = Poly((1.0, -0.5)), Poly((0.4, 1.0))
    n = n_parts(f1, f2, 1.8, c)
    scale = n_parts(f1, f2, 1.8, 1.0)
    assert max(abs(x) for x in n) <= 10 * c * max(abs(x) for x in scale) + 1e-12


# -- h(c) -----------------------------------------------------------------------------

def test_h_value_unit_case():
    hp = h_value(ONE, ZERO, 1.0, 1.0, Mode.PLAIN)
    hl = h_value(ONE, ZERO, 1.0, 1.0, Mode.LIOUVILLE)
    assert hp.h == pytest.approx(1 - N1_UNIT, rel=1e-12)
    assert hp.h == pytest.approx(0.2263049901, abs=1e-10)
    assert hl.h == pytest.approx(1 + N1_UNIT, rel=1e-12)


def test_h_value_breakdown_invariants():
    for w in (LAMBDA_WITNESS, MU_WITNESS):
        hb = h_value(w.f1, w.f2, w.r, w.c, w.mode)
        assert hb.d1 >= 0 and hb.d3 > 0 and hb.denominator > 0
        assert hb.h == pytest.approx(w.c - w.mode.sign * hb.numerator / hb.denominator, rel=1e-15)
        assert hb.certifies


def test_lambda_witness_certifies():
    w = LAMBDA_WITNESS
    assert h_value(w.f1, w.f2, w.r, w.c, Mode.PLAIN).h < 1


def test_h_value_zero_polys():
    with pytest.raises(DomainError):
        h_value(ZERO, ZERO, 2.0, 1.0)


def test_cache_does_not_change_h():
    w = LAMBDA_WITNESS
    cache = KernelCache()
    a = h_value(w.f1, w.f2, w.r, w.c, cache=cache)
    b = h_value(w.f1, w.f2, w.r, w.c, cache=cache)
    c = h_value(w.f1, w.f2, w.r, w.c)
    assert a == b == c


@given(polys, polys, st.floats(1, 3), st.floats(0.1, 3), st.sampled_from([-2.0, 0.5, 7.0]))
def test_h_homogeneous(f1, f2, r, c, t):
    if f1.is_zero() and f2.is_zero():
        return
    if sum(d_parts(f1, f2, r)) < 1e-8:
        return
    h0 = h_value(f1, f2, r, c).h
    h1 = h_value(f1.scaled(t), f2.scaled(t), r, c).h
    assert h1 == pytest.approx(h0, rel=1e-9, abs=1e-9)


@given(polys, st.floats(1, 3), st.floats(0.1, 3))
def test_f2_zero_decouples(f1, r, c):
    d = d_parts(f1, ZERO, r)
    n = n_parts(f1, ZERO, r, c)
    assert d[1] == d[2] == 0.0
    assert n[1] == n[2] == n[3] == 0.0


@given(polys, polys, st.floats(1, 3))
def test_denominator_sign_structure(f1, f2, r):
    d1, _, d3 = d_parts(f1, f2, r)
    assert d1 >= 0 and d3 >= 0
    if not f2.is_zero():
        assert d3 > 0
