import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zetagaps.errors import DomainError, QuadratureError
from zetagaps.special import (
    KernelCache,
    adaptive_quad,
    batched_quad,
    beta,
    kernel_I,
    kernel_J,
    ln_gamma,
)

# Frozen from a 30-digit mpmath evaluation.
SI_PI = 1.8519370519824661704
LN_GAMMA_676 = 6.1342603044238804083
J_676_27327 = 0.068979162208095068503
I_5_2 = 0.85409775623974595784


def si_series(x, terms=40):
    return sum((-1) ** k * x ** (2 * k + 1) / ((2 * k + 1) * math.factorial(2 * k + 1))
               for k in range(terms))


def test_ln_gamma_values():
    assert ln_gamma(1.0) == 0.0
    assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)
    assert ln_gamma(6.76) == pytest.approx(LN_GAMMA_676, rel=1e-13)
    for n in range(1, 20):
        assert ln_gamma(n + 1.0) == pytest.approx(math.log(math.factorial(n)), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_ln_gamma_domain(x):
    with pytest.raises(DomainError):
        ln_gamma(x)


def test_beta_values():
    assert beta(1, 1) == pytest.approx(1.0, rel=1e-15)
    assert beta(2, 4) == pytest.approx(1 / 20, rel=1e-14)
    assert beta(2, 6.76) == pytest.approx(1 / (6.76 * 7.76), rel=1e-13)
    assert beta(2, 6.76) == pytest.approx(0.019063014701397, rel=1e-12)


@pytest.mark.parametrize("a,b", [(0, 1), (1, -2), (-1, -1)])
def test_beta_domain(a, b):
    with pytest.raises(DomainError):
        beta(a, b)


pos = st.floats(0.01, 10.0)


@given(pos, pos)
def test_beta_symmetry(a, b):
    assert beta(a, b) == pytest.approx(beta(b, a), rel=1e-14)


@given(pos, pos)
def test_beta_recurrence(a, b):
    assert beta(a, b) == pytest.approx(beta(a + 1, b) * (a + b) / a, rel=1e-12)


def test_kernel_I_values():
    assert si_series(math.pi) == pytest.approx(SI_PI, rel=1e-15)
    assert kernel_I(0, 1.0) == pytest.approx(SI_PI, abs=1e-13)
    assert kernel_I(5, 2.0) == pytest.approx(I_5_2, abs=1e-13)
    for c in (1e-3, 1e-5):
        assert kernel_I(0, c) / (math.pi * c) == pytest.approx(1.0, rel=1e-5)


def test_kernel_J_values():
    assert kernel_J(0, 1.0) == pytest.approx(2 / math.pi, abs=1e-14)
    assert kernel_J(0, 2.0) == pytest.approx(0.0, abs=1e-14)
    assert kernel_J(6.76, 2.7327) == pytest.approx(J_676_27327, abs=1e-13)
    for c in (0.3, 1.7, 4.9):
        assert kernel_J(0, c) == pytest.approx((1 - math.cos(math.pi * c)) / (math.pi * c), abs=1e-14)


def test_kernels_agree_with_adaptive_quadrature():
    for b in (0.0, 1.3924, 6.76, 11.76):
        for c in (0.2, 1.0, 2.7327, 5.0):
            ref_i = adaptive_quad(lambda w: np.pi * c * np.sinc(c * w) * (1 - w) ** b, 0, 1, tol=1e-14)
            ref_j = adaptive_quad(lambda w: np.sin(np.pi * c * w) * (1 - w) ** b, 0, 1, tol=1e-14)
            assert kernel_I(b, c) == pytest.approx(ref_i, abs=1e-11)
            assert kernel_J(b, c) == pytest.approx(ref_j, abs=1e-11)


def test_kernel_vectorized_over_c():
    cs = np.array([0.3, 1.0, 2.5])
    assert np.allclose(kernel_I(3.2, cs), [kernel_I(3.2, c) for c in cs], atol=0, rtol=1e-15)
    assert np.allclose(kernel_J(3.2, cs), [kernel_J(3.2, c) for c in cs], atol=0, rtol=1e-15)


@pytest.mark.parametrize("b,c", [(-0.1, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_kernel_domain(b, c):
    with pytest.raises(DomainError):
        kernel_I(b, c)
    with pytest.raises(DomainError):
        kernel_J(b, c)


@given(st.floats(0.0, 15.0), st.floats(0.01, 5.0), st.floats(0.05, 1.0))
def test_kernels_decrease_in_beta(b, db, c):
    assert kernel_I(b + db, c) < kernel_I(b, c)
    assert kernel_J(b + db, c) < kernel_J(b, c)


@given(st.floats(0.0, 20.0), st.floats(1e-4, 1.0))
def test_kernel_I_bound(b, c):
    assert abs(kernel_I(b, c)) <= math.pi * c / (b + 1) * (1 + 1e-12)


def test_cache_coherent():
    cache = KernelCache()
    for b, c in [(1.5, 0.7), (6.76, 2.7327), (1.5, 0.7)]:
        assert cache.get(b, c, "I") == kernel_I(b, c)
        assert cache.get(b, c, "J") == kernel_J(b, c)
    assert len(cache) == 4


def test_adaptive_quad_examples():
    assert adaptive_quad(lambda x: x, 0, 1, tol=1e-12) == pytest.approx(0.5, abs=1e-12)
    assert adaptive_quad(lambda x: np.sin(np.pi * x), 0, 1) == pytest.approx(2 / math.pi, abs=1e-10)
    assert adaptive_quad(lambda x: (1 - x) ** 5.76, 0, 1) == pytest.approx(1 / 6.76, abs=1e-10)


def test_adaptive_quad_weak_singularity():
    val = adaptive_quad(lambda x: (1 - x) ** 0.3924, 0, 1, tol=1e-12)
    assert val == pytest.approx(1 / 1.3924, abs=1e-11)


def test_adaptive_quad_budget_error():
    with pytest.raises(QuadratureError) as info:
        adaptive_quad(lambda x: np.sin(1 / np.maximum(x, 1e-300)), 0, 1, tol=1e-14, max_panels=200)
    assert info.value.estimate is not None
    assert info.value.error > 0


def test_adaptive_quad_bad_interval():
    with pytest.raises(DomainError):
        adaptive_quad(lambda x: x, 1, 0)
    with pytest.raises(DomainError):
        adaptive_quad(lambda x: x, 0, 1, tol=0)


def test_batched_quad_items_independent():
    a = np.zeros(3)
    b = np.array([1.0, 2.0, 3.0])
    vals, errs = batched_quad(lambda x, own: x ** (own + 1), a, b, tol=1e-13)
    assert np.allclose(vals, [0.5, 8 / 3, 81 / 4], rtol=1e-13)
    assert np.all(errs <= 1e-12)
