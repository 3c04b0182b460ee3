"""Leading-term denominators and numerators of the gap functional.

Each quantity is stored as the coefficient of ``A_r (log T)^{r^2}``; that
common factor cancels in ``h(c)``, so it never needs a numeric value.

Every part is bilinear in a pair of polynomials drawn from ``(f1, f2)`` and
falls into one of two shapes, listed in :data:`D_TERMS` and :data:`N_TERMS`:

* denominators: ``int_0^1 (1-u)^p int_0^u (u-v)^{r^2-1} F(v) G(v) dv du``
  (or the single integral ``int_0^1 (1-u)^{r^2-1} f1(u)^2 du``);
* numerators: the same with ``G(v)`` replaced by
  ``int_0^v k(w) G(v-w) dw`` for a sine kernel ``k``.

The production route collapses the ``u`` integral with the Beta identity
``int_v^1 (1-u)^p (u-v)^{b-1} du = B(p+1, b) (1-v)^{p+b}``, rebases the
``v`` integral with :func:`rebase_pair`, and ends as a short sum of
:func:`~zetagaps.special.kernel_I` / :func:`~zetagaps.special.kernel_J`
values.  :func:`nested_reference` integrates the uncollapsed forms directly
and exists to cross-check the collapse.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError
from .special import KernelCache, batched_quad, beta, kernel_I, kernel_J


class Mode(str, enum.Enum):
    PLAIN = "plain"
    LIOUVILLE = "liouville"

    @property
    def sign(self) -> int:
        # h = c - sign * N / D
        return 1 if self is Mode.PLAIN else -1


@dataclass(frozen=True)
class Poly:
    """Real polynomial on [0, 1]; ``coeffs[m]`` multiplies ``x**m``."""

    coeffs: Tuple[float, ...] = (0.0,)

    def __post_init__(self):
        cs = tuple(float(c) for c in self.coeffs) or (0.0,)
        if not all(math.isfinite(c) for c in cs):
            raise DomainError(f"non-finite polynomial coefficient in {cs}")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def monomial(cls, m: int) -> "Poly":
        return cls((0.0,) * m + (1.0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, x):
        return P.polyval(x, self.coeffs)

    def scaled(self, t: float) -> "Poly":
        return Poly(tuple(t * c for c in self.coeffs))

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly(tuple(np.convolve(self.coeffs, other.coeffs)))

    def in_one_minus(self) -> np.ndarray:
        """Coefficients ``phi`` with ``self(v) = sum_i phi[i] (1 - v)**i``."""
        n = len(self.coeffs)
        out = np.zeros(n)
        for j, a in enumerate(self.coeffs):
            if a:
                for i in range(j + 1):
                    out[i] += a * math.comb(j, i) * (-1) ** i
        return out


ZERO = Poly((0.0,))


def _as_poly(f) -> Poly:
    return f if isinstance(f, Poly) else Poly(tuple(f))


def rebase_pair(f: Poly, g: Poly, a: float) -> List[Tuple[int, float]]:
    """Expand ``int_w^1 (1-v)^a f(v) g(v-w) dv`` in powers of ``1 - w``.

    Returns ``[(m, gamma_m), ...]`` such that the integral equals
    ``sum_m gamma_m (1-w)^(a+1+m)`` for every ``w`` in [0, 1].
    """
    f, g = _as_poly(f), _as_poly(g)
    if not a > -1:
        raise DomainError(f"rebase_pair needs a > -1, got {a}")
    phi = f.in_one_minus()
    # With s = 1-v, t = 1-w: g(v-w) = g(t-s) = sum_j g_j sum_l C(j,l) t^(j-l) (-s)^l,
    # and int_w^1 s^(a+i+l) dv = t^(a+i+l+1) / (a+i+l+1).
    gamma: Dict[int, float] = {}
    for i, ph in enumerate(phi):
        if not ph:
            continue
        for j, gj in enumerate(g.coeffs):
            if not gj:
                continue
            acc = 0.0
            for l in range(j + 1):
                acc += math.comb(j, l) * (-1) ** l / (a + i + l + 1)
            gamma[i + j] = gamma.get(i + j, 0.0) + ph * gj * acc
    return sorted(gamma.items())


def weighted_moment(f: Poly, g: Poly, e: float) -> float:
    """``int_0^1 (1-v)^e f(v) g(v) dv`` in closed form."""
    phi = (_as_poly(f) * _as_poly(g)).in_one_minus()
    return float(sum(ph / (e + i + 1) for i, ph in enumerate(phi)))


@dataclass(frozen=True)
class Term:
    """One bilinear part of the denominator or numerator.

    ``outer_power`` is the exponent ``p`` of ``(1-u)^p`` in front of the
    triangle integral; ``None`` marks the single-level forms whose weight is
    ``(1-u)^{r^2-1}`` directly.  ``kind`` is ``"I"`` (kernel ``sin/w``),
    ``"J"`` (kernel ``sin``) or ``None`` for denominators.
    """

    name: str
    slots: Tuple[str, str]
    outer_power: Optional[int]
    kind: Optional[str]
    prefactor: Callable[[float], float]

    def exponent(self, r: float) -> float:
        """Exponent of ``(1-v)`` after the ``u`` integral is collapsed."""
        r2 = r * r
        return r2 - 1.0 if self.outer_power is None else self.outer_power + r2

    def coefficient(self, r: float) -> float:
        """Prefactor times the Beta factor produced by the collapse."""
        c = self.prefactor(r)
        if self.outer_power is not None:
            c *= beta(self.outer_power + 1.0, r * r)
        return c


D_TERMS: Tuple[Term, ...] = (
    Term("D1", ("f1", "f1"), None, None, lambda r: r**2),
    Term("D2", ("f1", "f2"), 1, None, lambda r: 2 * r**6),
    Term("D3", ("f2", "f2"), 3, None, lambda r: r**10 / 6 + 2 * r**8 / 3 + r**6 / 3),
)

N_TERMS: Tuple[Term, ...] = (
    Term("N1", ("f1", "f1"), None, "I", lambda r: 2 * r**3 / math.pi),
    Term("N2", ("f2", "f1"), 1, "I", lambda r: 2 * r**7 / math.pi),
    Term("N31", ("f1", "f2"), 1, "I", lambda r: 2 * r**7 / math.pi),
    Term("N32", ("f1", "f2"), 0, "J", lambda r: 4 * r**5 / math.pi),
    Term("N4a", ("f2", "f2"), 3, "I",
         lambda r: (r**11 / 3 + 4 * r**9 / 3 + 2 * r**7 / 3) / math.pi),
    Term("N4b", ("f2", "f2"), 2, "J", lambda r: (2 * r**9 + 4 * r**7) / math.pi),
)

TERMS: Dict[str, Term] = {t.name: t for t in D_TERMS + N_TERMS}


def _check_r(r: float):
    if not r >= 1:
        raise DomainError(f"r must be >= 1, got {r}")


def _check_c(c: float):
    if not c > 0:
        raise DomainError(f"c must be > 0, got {c}")


def d_term(term: Term, F: Poly, G: Poly, r: float) -> float:
    return term.coefficient(r) * weighted_moment(F, G, term.exponent(r))


def kernel_expansion(term: Term, F: Poly, G: Poly, r: float) -> List[Tuple[float, float]]:
    """``[(beta, weight), ...]`` so that the part equals ``sum weight * kernel(beta, c)``."""
    a = term.exponent(r)
    coef = term.coefficient(r)
    return [(a + 1.0 + m, coef * gam) for m, gam in rebase_pair(F, G, a)]


def n_term(term: Term, F: Poly, G: Poly, r: float, c: float,
           cache: Optional[KernelCache] = None) -> float:
    total = 0.0
    for b, wt in kernel_expansion(term, F, G, r):
        if cache is not None:
            k = cache.get(b, c, term.kind)
        else:
            k = kernel_I(b, c) if term.kind == "I" else kernel_J(b, c)
        total += wt * k
    return total


def d_parts(f1, f2, r: float) -> Tuple[float, float, float]:
    _check_r(r)
    polys = {"f1": _as_poly(f1), "f2": _as_poly(f2)}
    return tuple(d_term(t, polys[t.slots[0]], polys[t.slots[1]], r) for t in D_TERMS)


def n_subparts(f1, f2, r: float, c: float,
               cache: Optional[KernelCache] = None) -> Dict[str, float]:
    """The six separately printed numerator pieces N1, N2, N31, N32, N4a, N4b."""
    _check_r(r)
    _check_c(c)
    polys = {"f1": _as_poly(f1), "f2": _as_poly(f2)}
    return {t.name: n_term(t, polys[t.slots[0]], polys[t.slots[1]], r, c, cache)
            for t in N_TERMS}


def n_parts(f1, f2, r: float, c: float,
            cache: Optional[KernelCache] = None) -> Tuple[float, float, float, float]:
    s = n_subparts(f1, f2, r, c, cache)
    return s["N1"], s["N2"], s["N31"] + s["N32"], s["N4a"] + s["N4b"]


# -- direct nested quadrature -------------------------------------------------

_TOL = {"outer": (1e-12, 1e-11), "mid": (1e-13, 1e-12), "inner": (1e-14, 1e-13)}


def _kernel_fn(kind: str, c: float):
    if kind == "I":
        return lambda w: np.pi * c * np.sinc(c * w)
    return lambda w: np.sin(np.pi * c * w)


def _inner(kind: str, c: float, G: Poly, v: np.ndarray) -> np.ndarray:
    k = _kernel_fn(kind, c)
    tol, rtol = _TOL["inner"]
    vals, _ = batched_quad(lambda w, o: k(w) * G(v[o] - w), np.zeros_like(v), v, tol, rtol)
    return vals


def _triangle(p: int, r: float, F: Poly, inner_fn, u: np.ndarray) -> np.ndarray:
    # int_0^u (u-v)^(r^2-1) F(v) inner_fn(v) dv for each u
    e = r * r - 1.0
    tol, rtol = _TOL["mid"]
    vals, _ = batched_quad(
        lambda v, o: np.maximum(u[o] - v, 0.0) ** e * F(v) * inner_fn(v),
        np.zeros_like(u), u, tol, rtol,
    )
    return vals


def nested_reference(f1, f2, r: float, c: float, which: str) -> float:
    """Integrate one printed part directly by nested adaptive quadrature.

    ``which`` is one of D1, D2, D3, N1, N2, N31, N32, N4a, N4b.  Slow; for
    cross-checking :func:`d_parts` / :func:`n_parts` only.
    """
    _check_r(r)
    if which not in TERMS:
        raise DomainError(f"unknown part {which!r}; expected one of {sorted(TERMS)}")
    term = TERMS[which]
    if term.kind is not None:
        _check_c(c)
    polys = {"f1": _as_poly(f1), "f2": _as_poly(f2)}
    F, G = polys[term.slots[0]], polys[term.slots[1]]
    r2 = r * r
    tol, rtol = _TOL["outer"]
    pref = term.prefactor(r)

    if term.outer_power is None:
        if term.kind is None:
            def outer(u, _o):
                return (1.0 - u) ** (r2 - 1.0) * F(u) * G(u)
        else:
            k = _kernel_fn(term.kind, c)

            def outer(u, _o):
                tol_i, rtol_i = _TOL["mid"]
                inner, _ = batched_quad(lambda v, o: k(v) * G(u[o] - v),
                                        np.zeros_like(u), u, tol_i, rtol_i)
                return (1.0 - u) ** (r2 - 1.0) * F(u) * inner
    else:
        p = term.outer_power
        if term.kind is None:
            inner_fn = G
        else:
            def inner_fn(v):
                return _inner(term.kind, c, G, v)

        def outer(u, _o):
            return (1.0 - u) ** p * _triangle(p, r, F, inner_fn, u)

    vals, _ = batched_quad(outer, [0.0], [1.0], tol, rtol)
    return pref * float(vals[0])


# -- assembled h(c) ---------------------------------------------------------------

@dataclass(frozen=True)
class HcBreakdown:
    d1: float
    d2: float
    d3: float
    n1: float
    n2: float
    n3: float
    n4: float
    h: float
    mode: Mode
    c: float

    @property
    def denominator(self) -> float:
        return self.d1 + self.d2 + self.d3

    @property
    def numerator(self) -> float:
        return self.n1 + self.n2 + self.n3 + self.n4

    @property
    def certifies(self) -> bool:
        """``h < 1`` in plain mode (gap >= c), ``h > 1`` in Liouville mode (gap <= c)."""
        return self.h < 1 if self.mode is Mode.PLAIN else self.h > 1


def h_value(f1, f2, r: float, c: float, mode: Mode = Mode.PLAIN,
            cache: Optional[KernelCache] = None) -> HcBreakdown:
    mode = Mode(mode)
    f1, f2 = _as_poly(f1), _as_poly(f2)
    if f1.is_zero() and f2.is_zero():
        raise DomainError("f1 and f2 are both zero: the denominator vanishes")
    d1, d2, d3 = d_parts(f1, f2, r)
    n1, n2, n3, n4 = n_parts(f1, f2, r, c, cache)
    den = d1 + d2 + d3
    if not den > 0:
        raise DomainError(f"non-positive denominator {den!r}")
    h = c - mode.sign * (n1 + n2 + n3 + n4) / den
    return HcBreakdown(d1, d2, d3, n1, n2, n3, n4, h, mode, c)
