"""Real-argument Gamma/Beta, the two sine kernels, and adaptive quadrature.

After the outer integrals are collapsed, every numerator term reduces to one
of two one-dimensional integrals,

    kernel_I(beta, c) = int_0^1 sin(pi c w) / w * (1 - w)^beta dw
    kernel_J(beta, c) = int_0^1 sin(pi c w) * (1 - w)^beta dw,

evaluated here by Gauss-Jacobi quadrature whose weight is exactly
``(1 - w)^beta``.  The remaining integrand is entire, so a fixed 64-point
rule is accurate to rounding for every ``c`` we care about (``c <= 5``).
"""

from __future__ import annotations

import math
import threading
from functools import lru_cache
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, QuadratureError

_JACOBI_POINTS = 64


def ln_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"ln_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def beta(a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise DomainError(f"beta needs positive arguments, got ({a}, {b})")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


@lru_cache(maxsize=512)
def _jacobi_rule(b: float) -> Tuple[np.ndarray, np.ndarray]:
    # Nodes/weights on [0, 1] for the weight (1 - w)^b.
    x, w = roots_jacobi(_JACOBI_POINTS, b, 0.0)
    t = 0.5 * (x + 1.0)
    wt = w * 0.5 ** (b + 1.0)
    t.flags.writeable = False
    wt.flags.writeable = False
    return t, wt


def _kernel(b: float, c, with_pole: bool):
    if b < 0:
        raise DomainError(f"kernel exponent must be >= 0, got {b}")
    c_arr = np.asarray(c, dtype=float)
    if np.any(c_arr <= 0):
        raise DomainError("kernel needs c > 0")
    t, wt = _jacobi_rule(float(b))
    arg = np.multiply.outer(c_arr, t)
    if with_pole:
        # sin(pi c w)/w = pi c sinc(c w); finite at w = 0.
        vals = np.pi * c_arr[..., None] * np.sinc(arg)
    else:
        vals = np.sin(np.pi * arg)
    out = vals @ wt
    return float(out) if out.ndim == 0 else out


def kernel_I(b: float, c):
    """``int_0^1 sin(pi c w) w^-1 (1 - w)^b dw``; ``c`` may be an array."""
    return _kernel(b, c, True)


def kernel_J(b: float, c):
    """``int_0^1 sin(pi c w) (1 - w)^b dw``; ``c`` may be an array."""
    return _kernel(b, c, False)


class KernelCache:
    """Memo of kernel values keyed by ``(beta, c, kind)``.

    Reads are lock-free dict lookups; inserts take a lock.  Values are those
    of :func:`kernel_I` / :func:`kernel_J`, so cached and uncached
    evaluation agree exactly.
    """

    tolerance = 1e-11

    def __init__(self):
        self._store: Dict[Tuple[float, float, str], float] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._store)

    def get(self, b: float, c: float, kind: str) -> float:
        key = (float(b), float(c), kind)
        val = self._store.get(key)
        if val is None:
            val = kernel_I(b, c) if kind == "I" else kernel_J(b, c)
            with self._lock:
                self._store[key] = val
        return val


# Gauss-Kronrod 7/15 on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def batched_quad(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    a,
    b,
    tol: float = 1e-10,
    rel_tol: float = 0.0,
    max_panels: int = 200_000,
):
    """Integrate ``f`` over ``[a[i], b[i]]`` for a batch of items at once.

    ``f(x, owner)`` receives flat node arrays and the index of the batch item
    each node belongs to, and returns the integrand values.  An item is done
    once the summed Gauss/Kronrod discrepancy of its panels is below
    ``max(tol, rel_tol * |I|)``; until then its panels with more than their
    share of that budget are bisected (always at least its worst panel).
    Inner integrals for all outer nodes of a nested integral are resolved in
    the same vectorized passes, which is what keeps nesting affordable.

    Returns ``(values, errors)`` arrays.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    n_items = a.size
    result = np.zeros(n_items)
    err = np.zeros(n_items)
    span = np.abs(b - a)
    # Open panels: bounds and owner; kron/perr hold the already-evaluated
    # (leading, non-fresh) ones.
    lo, hi, own = a.copy(), b.copy(), np.arange(n_items)
    kron = np.zeros(0)
    perr = np.zeros(0)
    fresh = np.ones(n_items, dtype=bool)
    used = 0
    while lo.size:
        nlo, nhi, nown = lo[fresh], hi[fresh], own[fresh]
        used += nlo.size
        mid = 0.5 * (nlo + nhi)
        half = 0.5 * (nhi - nlo)
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        fx = np.asarray(f(x.ravel(), np.repeat(nown, 15)), dtype=float).reshape(x.shape)
        k_new = (fx @ _KW) * half
        e_new = np.abs(k_new - (fx @ _GW) * half)
        # Panels too narrow to split further keep their estimate but stop refining.
        e_new = np.where(np.abs(nhi - nlo) <= 1e-15 * np.maximum(1.0, np.abs(mid)), 0.0, e_new)
        lo = np.concatenate([lo[~fresh], nlo])
        hi = np.concatenate([hi[~fresh], nhi])
        own = np.concatenate([own[~fresh], nown])
        kron = np.concatenate([kron, k_new])
        perr = np.concatenate([perr, e_new])

        totals = np.zeros(n_items)
        errs = np.zeros(n_items)
        np.add.at(totals, own, kron)
        np.add.at(errs, own, perr)
        scale = np.maximum(tol, rel_tol * np.abs(totals))
        live = np.zeros(n_items, dtype=bool)
        live[own] = True
        done = live & (errs <= scale)
        result[done] = totals[done]
        err[done] = errs[done]
        keep = ~done[own]
        lo, hi, own, kron, perr = lo[keep], hi[keep], own[keep], kron[keep], perr[keep]
        if not lo.size:
            break
        share = np.divide(hi - lo, span[own], out=np.ones_like(lo), where=span[own] > 0)
        split = perr > scale[own] * share
        worst = np.full(n_items, -1.0)
        np.maximum.at(worst, own, perr)
        split |= perr >= worst[own]
        n_split = int(split.sum())
        if used + 2 * n_split > max_panels:
            best = totals[own[0]] if n_items == 1 else totals.tolist()
            raise QuadratureError("adaptive quadrature budget exhausted",
                                  best, float(errs[own].max()))
        m = 0.5 * (lo[split] + hi[split])
        n_keep = int((~split).sum())
        lo = np.concatenate([lo[~split], lo[split], m])
        hi = np.concatenate([hi[~split], m, hi[split]])
        own = np.concatenate([own[~split], own[split], own[split]])
        kron = kron[~split]
        perr = perr[~split]
        fresh = np.zeros(lo.size, dtype=bool)
        fresh[n_keep:] = True
    return result, err


def adaptive_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                  tol: float = 1e-10, rel_tol: float = 0.0,
                  max_panels: int = 20_000) -> float:
    """Adaptive Gauss-Kronrod quadrature of a vectorized ``f`` over ``[a, b]``.

    Raises :class:`QuadratureError` (with the best estimate attached) instead
    of returning an unconverged value.
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    if not tol > 0:
        raise DomainError("tol must be positive")
    vals, _ = batched_quad(lambda x, _own: f(x), [a], [b], tol, rel_tol, max_panels)
    return float(vals[0])
