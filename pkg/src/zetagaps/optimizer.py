"""Choosing the polynomials: Rayleigh quotients and threshold search.

For fixed ``(r, c)`` both the denominator and the numerator are quadratic
forms in the joint coefficient vector ``a = (f1 coeffs, f2 coeffs)``, so the
best achievable ratio ``N/D`` is the top generalized eigenvalue of
``(M_N, M_D)``.  With that ratio ``R(c)`` the certification criteria read

    plain:      h(c) < 1  <=>  R(c) > c - 1
    Liouville:  h(c) > 1  <=>  R(c) > 1 - c

and :func:`threshold_c` locates where ``g(c) = R(c) - target(c)`` changes
sign.  For a fixed ``r`` the dependence on ``c`` enters only through kernel
values, so :class:`FormFamily` precomputes coefficient tensors once and then
produces ``M_N(c)`` for whole arrays of ``c`` at a time.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BracketError, DomainError
from .functionals import (D_TERMS, N_TERMS, Mode, Poly, _check_r, d_term, h_value,
                          kernel_expansion)
from .special import KernelCache, kernel_I, kernel_J

log = logging.getLogger(__name__)

DEFAULT_DEGREES = {Mode.PLAIN: (3, 3), Mode.LIOUVILLE: (3, 1)}
DEFAULT_BRACKETS = {Mode.PLAIN: (1.0, 4.0), Mode.LIOUVILLE: (0.2, 1.0)}
DEFAULT_R_GRIDS = {Mode.PLAIN: (2.0, 3.2, 0.05), Mode.LIOUVILLE: (1.0, 1.6, 0.02)}
SCAN_STEP = 0.01
DEFAULT_TOL = 1e-7


def arange_inclusive(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise DomainError("grid step must be positive")
    if hi < lo:
        return np.zeros(0)
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def target(c, mode: Mode):
    c = np.asarray(c, dtype=float)
    return c - 1.0 if Mode(mode) is Mode.PLAIN else 1.0 - c


@dataclass
class QuadForm:
    deg1: int
    deg2: Optional[int]
    M_D: np.ndarray
    M_N: np.ndarray
    r: float
    c: float

    @property
    def dim(self) -> int:
        return self.M_D.shape[0]

    def split(self, a: Sequence[float]) -> Tuple[Poly, Poly]:
        return split_vector(a, self.deg1, self.deg2)


def split_vector(a: Sequence[float], deg1: int, deg2: Optional[int]) -> Tuple[Poly, Poly]:
    a = np.asarray(a, dtype=float)
    f1 = Poly(tuple(a[: deg1 + 1]))
    f2 = Poly(tuple(a[deg1 + 1:])) if deg2 is not None else Poly((0.0,))
    return f1, f2


def join_polys(f1: Poly, f2: Poly, deg1: int, deg2: Optional[int]) -> np.ndarray:
    a1 = np.zeros(deg1 + 1)
    a1[: len(f1.coeffs)] = f1.coeffs[: deg1 + 1]
    if deg2 is None:
        return a1
    a2 = np.zeros(deg2 + 1)
    a2[: len(f2.coeffs)] = f2.coeffs[: deg2 + 1]
    return np.concatenate([a1, a2])


class FormFamily:
    """``M_D`` and the ``c``-parametrized ``M_N(c)`` for fixed ``r`` and degrees.

    ``deg2=None`` drops ``f2`` entirely (dimension ``deg1 + 1``).
    """

    def __init__(self, r: float, deg1: int, deg2: Optional[int]):
        _check_r(r)
        if deg1 < 0 or (deg2 is not None and deg2 < 0):
            raise DomainError("degrees must be non-negative")
        self.r, self.deg1, self.deg2 = float(r), int(deg1), deg2
        blocks = {"f1": [("f1", i) for i in range(deg1 + 1)]}
        blocks["f2"] = [("f2", j) for j in range(deg2 + 1)] if deg2 is not None else []
        index = {key: n for n, key in enumerate(blocks["f1"] + blocks["f2"])}
        dim = len(index)
        self.dim = dim

        M_D = np.zeros((dim, dim))
        for t in D_TERMS:
            for sf, i in blocks[t.slots[0]]:
                for sg, j in blocks[t.slots[1]]:
                    M_D[index[sf, i], index[sg, j]] += d_term(
                        t, Poly.monomial(i), Poly.monomial(j), r)
        self.M_D = 0.5 * (M_D + M_D.T)

        coeffs: Dict[Tuple[str, float], np.ndarray] = {}
        for t in N_TERMS:
            for sf, i in blocks[t.slots[0]]:
                for sg, j in blocks[t.slots[1]]:
                    for b, wt in kernel_expansion(t, Poly.monomial(i), Poly.monomial(j), r):
                        key = (t.kind, round(b, 12))
                        mat = coeffs.setdefault(key, np.zeros((dim, dim)))
                        mat[index[sf, i], index[sg, j]] += wt
        keys = sorted(coeffs)
        self._keys = keys
        self._tensor = np.stack([0.5 * (coeffs[k] + coeffs[k].T) for k in keys]) \
            if keys else np.zeros((0, dim, dim))

    def kernel_values(self, c) -> np.ndarray:
        """Kernel values, shape ``(len(c), n_keys)``."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        cols = [kernel_I(b, c) if kind == "I" else kernel_J(b, c) for kind, b in self._keys]
        return np.stack(cols, axis=-1) if cols else np.zeros((c.size, 0))

    def M_N(self, c) -> np.ndarray:
        """``M_N`` at each ``c``; shape ``(len(c), dim, dim)``."""
        return np.einsum("ck,kij->cij", self.kernel_values(c), self._tensor)

    def form(self, c: float) -> QuadForm:
        return QuadForm(self.deg1, self.deg2, self.M_D.copy(), self.M_N([c])[0], self.r, float(c))

    def max_ratio(self, c) -> np.ndarray:
        """Top generalized eigenvalue for every ``c`` in an array."""
        L = _cholesky(self.M_D)
        Linv = np.linalg.inv(L)
        C = Linv @ self.M_N(c) @ Linv.T
        C = 0.5 * (C + np.swapaxes(C, -1, -2))
        return np.linalg.eigvalsh(C)[..., -1]


def _cholesky(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise DomainError("M_D is not positive definite (assembly bug?)") from exc


def assemble_forms(deg1: int, deg2: Optional[int], r: float, c: float,
                   cache: Optional[KernelCache] = None) -> QuadForm:
    # cache is accepted for interface symmetry; FormFamily evaluates kernels in bulk.
    return FormFamily(r, deg1, deg2).form(c)


def max_rayleigh(q: QuadForm) -> Tuple[float, np.ndarray]:
    """Largest ``a^T M_N a / a^T M_D a`` and a maximizing vector.

    Reduces by the Cholesky congruence ``C = L^-1 M_N L^-T`` to a standard
    symmetric eigenproblem.  The returned vector is normalized to
    ``a^T M_D a = 1`` with its largest-magnitude entry positive.
    """
    L = _cholesky(q.M_D)
    Linv = np.linalg.inv(L)
    C = Linv @ q.M_N @ Linv.T
    C = 0.5 * (C + C.T)
    vals, vecs = np.linalg.eigh(C)
    a = np.linalg.solve(L.T, vecs[:, -1])
    a /= np.sqrt(a @ q.M_D @ a)
    val = float(a @ q.M_N @ a)
    if a[np.argmax(np.abs(a))] < 0:
        a = -a
    return val, a


@dataclass
class OptResult:
    mode: Mode
    r: float
    c_star: float
    f1: Poly
    f2: Poly
    h_at_c_star: float
    deg1: int = 0
    deg2: Optional[int] = None
    scanned_roots: List[float] = field(default_factory=list)

    @property
    def bound_kind(self) -> str:
        return "LambdaLower" if self.mode is Mode.PLAIN else "MuUpper"

    @property
    def certified_c(self) -> float:
        return self.c_star


def _g(family: FormFamily, c, mode: Mode) -> np.ndarray:
    return family.max_ratio(c) - target(c, mode)


def threshold_c(r: float, deg1: int, deg2: Optional[int], mode: Mode = Mode.PLAIN,
                c_bracket: Optional[Tuple[float, float]] = None, tol: float = DEFAULT_TOL,
                cache: Optional[KernelCache] = None,
                family: Optional[FormFamily] = None) -> OptResult:
    """Threshold ``c*`` where the optimal polynomials stop certifying.

    Plain mode returns the largest ``c`` in the bracket with ``g > 0`` (a
    lower bound for the large-gap constant); Liouville mode the smallest
    (an upper bound for the small-gap constant).  The bracket is scanned at
    step 0.01 and the relevant sign change refined by bisection to ``tol``.
    ``c_star`` is the endpoint on the certified side, and the reported
    polynomials are the optimal ones there.
    """
    mode = Mode(mode)
    lo, hi = c_bracket or DEFAULT_BRACKETS[mode]
    if not 0 < lo < hi:
        raise DomainError(f"bad c bracket ({lo}, {hi})")
    fam = family or FormFamily(r, deg1, deg2)
    grid = arange_inclusive(lo, hi, SCAN_STEP)
    if grid[-1] < hi:
        grid = np.append(grid, hi)
    g = _g(fam, grid, mode)
    pos = g > 0
    changes = np.flatnonzero(pos[:-1] != pos[1:])
    if changes.size == 0:
        raise BracketError(
            f"no sign change of g on [{lo}, {hi}] at r={r}",
            list(zip(grid.tolist(), g.tolist())),
        )
    if changes.size > 1:
        log.info("r=%g: %d sign changes of g in [%g, %g]", r, changes.size, lo, hi)
    if mode is Mode.PLAIN:
        # last crossing from certified (g>0) to not certified
        down = [i for i in changes if pos[i] and not pos[i + 1]]
        if not down:
            raise BracketError(f"g never turns negative in [{lo}, {hi}] at r={r}",
                               list(zip(grid.tolist(), g.tolist())))
        i = down[-1]
    else:
        up = [i for i in changes if not pos[i] and pos[i + 1]]
        if not up:
            raise BracketError(f"g never turns positive in [{lo}, {hi}] at r={r}",
                               list(zip(grid.tolist(), g.tolist())))
        i = up[0]
    a, b = float(grid[i]), float(grid[i + 1])
    ga = float(g[i])
    while b - a > tol:
        m = 0.5 * (a + b)
        gm = float(_g(fam, [m], mode)[0])
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b = m
    c_star = a if mode is Mode.PLAIN else b
    _, vec = max_rayleigh(fam.form(c_star))
    f1, f2 = split_vector(vec, deg1, deg2)
    h = h_value(f1, f2, r, c_star, mode, cache).h
    roots = [float(0.5 * (grid[j] + grid[j + 1])) for j in changes]
    return OptResult(mode, float(r), c_star, f1, f2, h, deg1, deg2, roots)


def _better(a: OptResult, b: OptResult) -> bool:
    """Is ``a`` strictly better than ``b``?  Ties (1e-6) go to the smaller r."""
    if abs(a.c_star - b.c_star) <= 1e-6:
        return a.r < b.r
    return a.c_star > b.c_star if a.mode is Mode.PLAIN else a.c_star < b.c_star


@dataclass
class ScanResult:
    best: OptResult
    rows: List[OptResult]
    failures: List[Tuple[float, str]]


def scan_r(r_grid: Sequence[float], deg1: int, deg2: Optional[int], mode: Mode = Mode.PLAIN,
           cache: Optional[KernelCache] = None, c_bracket=None, tol: float = DEFAULT_TOL,
           threads: int = 1, refine: Optional[float] = None) -> ScanResult:
    """Run :func:`threshold_c` over a grid of ``r`` and keep the best.

    With ``refine`` set, a second pass at that step is run over the two grid
    cells around the first-pass winner.
    """
    mode = Mode(mode)
    grid = [float(r) for r in r_grid]
    if not grid:
        raise DomainError("empty r grid")
    if any(r < 1 for r in grid):
        raise DomainError("all r must be >= 1")

    def one(r):
        try:
            return threshold_c(r, deg1, deg2, mode, c_bracket, tol, cache)
        except (BracketError, DomainError) as exc:
            return exc

    def run(rs):
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            return list(zip(rs, pool.map(one, rs)))

    results = run(grid)
    if refine and len(grid) > 1:
        ok = [res for _, res in results if isinstance(res, OptResult)]
        if ok:
            best = ok[0]
            for res in ok[1:]:
                if _better(res, best):
                    best = res
            step = min(abs(b - a) for a, b in zip(sorted(grid), sorted(grid)[1:]))
            extra = arange_inclusive(max(1.0, best.r - step), best.r + step, refine)
            seen = {round(r, 9) for r in grid}
            extra = [float(r) for r in extra if round(r, 9) not in seen]
            results += run(extra)
    results.sort(key=lambda t: t[0])
    rows = [res for _, res in results if isinstance(res, OptResult)]
    failures = [(r, str(res)) for r, res in results if not isinstance(res, OptResult)]
    if not rows:
        raise BracketError("threshold search failed at every grid point: "
                           + "; ".join(f"r={r}: {msg}" for r, msg in failures))
    best = rows[0]
    for res in rows[1:]:
        if _better(res, best):
            best = res
    return ScanResult(best, rows, failures)
