"""Published parameter choices and constants used as regression targets."""

from __future__ import annotations

from dataclasses import dataclass

from .functionals import Mode, Poly


@dataclass(frozen=True)
class Witness:
    name: str
    mode: Mode
    r: float
    c: float
    f1: Poly
    f2: Poly

    def matches(self, mode, r, c, f1: Poly, f2: Poly) -> bool:
        return (Mode(mode) is self.mode and r == self.r and c == self.c
                and f1.coeffs == self.f1.coeffs and f2.coeffs == self.f2.coeffs)


# Large gaps: h(2.7327) < 1.
LAMBDA_WITNESS = Witness(
    "lambda", Mode.PLAIN, 2.6, 2.7327,
    Poly((-3.54, -42.94, 88.05, -34.33)),
    Poly((4.56, 63.02, 42.72, 34.45)),
)

# Small gaps, Liouville-twisted coefficients: h(0.5154) > 1.
MU_WITNESS = Witness(
    "mu", Mode.LIOUVILLE, 1.18, 0.5154,
    Poly((1.25, 0.95, 2.07, -2.21)),
    Poly((0.7, 1.92)),
)

WITNESSES = {Mode.PLAIN: LAMBDA_WITNESS, Mode.LIOUVILLE: MU_WITNESS}

# (lambda lower bound, mu upper bound) from earlier coefficient choices.
MONTGOMERY_ODLYZKO = (1.9799, 0.5179)
CONREY_GHOSH_GONEK = (2.337, 0.5172)   # d_r(k) alone, r = 2.2 / 1.1
BUI_MILINOVICH_NG = (2.69, 0.5155)     # d_r(k) f(log k / log K)
THEOREM = (2.7327, 0.5154)
