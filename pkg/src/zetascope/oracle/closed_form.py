"""Closed-form Laurent data for one-variable and monomial-weight integrals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod

from ..errors import InputError, NotApplicable
from ..lattice import SparsePolynomial

PLUS_ONLY = "G"
ABSOLUTE = "H"


def residue_1d(l, m, r: int, jet: SparsePolynomial, side: str) -> Fraction:
    """Residue of int x_(+/-)^(l lam + m) phi at lam = -(m + r)/l.

    Pairing with delta^(k) is <delta^(k), phi> = (-1)^k phi^(k)(0); phi^(k)(0)/k! is the
    jet coefficient of x^k.
    """
    if r <= 0:
        raise InputError("r must be a positive integer")
    if jet.n != 1:
        raise InputError("residue_1d needs a one-variable jet")
    l = Fraction(l)
    c = jet.coefficient((r - 1,))  # phi^(r-1)(0) / (r-1)!
    if side == "+":
        return c / l
    if side == "-":
        return (-1) ** (r - 1) * c / l
    raise InputError(f"side must be '+' or '-', got {side!r}")


@dataclass(frozen=True)
class MonomialWeightSpec:
    l: tuple[Fraction, ...]
    m: tuple[Fraction, ...]
    side: str = ABSOLUTE

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(Fraction(x) for x in self.l))
        object.__setattr__(self, "m", tuple(Fraction(x) for x in self.m))
        if len(self.l) != len(self.m):
            raise InputError("l and m must have the same length")
        if any(x <= 0 for x in self.l) or any(x < 0 for x in self.m):
            raise InputError("need l_i > 0 and m_i >= 0")
        if self.side not in (PLUS_ONLY, ABSOLUTE):
            raise InputError(f"side must be {PLUS_ONLY!r} or {ABSOLUTE!r}")

    @property
    def n(self) -> int:
        return len(self.l)

    def nu(self, lam) -> tuple[int | None, ...]:
        """nu_i with (m_i + 1 + nu_i)/l_i = lam, or None when i is not in S_j."""
        lam = Fraction(lam)
        out = []
        for l, m in zip(self.l, self.m):
            v = lam * l - m - 1
            out.append(int(v) if v.denominator == 1 and v >= 0 else None)
        return tuple(out)

    def first_pole(self) -> Fraction:
        return min((m + 1) / l for l, m in zip(self.l, self.m))


def monomial_laurent_deepest(spec: MonomialWeightSpec, lam, jet: SparsePolynomial) -> Fraction:
    if jet.n != spec.n:
        raise InputError("jet dimension does not match the weight")
    nu = spec.nu(lam)
    if any(v is None for v in nu):
        raise NotApplicable(f"not every variable has lambda = {lam} on its ladder")
    deriv = jet.coefficient(nu) * prod(factorial(v) for v in nu)  # d^nu phi(0)
    weight = Fraction(1)
    for l, v in zip(spec.l, nu):
        parity = 1 if spec.side == PLUS_ONLY else 1 + (-1) ** v
        weight *= Fraction(parity) / (l * factorial(v))
    return weight * deriv


def monomial_weight_exponents(spec: MonomialWeightSpec, lam: float) -> list[float]:
    return [float(l) * lam + float(m) for l, m in zip(spec.l, spec.m)]

