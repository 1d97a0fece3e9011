"""Exact coefficients of the deepest candidate pole (order n) and the oscillatory leading term.

All sums run over charts sigma in Sigma_j^(n) and jet exponents alpha; a chart
contributes through |f_sigma|^(-lambda) expanded at its origin, which is
|c0|^(-lambda) (1 + u)^(-lambda) with u = f_sigma/c0 - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, prod
from typing import Sequence

import mpmath

from .errors import InputError, NotApplicable, ResourceLimitError
from .exact import dot, format_rational
from .fan import ChartData
from .lattice import AlgebraicScalar, SparsePolynomial, TruncatedSeries, binomial_series_pow
from .poles import CandidatePole


def chart_nu(cd: ChartData, lam: Fraction) -> tuple[int, ...] | None:
    """nu(sigma) if the maximal cone lies in Sigma_j^(n), else None."""
    out = []
    for l, s in zip(cd.l_vector, cd.norm_sums):
        if l <= 0:
            return None
        nu = lam * l - s
        if nu.denominator != 1 or nu < 0:
            return None
        out.append(int(nu))
    return tuple(out)


def mu(generators: Sequence[Sequence[int]], nu: Sequence[int], alpha: Sequence[int]) -> tuple[int, ...]:
    return tuple(v - dot(a, alpha) for a, v in zip(generators, nu))


def f_sigma_power_jet(cd: ChartData, lam, D: int) -> tuple[TruncatedSeries, AlgebraicScalar]:
    """Taylor data of |f_sigma|^(-lam) to degree D, as (rational series, unit |c0|^(-lam))."""
    lam = Fraction(lam)
    c0 = cd.c0
    u = cd.f_sigma * (1 / c0) - 1
    series = binomial_series_pow(u, -lam, D)
    unit = AlgebraicScalar([(1, abs(c0), -lam)])
    return series, unit


def _require_deepest(pole: CandidatePole, n: int) -> None:
    if pole.kj != n:
        raise NotApplicable(f"k_j = {pole.kj} differs from n = {n}")


MAX_SERIES_DEGREE = 60


def _weighted_sum(
    pole: CandidatePole, charts: Sequence[ChartData], jet: SparsePolynomial, weight, max_degree: int = MAX_SERIES_DEGREE
) -> AlgebraicScalar:
    """Sum over sigma in Sigma_j^(n) and alpha of weight(sigma) / prod(l) * [y^mu] series * c_alpha."""
    lam = pole.lam
    terms = []
    for cd in charts:
        nu = chart_nu(cd, lam)
        if nu is None:
            continue
        w = weight(cd, nu)
        if w == 0:
            continue
        needed = []
        for alpha, c_alpha in jet.items():
            m = mu(cd.generators, nu, alpha)
            if min(m) >= 0:
                needed.append((m, c_alpha))
        if not needed:
            continue
        D = max(sum(m) for m, _ in needed)
        if D > max_degree:
            raise ResourceLimitError(f"series degree {D} exceeds the limit {max_degree}")
        series, _ = f_sigma_power_jet(cd, lam, D)
        scale = Fraction(w, prod(cd.l_vector))
        for m, c_alpha in needed:
            r = scale * series.coefficient(m) * c_alpha
            terms.append((r, abs(cd.c0), -lam))
    return AlgebraicScalar(terms)


def parity_factor(nu: Sequence[int]) -> int:
    return prod(1 + (-1) ** v for v in nu)


def deepest_coefficient_abs(
    pole: CandidatePole, charts: Sequence[ChartData], jet: SparsePolynomial, max_degree: int = MAX_SERIES_DEGREE
) -> AlgebraicScalar:
    _require_deepest(pole, jet.n)
    if pole.is_odd_integer:
        raise NotApplicable(f"lambda_j = {pole.lam} is an odd integer")
    return _weighted_sum(pole, charts, jet, lambda cd, nu: parity_factor(nu), max_degree)


@dataclass(frozen=True)
class SignProfile:
    generators: tuple[tuple[int, ...], ...]
    q_plus: tuple[tuple[int, ...], ...]
    q_minus: tuple[tuple[int, ...], ...]
    c_plus: int
    c_minus: int


def sign_counts(cd: ChartData, nu: Sequence[int]) -> SignProfile:
    n = len(cd.l_vector)
    if n > 20:
        raise InputError("sign enumeration is limited to n <= 20")
    if cd.c0 == 0:
        raise InputError("f_sigma(0) must be nonzero")
    q_plus, q_minus = [], []
    c_plus = c_minus = 0
    for eps in product((1, -1), repeat=n):
        sign = 1 if cd.c0 > 0 else -1
        weight = 1
        for e, l, v in zip(eps, cd.l_vector, nu):
            sign *= e**l
            weight *= e**v
        if sign > 0:
            q_plus.append(eps)
            c_plus += weight
        else:
            q_minus.append(eps)
            c_minus += weight
    return SignProfile(cd.generators, tuple(q_plus), tuple(q_minus), c_plus, c_minus)


def deepest_coefficient_signed(
    pole: CandidatePole, charts: Sequence[ChartData], jet: SparsePolynomial, max_degree: int = MAX_SERIES_DEGREE
) -> tuple[AlgebraicScalar, AlgebraicScalar]:
    """(b+, b-); these are the coefficients a+- of Z^+- whenever lambda_j is not an integer."""
    _require_deepest(pole, jet.n)
    plus = _weighted_sum(pole, charts, jet, lambda cd, nu: sign_counts(cd, nu).c_plus, max_degree)
    minus = _weighted_sum(pole, charts, jet, lambda cd, nu: sign_counts(cd, nu).c_minus, max_degree)
    return plus, minus


@dataclass(frozen=True)
class OscillatoryCoefficient:
    """Gamma(lam)/(n-1)! * (cos(pi lam/2) (b+ + b-) + i sin(pi lam/2) (b+ - b-))."""

    lam: Fraction
    n: int
    even_part: AlgebraicScalar
    odd_part: AlgebraicScalar
    re: float
    im: float

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def to_json(self) -> dict:
        return {
            "gamma_of": format_rational(self.lam),
            "over_factorial": self.n - 1,
            "cos_coefficient": self.even_part.to_json(),
            "sin_coefficient": self.odd_part.to_json(),
            "re": self.re,
            "im": self.im,
        }


def oscillating_leading(pole: CandidatePole, b_plus: AlgebraicScalar, b_minus: AlgebraicScalar, n: int) -> OscillatoryCoefficient:
    _require_deepest(pole, n)
    lam = pole.lam
    even = b_plus + b_minus
    odd = b_plus - b_minus
    with mpmath.workprec(128):
        lam_mp = mpmath.mpf(lam.numerator) / lam.denominator
        pre = mpmath.gamma(lam_mp) / mpmath.factorial(n - 1)
        angle = mpmath.pi * lam_mp / 2
        re = pre * mpmath.cos(angle) * even.mp_value()
        im = pre * mpmath.sin(angle) * odd.mp_value()
    return OscillatoryCoefficient(lam, n, even, odd, float(re), float(im))


@dataclass
class DeepestCoefficients:
    j: int
    applicable: bool
    reason: str | None = None
    a: AlgebraicScalar | None = None
    a_reason: str | None = None
    a_plus: AlgebraicScalar | None = None
    a_minus: AlgebraicScalar | None = None
    signed_reason: str | None = None
    b_plus: AlgebraicScalar | None = None
    b_minus: AlgebraicScalar | None = None
    c_osc: OscillatoryCoefficient | None = None
    caveats: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out: dict = {"applicable": self.applicable}
        if not self.applicable:
            out["reason"] = self.reason
            return out
        out["a"] = self.a.to_json() if self.a is not None else None
        if self.a_reason:
            out["a_reason"] = self.a_reason
        out["a_plus"] = self.a_plus.to_json() if self.a_plus is not None else None
        out["a_minus"] = self.a_minus.to_json() if self.a_minus is not None else None
        if self.signed_reason:
            out["signed_reason"] = self.signed_reason
        out["b_plus"] = self.b_plus.to_json()
        out["b_minus"] = self.b_minus.to_json()
        out["c_osc"] = self.c_osc.to_json()
        if self.caveats:
            out["caveats"] = list(self.caveats)
        return out


def deepest_coefficients(
    pole: CandidatePole, charts: Sequence[ChartData], jet: SparsePolynomial, max_degree: int = MAX_SERIES_DEGREE
) -> DeepestCoefficients:
    n = jet.n
    try:
        _require_deepest(pole, n)
    except NotApplicable as exc:
        return DeepestCoefficients(pole.index, False, exc.reason)
    out = DeepestCoefficients(pole.index, True)
    try:
        out.a = deepest_coefficient_abs(pole, charts, jet, max_degree)
    except NotApplicable as exc:
        out.a_reason = exc.reason
    out.b_plus, out.b_minus = deepest_coefficient_signed(pole, charts, jet, max_degree)
    if pole.is_integer:
        out.signed_reason = f"lambda_j = {pole.lam} is an integer; b+- reported, a+- withheld"
        out.caveats.append("oscillatory coefficient at an integer lambda_j: contributions from {f_sigma = 0} are assumed negligible")
    else:
        out.a_plus, out.a_minus = out.b_plus, out.b_minus
    out.c_osc = oscillating_leading(pole, out.b_plus, out.b_minus, n)
    return out
