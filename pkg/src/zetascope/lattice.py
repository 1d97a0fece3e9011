"""Exact sparse polynomials and truncated power series over Q.

Everything here is immutable. Floats only appear in
:attr:`AlgebraicScalar.value`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Iterable, Mapping, Sequence

import mpmath
import numpy as np
from sympy import integer_nthroot

from .errors import InputError, PrecisionError
from .exact import format_rational, parse_rational

Exponent = tuple[int, ...]


def _check_exponent(e, n: int) -> Exponent:
    e = tuple(int(x) for x in e)
    if len(e) != n:
        raise InputError(f"exponent {e} has length {len(e)}, expected {n}")
    if any(x < 0 for x in e):
        raise InputError(f"negative exponent {e}")
    return e


def _monomial_str(e: Exponent, names: Sequence[str]) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def _default_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


class SparsePolynomial:
    """Map from exponent vectors to nonzero rational coefficients."""

    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping | Iterable = ()):
        if n < 1:
            raise InputError("dimension must be >= 1")
        acc: dict[Exponent, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = _check_exponent(e, n)
            c = c if isinstance(c, Fraction) else parse_rational(c) if isinstance(c, str) else Fraction(c)
            acc[e] = acc.get(e, Fraction(0)) + c
        self._n = n
        self._terms = {e: c for e, c in sorted(acc.items()) if c != 0}
        self._hash = None

    @classmethod
    def constant(cls, n: int, c=1) -> "SparsePolynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "SparsePolynomial":
        return cls(len(exps), {tuple(exps): c})

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def support(self) -> tuple[Exponent, ...]:
        return tuple(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self._n)

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, SparsePolynomial):
            return self._n == other._n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == SparsePolynomial.constant(self._n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, tuple(self._terms.items())))
        return self._hash

    def _coerce(self, other) -> "SparsePolynomial":
        if isinstance(other, SparsePolynomial):
            if other._n != self._n:
                raise InputError(f"dimension mismatch: {self._n} vs {other._n}")
            return other
        if isinstance(other, (int, Fraction)):
            return SparsePolynomial.constant(self._n, other)
        raise TypeError(f"cannot combine polynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return SparsePolynomial(self._n, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial(self._n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SparsePolynomial(self._n, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return SparsePolynomial(self._n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InputError("negative power of a polynomial")
        out = SparsePolynomial.constant(self._n, 1)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, i: int) -> "SparsePolynomial":
        out = {}
        for e, c in self._terms.items():
            if e[i] > 0:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return SparsePolynomial(self._n, out)

    def partial(self, mu: Sequence[int]) -> "SparsePolynomial":
        p = self
        for i, k in enumerate(mu):
            for _ in range(k):
                p = p.derivative(i)
        return p

    def divide_monomial(self, e: Sequence[int]) -> "SparsePolynomial":
        """Exact division by x^e; raises if some term is not divisible."""
        out = {}
        for a, c in self._terms.items():
            q = tuple(x - y for x, y in zip(a, e))
            if any(x < 0 for x in q):
                raise InputError(f"term {a} not divisible by monomial {tuple(e)}")
            out[q] = c
        return SparsePolynomial(self._n, out)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        if len(point) != self._n:
            raise InputError("wrong number of arguments")
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, k in zip(point, e):
                term *= Fraction(x) ** k
            total += term
        return total

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix (m, n) and float coefficients (m,) for vectorized evaluation."""
        if not self._terms:
            return np.zeros((0, self._n)), np.zeros(0)
        exps = np.array(list(self._terms), dtype=float)
        coefs = np.array([float(c) for c in self._terms.values()])
        return exps, coefs

    def evaluate_array(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points given as an array of shape (n, ...)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[1:])
        for e, c in self._terms.items():
            term = np.full(x.shape[1:], float(c))
            for i, k in enumerate(e):
                if k:
                    term = term * x[i] ** k
            out = out + term
        return out

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = names or _default_names(self._n)
        pieces = []
        for e, c in sorted(self._terms.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0]))):
            mono = _monomial_str(e, names)
            if not mono:
                s = format_rational(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{format_rational(c)}*{mono}"
            pieces.append(s)
        out = pieces[0]
        for s in pieces[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out

    def __repr__(self):
        return f"SparsePolynomial({self.to_string()})"

    def to_json(self) -> list:
        return [{"exps": list(e), "coef": format_rational(c)} for e, c in self._terms.items()]

    @classmethod
    def from_json(cls, n: int, terms: Iterable[Mapping]) -> "SparsePolynomial":
        return cls(n, [(t["exps"], parse_rational(t["coef"])) for t in terms])


def monomial_pullback(p: SparsePolynomial, A: Sequence[Sequence[int]]) -> SparsePolynomial:
    """Substitute x_j -> prod_i y_i^{A[i][j]}: the term x^alpha goes to y^{A alpha}."""
    n = p.n
    if len(A) != n or any(len(row) != n for row in A):
        raise InputError(f"matrix must be {n}x{n}")
    if any(int(a) < 0 for row in A for a in row):
        raise InputError("pullback matrix must have non-negative entries")
    out: dict[Exponent, Fraction] = {}
    for alpha, c in p.items():
        e = tuple(sum(int(A[i][j]) * alpha[j] for j in range(n)) for i in range(n))
        out[e] = out.get(e, Fraction(0)) + c
    return SparsePolynomial(n, out)


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in n variables truncated at total degree ``order``."""

    n: int
    order: int
    terms: Mapping[Exponent, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 0:
            raise InputError("truncation order must be >= 0")
        clean = {}
        for e, c in self.terms.items():
            e = _check_exponent(e, self.n)
            c = Fraction(c)
            if c != 0 and sum(e) <= self.order:
                clean[e] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def one(cls, n: int, order: int) -> "TruncatedSeries":
        return cls(n, order, {(0,) * n: Fraction(1)})

    @classmethod
    def from_polynomial(cls, p: SparsePolynomial, order: int) -> "TruncatedSeries":
        return cls(p.n, order, p.terms)

    def coefficient(self, e: Sequence[int]) -> Fraction:
        e = tuple(e)
        if sum(e) > self.order:
            raise PrecisionError(f"degree {sum(e)} exceeds truncation order {self.order}")
        return self.terms.get(e, Fraction(0))

    def _check(self, other: "TruncatedSeries") -> int:
        if other.n != self.n:
            raise InputError("dimension mismatch")
        return min(self.order, other.order)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        order = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return TruncatedSeries(self.n, order, out)

    def __neg__(self):
        return TruncatedSeries(self.n, self.order, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries(self.n, self.order, {e: c * other for e, c in self.terms.items()})
        order = self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return TruncatedSeries(self.n, order, out)

    __rmul__ = __mul__

    def equals_up_to_order(self, other: "TruncatedSeries") -> bool:
        order = self._check(other)
        a = {e: c for e, c in self.terms.items() if sum(e) <= order}
        b = {e: c for e, c in other.terms.items() if sum(e) <= order}
        return a == b


def binomial_coefficient(s: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= (s - i)
    return out / factorial(k)


def binomial_series_pow(u, s, D: int) -> TruncatedSeries:
    """(1 + u)^s truncated at total degree D, for u with zero constant term."""
    s = Fraction(s)
    if D < 0:
        raise InputError("D must be >= 0")
    if isinstance(u, SparsePolynomial):
        u = TruncatedSeries.from_polynomial(u, D)
    elif u.order < D:
        raise PrecisionError(f"perturbation known only to order {u.order} < {D}")
    else:
        u = TruncatedSeries(u.n, D, u.terms)
    if u.terms.get((0,) * u.n, 0) != 0:
        raise InputError("binomial series needs a perturbation with zero constant term")
    result = TruncatedSeries.one(u.n, D)
    power = TruncatedSeries.one(u.n, D)
    # u has no constant term, so u^k starts in degree k
    for k in range(1, D + 1):
        power = power * u
        if not power.terms:
            break
        result = result + power * binomial_coefficient(s, k)
    return result


def jet_derivative_at_zero(t: TruncatedSeries, mu: Sequence[int]) -> Fraction:
    """Mixed partial derivative at 0 of the function the series represents."""
    mu = tuple(int(m) for m in mu)
    if len(mu) != t.n or any(m < 0 for m in mu):
        raise InputError(f"bad multi-index {mu}")
    c = t.coefficient(mu)
    for m in mu:
        c *= factorial(m)
    return c


def _reduce_power(r: Fraction, b: Fraction, e: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    """Canonical form of r*b^e: exponent in [0,1), exact powers folded into r."""
    if b <= 0:
        raise InputError("AlgebraicScalar bases must be positive")
    if r == 0:
        return Fraction(0), Fraction(1), Fraction(0)
    if b == 1 or e == 0:
        return r, Fraction(1), Fraction(0)
    whole = e.numerator // e.denominator
    r = r * b ** whole
    e = e - whole
    if e == 0:
        return r, Fraction(1), Fraction(0)
    q = e.denominator
    num, ok1 = integer_nthroot(b.numerator, q)
    den, ok2 = integer_nthroot(b.denominator, q)
    if ok1 and ok2:
        return r * Fraction(num, den) ** e.numerator, Fraction(1), Fraction(0)
    return r, b, e


class AlgebraicScalar:
    """Finite sum of r * b^e with rational r, rational b > 0 and rational e."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple] = ()):
        acc: dict[tuple[Fraction, Fraction], Fraction] = {}
        for r, b, e in terms:
            r, b, e = _reduce_power(Fraction(r), Fraction(b), Fraction(e))
            if r == 0:
                continue
            acc[(b, e)] = acc.get((b, e), Fraction(0)) + r
        self.terms: tuple[tuple[Fraction, Fraction, Fraction], ...] = tuple(
            (r, b, e) for (b, e), r in sorted(acc.items()) if r != 0
        )

    @classmethod
    def rational(cls, r) -> "AlgebraicScalar":
        return cls([(r, 1, 0)])

    def is_zero(self) -> bool:
        return not self.terms

    def as_rational(self) -> Fraction | None:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and self.terms[0][1] == 1:
            return self.terms[0][0]
        return None

    def mp_value(self, prec: int = 128):
        with mpmath.workprec(prec):
            total = mpmath.mpf(0)
            for r, b, e in self.terms:
                total += mpmath.mpf(r.numerator) / r.denominator * mpmath.power(
                    mpmath.mpf(b.numerator) / b.denominator, mpmath.mpf(e.numerator) / e.denominator
                )
            return total

    @property
    def value(self) -> float:
        return float(self.mp_value())

    def __float__(self):
        return self.value

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraicScalar.rational(other)
        if not isinstance(other, AlgebraicScalar):
            return NotImplemented
        return AlgebraicScalar(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicScalar((-r, b, e) for r, b, e in self.terms)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraicScalar((r * other, b, e) for r, b, e in self.terms)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraicScalar.rational(other)
        if not isinstance(other, AlgebraicScalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        if not self.terms:
            return "AlgebraicScalar(0)"
        parts = []
        for r, b, e in self.terms:
            if b == 1:
                parts.append(format_rational(r))
            else:
                parts.append(f"{format_rational(r)}*({format_rational(b)})^({format_rational(e)})")
        return "AlgebraicScalar(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        return {
            "terms": [[format_rational(r), format_rational(b), format_rational(e)] for r, b, e in self.terms],
            "float": self.value,
        }


def all_multi_indices(n: int, max_degree: int):
    """Exponent vectors with total degree <= max_degree, in lexicographic order."""
    for e in product(range(max_degree + 1), repeat=n):
        if sum(e) <= max_degree:
            yield e
