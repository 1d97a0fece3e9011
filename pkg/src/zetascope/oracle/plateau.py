"""Test functions phi(x) = jet(x) * chi(|x|) with a smooth radial plateau."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import InputError
from ..lattice import SparsePolynomial


def _h(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m])
    return out


def _dh(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m]) / t[m] ** 2
    return out


@dataclass(frozen=True)
class PlateauTestFunction:
    jet: SparsePolynomial
    r_inner: Fraction = Fraction(1, 2)
    r_outer: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "r_inner", Fraction(self.r_inner))
        object.__setattr__(self, "r_outer", Fraction(self.r_outer))
        if not 0 < self.r_inner < self.r_outer:
            raise InputError("need 0 < r_inner < r_outer")

    @property
    def n(self) -> int:
        return self.jet.n

    @property
    def taylor_support(self) -> tuple[tuple[int, ...], ...]:
        # chi is identically 1 near the origin, so the Taylor series is the jet itself
        return self.jet.support

    def chi(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        lo, hi = float(self.r_inner), float(self.r_outer)
        tau = np.clip((s - lo) / (hi - lo), -1.0, 2.0)
        a, b = _h(1.0 - tau), _h(tau)
        return a / (a + b)

    def dchi(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        lo, hi = float(self.r_inner), float(self.r_outer)
        tau = np.clip((s - lo) / (hi - lo), -1.0, 2.0)
        a, b = _h(1.0 - tau), _h(tau)
        da, db = -_dh(1.0 - tau), _dh(tau)
        return (da * b - a * db) / (a + b) ** 2 / (hi - lo)

    def __call__(self, x) -> np.ndarray:
        """phi at points given as an array of shape (n, ...)."""
        x = np.asarray(x, dtype=float)
        r = np.sqrt((x**2).sum(axis=0))
        return self.jet.evaluate_array(x) * self.chi(r)
