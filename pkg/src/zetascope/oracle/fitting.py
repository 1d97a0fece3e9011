"""Fitting Laurent coefficients and oscillatory asymptotics from sampled integrals."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..errors import InputError, QuadratureError
from ..lattice import SparsePolynomial
from .closed_form import MonomialWeightSpec
from .plateau import PlateauTestFunction
from .quadrature import monomial_weight_quadrature, zeta_value

DEFAULT_OFFSETS = tuple(np.geomspace(0.02, 0.2, 12))


@dataclass
class LaurentFit:
    lam: float
    coefficients: dict[int, float]  # k -> a_k, the coefficient of t^(-k)
    errors: dict[int, float]
    regular: list[float]
    residual: float
    condition: float
    offsets: list[float]
    samples: list[float]
    warnings: list[str] = field(default_factory=list)

    def leading(self) -> float:
        return self.coefficients[max(self.coefficients)]


def fit_laurent(
    offsets: Sequence[float], values: Sequence[float], k_max: int, n_regular: int = 4, lam: float = float("nan")
) -> LaurentFit:
    """Least squares of Z(-lam + t) against sum_k a_k t^-k + sum_i c_i t^i."""
    t = np.asarray(offsets, dtype=float)
    z = np.asarray(values, dtype=float)
    if k_max < 1:
        raise InputError("k_max must be >= 1")
    if len(t) < k_max + n_regular + 1:
        raise InputError("not enough samples for the requested model")
    cols = [t ** (-k) for k in range(k_max, 0, -1)] + [t**i for i in range(n_regular)]
    M = np.column_stack(cols)
    scale = np.abs(M).max(axis=0)
    Ms = M / scale
    coef, *_ = np.linalg.lstsq(Ms, z, rcond=None)
    resid = z - Ms @ coef
    dof = max(len(t) - M.shape[1], 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.pinv(Ms.T @ Ms)
    coef = coef / scale
    err = np.sqrt(np.abs(np.diag(cov))) / scale
    cond = float(np.linalg.cond(Ms))
    notes = []
    if cond > 1e12:
        msg = f"ill-conditioned Laurent fit (condition number {cond:.3g})"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    ks = list(range(k_max, 0, -1))
    return LaurentFit(
        lam=lam,
        coefficients={k: float(c) for k, c in zip(ks, coef[:k_max])},
        errors={k: float(e) for k, e in zip(ks, err[:k_max])},
        regular=[float(c) for c in coef[k_max:]],
        residual=float(np.sqrt(resid @ resid)),
        condition=cond,
        offsets=[float(x) for x in t],
        samples=[float(x) for x in z],
        warnings=notes,
    )


def laurent_fit(
    f: SparsePolynomial,
    phi: PlateauTestFunction,
    lam_j,
    k_max: int,
    offsets: Sequence[float] = DEFAULT_OFFSETS,
    method: str = "direct",
    mode: str = "abs",
    n_regular: int = 4,
    tol: float = 1e-8,
    mapper: Callable = map,
) -> LaurentFit:
    """Sample Z_f(phi) at -lam_j + t and fit the Laurent tail.

    method 'direct' integrates the defining integral and is only valid when
    -lam_j + t lies in its convergence half-plane (first pole); 'euler' uses the
    quasi-homogeneous continuation and works at any depth.
    """
    lam = float(Fraction(lam_j))
    if any(t <= 0 for t in offsets):
        raise InputError("offsets must be positive")
    values = list(mapper(lambda t: zeta_value(f, phi, -lam + t, mode, method, tol).value, offsets))
    return fit_laurent(offsets, values, k_max, n_regular, lam)


def monomial_laurent_fit(
    spec: MonomialWeightSpec,
    phi: PlateauTestFunction,
    lam_j,
    k_max: int,
    offsets: Sequence[float] = DEFAULT_OFFSETS,
    n_regular: int = 4,
    tol: float = 1e-10,
    mapper: Callable = map,
) -> LaurentFit:
    lam = float(Fraction(lam_j))
    values = list(mapper(lambda t: monomial_weight_quadrature(spec, phi, -lam + t, tol=tol, rtol=tol / 10).value, offsets))
    return fit_laurent(offsets, values, k_max, n_regular, lam)


@dataclass
class ContourLaurent:
    lam: float
    radius: float
    points: int
    coefficients: dict[int, float]  # k -> a_k
    imag: dict[int, float]  # imaginary parts, zero up to quadrature error
    errors: dict[int, float]  # change against the half-resolution contour

    def leading(self) -> float:
        return self.coefficients[max(self.coefficients)]


def laurent_contour(
    f: SparsePolynomial,
    phi: PlateauTestFunction,
    lam_j,
    k_max: int,
    radius: float,
    points: int = 64,
    mode: str = "abs",
    tol: float = 1e-10,
    mapper: Callable = map,
) -> ContourLaurent:
    """a_k = (1/2 pi i) closed integral of Z(-lam_j + t) t^(k-1) dt over |t| = radius.

    Uses the continued zeta function at complex arguments; the trapezoid rule on
    the circle converges geometrically as long as no other pole lies within the
    contour. radius must therefore stay below the distance to the nearest other
    candidate pole.
    """
    if k_max < 1:
        raise InputError("k_max must be >= 1")
    if radius <= 0 or points < 8 or points % 2:
        raise InputError("need radius > 0 and an even number of points >= 8")
    lam = float(Fraction(lam_j))
    t = radius * np.exp(2j * np.pi * np.arange(points) / points)
    z = np.array(list(mapper(lambda s: complex(zeta_value(f, phi, -lam + s, mode, "euler", tol).value), t)))

    def coeffs(tt, zz):
        return {k: complex(np.mean(zz * tt**k)) for k in range(1, k_max + 1)}

    full = coeffs(t, z)
    half = coeffs(t[::2], z[::2])
    return ContourLaurent(
        lam=lam,
        radius=float(radius),
        points=points,
        coefficients={k: v.real for k, v in full.items()},
        imag={k: v.imag for k, v in full.items()},
        errors={k: abs(full[k] - half[k]) for k in full},
    )


# ---------------------------------------------------------------- oscillatory integrals


def _gl_panels(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + 0.5 * h[:, None] * x[None, :]).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes, weights


def oscillatory_integral(
    f: SparsePolynomial, phi: PlateauTestFunction, t: float, order: int = 16, tol: float = 1e-10, max_doublings: int = 6
) -> complex:
    """I(t) = int exp(i t f) phi dx by composite Gauss-Legendre, refined until stable (n = 1)."""
    if f.n != 1:
        raise QuadratureError("oscillatory quadrature is implemented for n = 1")
    R = float(phi.r_outer)
    grid = np.linspace(-R, R, 2001)
    slope = np.abs(f.derivative(0).evaluate_array(grid[None, :])).max()
    panels = int(np.ceil(t * slope * 2 * R / 4)) + 64
    prev = None
    for _ in range(max_doublings + 1):
        x, w = _gl_panels(-R, R, panels, order)
        pts = x[None, :]
        val = complex((np.exp(1j * t * f.evaluate_array(pts)) * phi(pts) * w).sum())
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        panels *= 2
    raise QuadratureError(f"oscillatory integral at t = {t} did not stabilise", abs(val - prev))


@dataclass
class OscillatoryFit:
    c: complex
    d: complex
    residual: float
    t_grid: list[float]


def oscillatory_fit(
    f: SparsePolynomial,
    phi: PlateauTestFunction,
    t_grid: Sequence[float],
    lam_j,
    k_j: int,
    integral: Callable[[float], complex] | None = None,
    mapper: Callable = map,
) -> OscillatoryFit:
    """Fit I(t) ~ c t^(-lam) (log t)^(k-1) (1 + d / log t) by linear least squares in (c, c d)."""
    lam = float(Fraction(lam_j))
    ts = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(ts) <= 0) or ts[0] <= 1:
        raise InputError("t_grid must be increasing and > 1")
    integral = integral or (lambda t: oscillatory_integral(f, phi, t))
    vals = np.array(list(mapper(integral, ts)))
    L = np.log(ts)
    y = vals * ts**lam
    M = np.column_stack([L ** (k_j - 1), L ** (k_j - 2)]).astype(complex)
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    c, cd = coef
    resid = float(np.linalg.norm(y - M @ coef))
    return OscillatoryFit(complex(c), complex(cd / c) if c != 0 else 0j, resid, [float(t) for t in ts])
