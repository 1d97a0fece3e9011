"""Numerical evaluation of Z_f(phi)(lam) = int |f|^lam phi dx and its signed parts.

Direct quadrature works in logarithmic coordinates x_i = eps_i exp(-u_i) on each
sign orthant, so the singularity at the origin turns into slow decay as u -> oo,
which scipy's adaptive cubature handles through its infinite-range transform.
log|f| is assembled as a log-sum-exp of the monomials to avoid underflow.

Beyond the first pole the integral diverges; for quasi-homogeneous f we continue
it with the Euler field E = sum w_i x_i d_i (E f = f):
    Z(p chi)(lam) = -Z(p E chi)(lam) / (lam + |w| + k)
for p of weighted degree k. E chi lives on the annulus r_inner <= |x| <= r_outer,
away from the singular point, so the right-hand side is entire in lam when f has
no zeros there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import log

import numpy as np
from scipy.integrate import cubature

from ..errors import InputError, QuadratureError
from ..exact import rref
from ..lattice import SparsePolynomial
from .closed_form import PLUS_ONLY, MonomialWeightSpec
from .plateau import PlateauTestFunction

MODES = ("abs", "plus", "minus")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float


def _even_axes(*polys: SparsePolynomial) -> list[bool]:
    n = polys[0].n
    return [all(e[i] % 2 == 0 for p in polys for e in p.support) for i in range(n)]


def _mode_mask(sign: np.ndarray, mode: str) -> np.ndarray:
    if mode == "abs":
        return np.ones_like(sign, dtype=bool)
    if mode == "plus":
        return sign > 0
    if mode == "minus":
        return sign < 0
    raise InputError(f"mode must be one of {MODES}")


def _orthants(even: list[bool]):
    """Sign patterns to integrate over, with multiplicities from reflection symmetry."""
    choices = [(1.0,) if ev else (1.0, -1.0) for ev in even]
    mult = float(2 ** sum(even))
    return [(np.array(eps), mult) for eps in product(*choices)]


def _run(integrand, n: int, lower: float, args, tol: float, rtol: float, max_subdivisions: int) -> QuadratureResult:
    res = cubature(
        integrand,
        [lower] * n,
        [np.inf] * n,
        args=args,
        rtol=rtol,
        atol=tol,
        max_subdivisions=max_subdivisions,
    )
    if res.status != "converged":
        raise QuadratureError(
            f"adaptive cubature did not converge (error estimate {float(res.error):.3g})", float(res.error)
        )
    return QuadratureResult(float(res.estimate), float(res.error))


def zeta_quadrature(
    f: SparsePolynomial,
    phi: PlateauTestFunction,
    lam: float,
    mode: str = "abs",
    tol: float = 1e-8,
    rtol: float = 1e-10,
    max_subdivisions: int = 200000,
) -> QuadratureResult:
    """Direct quadrature; only meaningful where the integral converges."""
    if f.n != phi.n:
        raise InputError("f and phi live in different dimensions")
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}")
    if phi.jet.is_zero():
        return QuadratureResult(0.0, 0.0)
    n = f.n
    fe, fc = f.as_arrays()
    je, jc = phi.jet.as_arrays()
    lower = -log(float(phi.r_outer))
    orthants = _orthants(_even_axes(f, phi.jet))
    total = QuadratureResult(0.0, 0.0)
    for eps, mult in orthants:
        f_sign = np.prod(np.where(fe % 2 == 1, eps[None, :], 1.0), axis=1) * fc
        j_sign = np.prod(np.where(je % 2 == 1, eps[None, :], 1.0), axis=1) * jc

        def integrand(u, lam, f_sign=f_sign, j_sign=j_sign, eps=eps):
            logs = -(u @ fe.T)
            m = logs.max(axis=1)
            s = (f_sign[None, :] * np.exp(logs - m[:, None])).sum(axis=1)
            mask = _mode_mask(np.sign(s), mode) & (s != 0)
            with np.errstate(divide="ignore"):
                logf = m + np.log(np.abs(s))
            x = eps[None, :] * np.exp(-u)
            jet = (j_sign[None, :] * np.exp(-(u @ je.T))).sum(axis=1)
            r = np.sqrt((x**2).sum(axis=1))
            out = np.zeros(len(u))
            w = np.exp(lam * logf[mask] - u[mask].sum(axis=1))
            out[mask] = w * jet[mask] * phi.chi(r[mask])
            return out

        res = _run(integrand, n, lower, (float(lam),), tol / len(orthants), rtol, max_subdivisions)
        total = QuadratureResult(total.value + mult * res.value, total.error + mult * res.error)
    return total


def monomial_weight_quadrature(
    spec: MonomialWeightSpec,
    phi: PlateauTestFunction,
    lam: float,
    tol: float = 1e-10,
    rtol: float = 1e-11,
    max_subdivisions: int = 200000,
) -> QuadratureResult:
    """int prod |x_i|^(l_i lam + m_i) phi dx (or over the positive orthant only)."""
    if spec.n != phi.n:
        raise InputError("weight and phi live in different dimensions")
    n = spec.n
    expo = np.array([float(l) * lam + float(m) for l, m in zip(spec.l, spec.m)])
    je, jc = phi.jet.as_arrays()
    lower = -log(float(phi.r_outer))
    if spec.side == PLUS_ONLY:
        orthants = [(np.ones(n), 1.0)]
    else:
        orthants = _orthants(_even_axes(phi.jet))
    total = QuadratureResult(0.0, 0.0)
    for eps, mult in orthants:
        j_sign = np.prod(np.where(je % 2 == 1, eps[None, :], 1.0), axis=1) * jc

        def integrand(u, j_sign=j_sign, eps=eps):
            x = eps[None, :] * np.exp(-u)
            r = np.sqrt((x**2).sum(axis=1))
            jet = (j_sign[None, :] * np.exp(-(u @ je.T))).sum(axis=1)
            return np.exp(-(u @ (expo + 1.0))) * jet * phi.chi(r)

        res = _run(integrand, n, lower, (), tol / len(orthants), rtol, max_subdivisions)
        total = QuadratureResult(total.value + mult * res.value, total.error + mult * res.error)
    return total


# ---------------------------------------------------------------- continuation


def quasi_homogeneous_weights(f: SparsePolynomial) -> tuple[Fraction, ...] | None:
    """Positive weights w with <w, alpha> = 1 on the whole support, if they exist uniquely."""
    n = f.n
    rows = [list(e) + [1] for e in f.support]
    m, pivots = rref(rows)
    if n in pivots or pivots != list(range(n)):
        return None
    w = tuple(m[i][n] for i in range(n))
    if any(x <= 0 for x in w):
        return None
    return w


def _gauss_legendre(a: float, b: float, k: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _annulus_integral(f, phi, weights, part: SparsePolynomial, lam: float, mode: str, nr: int, nt: int) -> float:
    """int over r_in <= |x| <= r_out of |f|^lam * part * E chi, on a tensor grid."""
    n = f.n
    lo, hi = float(phi.r_inner), float(phi.r_outer)
    w = np.array([float(x) for x in weights])
    r, wr = _gauss_legendre(lo, hi, nr)
    if n == 1:
        x = np.concatenate([r, -r])[None, :]
        wts = np.concatenate([wr, wr])
        rad = np.abs(x[0])
    elif n == 2:
        th = np.arange(nt) * (2 * np.pi / nt)
        R, T = np.meshgrid(r, th, indexing="ij")
        x = np.stack([R * np.cos(T), R * np.sin(T)])
        wts = (wr[:, None] * R * (2 * np.pi / nt)).ravel()
        x = x.reshape(2, -1)
        rad = np.sqrt((x**2).sum(axis=0))
    else:
        raise QuadratureError("Euler continuation is implemented for n <= 2 only")
    fv = f.evaluate_array(x)
    if np.any(fv == 0):
        raise QuadratureError("f vanishes on a quadrature node of the annulus")
    mask = _mode_mask(np.sign(fv), mode)
    e_chi = phi.dchi(rad) * (w[:, None] * x**2).sum(axis=0) / rad
    vals = np.zeros(fv.shape, dtype=complex if np.iscomplexobj(lam) else float)
    vals[mask] = np.exp(lam * np.log(np.abs(fv[mask]))) * part.evaluate_array(x[:, mask]) * e_chi[mask]
    total = (vals * wts).sum()
    return complex(total) if np.iscomplexobj(total) else float(total)


def zeta_continued(
    f: SparsePolynomial,
    phi: PlateauTestFunction,
    lam: float,
    mode: str = "abs",
    tol: float = 1e-10,
    nr: int = 64,
    nt: int = 256,
    max_refinements: int = 4,
) -> QuadratureResult:
    """Z_f(phi)(lam) via the Euler-field identity (quasi-homogeneous f).

    lam may be complex; the value is then complex as well.
    """
    reason = continuation_unavailable(f, phi)
    if reason:
        raise QuadratureError(reason)
    weights = quasi_homogeneous_weights(f)
    wsum = sum(weights)
    parts: dict[Fraction, dict] = {}
    for e, c in phi.jet.items():
        k = sum(wi * ei for wi, ei in zip(weights, e))
        parts.setdefault(k, {})[e] = c
    prev = None
    for _ in range(max_refinements + 1):
        total = 0.0
        for k, terms in sorted(parts.items()):
            denom = lam + float(wsum + k)
            if denom == 0:
                raise QuadratureError(f"lam = {lam} sits on a pole of the continuation")
            part = SparsePolynomial(f.n, terms)
            total -= _annulus_integral(f, phi, weights, part, lam, mode, nr, nt) / denom
        if prev is not None and abs(total - prev) <= tol + 1e-13 * abs(total):
            return QuadratureResult(total, abs(total - prev))
        prev = total
        nr, nt = 2 * nr, 2 * nt
    raise QuadratureError("annulus quadrature did not stabilise", abs(total - prev))


def continuation_unavailable(f: SparsePolynomial, phi: PlateauTestFunction) -> str | None:
    """Why zeta_continued cannot handle (f, phi), or None if it can."""
    if f.n > 2:
        return "Euler continuation is implemented for n <= 2 only"
    if quasi_homogeneous_weights(f) is None:
        return "continuation needs a quasi-homogeneous f"
    if f.n == 2 and _changes_sign_on_annulus(f, phi):
        return "f vanishes on the annulus; tensor quadrature would be unreliable"
    return None


def _changes_sign_on_annulus(f: SparsePolynomial, phi: PlateauTestFunction, k: int = 720) -> bool:
    th = np.linspace(0, 2 * np.pi, k, endpoint=False)
    rs = np.linspace(float(phi.r_inner), float(phi.r_outer), 9)
    R, T = np.meshgrid(rs, th)
    v = f.evaluate_array(np.stack([R * np.cos(T), R * np.sin(T)]))
    return bool(v.min() <= 0 <= v.max())


def zeta_value(
    f: SparsePolynomial, phi: PlateauTestFunction, lam: float, mode: str = "abs", method: str = "direct", tol: float = 1e-8
) -> QuadratureResult:
    if method == "direct":
        return zeta_quadrature(f, phi, lam, mode, tol=tol)
    if method == "euler":
        return zeta_continued(f, phi, lam, mode, tol=tol)
    raise InputError(f"unknown method {method!r}")
