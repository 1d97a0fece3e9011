"""Real Newton non-degeneracy: no compact-face part f_gamma has a critical zero on (R*)^n.

Vertices are trivially fine. Edges reduce to a univariate question in any
dimension: on an edge from v0 with primitive direction e, f_gamma = x^v0 g(x^e),
and a torus point is a critical zero iff z = x^e is a nonzero real root of both
g and g'. Faces of dimension >= 2 (only when n >= 3) are searched numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import numpy as np
import sympy
from scipy.optimize import minimize

from .lattice import SparsePolynomial
from .newton import Face, NewtonPolyhedron, gamma_part

PROVEN = "proven"
PROBABLY = "probably_nondegenerate"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class FaceVerdict:
    vertices: tuple[tuple[int, ...], ...]
    dim: int
    status: str
    method: str
    witness: tuple[float, ...] | None = None
    residual: float | None = None


@dataclass(frozen=True)
class NondegeneracyVerdict:
    status: str
    trials: int
    faces: tuple[FaceVerdict, ...] = field(default_factory=tuple)

    @property
    def witness(self) -> tuple[float, ...] | None:
        for fv in self.faces:
            if fv.status == DEGENERATE:
                return fv.witness
        return None

    def to_json(self) -> dict:
        out = {"status": self.status, "faces": []}
        if self.status == PROBABLY:
            out["trials"] = self.trials
        for fv in self.faces:
            d = {"vertices": [list(v) for v in fv.vertices], "dim": fv.dim, "status": fv.status, "method": fv.method}
            if fv.witness is not None:
                d["witness"] = list(fv.witness)
            out["faces"].append(d)
        return out


def _real_root_of_power(z: float, k: int) -> float:
    # k odd (possibly negative): the unique real k-th root
    r = abs(z) ** (1.0 / abs(k))
    r = r if z > 0 else -r
    return r if k > 0 else 1.0 / r


def _edge_verdict(fg: SparsePolynomial, verts: Sequence[tuple[int, ...]]) -> FaceVerdict:
    v0, v1 = verts[0], verts[-1]
    diff = [b - a for a, b in zip(v0, v1)]
    g = 0
    for x in diff:
        g = gcd(g, x)
    e = [x // g for x in diff]
    coeffs = [fg.coefficient(tuple(a + k * d for a, d in zip(v0, e))) for k in range(g + 1)]
    z = sympy.Symbol("z")
    poly = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in coeffs])), z, domain="QQ")
    common = sympy.gcd(poly, poly.diff(z))
    roots = [r for r in common.real_roots() if r != 0] if common.degree() > 0 else []
    if not roots:
        return FaceVerdict(tuple(verts), 1, PROVEN, "edge-univariate")
    root = float(roots[0])
    # choose a torus point with x^e = root: put the root on one coordinate with odd exponent
    odd = max(i for i, d in enumerate(e) if d % 2)
    x = [1.0] * len(e)
    x[odd] = _real_root_of_power(root, e[odd])
    return FaceVerdict(tuple(verts), 1, DEGENERATE, "edge-univariate", tuple(x), 0.0)


def _normalized_residual(fg: SparsePolynomial):
    exps, coefs = fg.as_arrays()

    def objective(u: np.ndarray, signs: np.ndarray) -> float:
        # x_i = s_i exp(u_i); terms t_a = c_a x^a
        logs = exps @ u
        m = logs.max()
        sign = np.prod(np.where(exps % 2 == 1, signs[None, :], 1.0), axis=1)
        t = coefs * sign * np.exp(logs - m)
        scale = np.abs(t).sum()
        val = t.sum()
        euler = exps.T @ t  # x_i d_i f
        return float((val**2 + (euler**2).sum()) / scale**2)

    return objective


def _face_search(fg: SparsePolynomial, face: Face, verts, trials: int, rng: np.random.Generator, tol: float):
    objective = _normalized_residual(fg)
    n = fg.n
    best = (np.inf, None)
    for _ in range(trials):
        signs = rng.choice([-1.0, 1.0], size=n)
        u0 = rng.normal(size=n)
        res = minimize(objective, u0, args=(signs,), method="BFGS", options={"gtol": 1e-14})
        if res.fun < best[0]:
            best = (float(res.fun), tuple(float(s * np.exp(u)) for s, u in zip(signs, res.x)))
        if best[0] < tol**2:
            return FaceVerdict(tuple(verts), face.dim, DEGENERATE, "random-search", best[1], best[0] ** 0.5)
    return FaceVerdict(tuple(verts), face.dim, PROBABLY, "random-search", None, best[0] ** 0.5)


def check_nondegenerate(
    f: SparsePolynomial, N: NewtonPolyhedron, trials: int = 64, seed: int = 0, tol: float = 1e-9
) -> NondegeneracyVerdict:
    rng = np.random.default_rng(seed)
    faces = []
    for face in N.compact_faces:
        verts = tuple(N.vertices[i] for i in face.vertices)
        if face.dim == 0:
            faces.append(FaceVerdict(verts, 0, PROVEN, "vertex"))
            continue
        fg = gamma_part(f, face, N)
        if face.dim == 1:
            faces.append(_edge_verdict(fg, verts))
        else:
            faces.append(_face_search(fg, face, verts, trials, rng, tol))
    statuses = {fv.status for fv in faces}
    if DEGENERATE in statuses:
        status = DEGENERATE
    elif PROBABLY in statuses:
        status = PROBABLY
    else:
        status = PROVEN
    return NondegeneracyVerdict(status, trials, tuple(faces))


def torus_residual(fg: SparsePolynomial, x: Sequence[float]) -> float:
    """Scale-free size of (f_gamma, x_i d_i f_gamma) at a torus point; zero at critical zeros."""
    exps, coefs = fg.as_arrays()
    x = np.asarray(x, dtype=float)
    t = coefs * np.prod(x[None, :] ** exps, axis=1)
    scale = np.abs(t).sum()
    return float(np.sqrt(t.sum() ** 2 + ((exps.T @ t) ** 2).sum()) / scale)
