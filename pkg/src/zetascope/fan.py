"""Normal fan of a Newton polyhedron and its unimodular refinement.

Cones live in R_+^n and are given by primitive integer generators. The
normal fan has one maximal cone per vertex of the polyhedron. The smooth
refinement is the Klein-polygon (continued fraction) subdivision for
n = 2 and pulling triangulation + stellar subdivision for n >= 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .errors import ConsistencyError, InputError, ResourceLimitError
from .exact import det, dot, integer_nullspace, primitive, rank, solve
from .lattice import SparsePolynomial, monomial_pullback
from .newton import NewtonPolyhedron, ray_order_key, support_min

Ray = tuple[int, ...]


@dataclass(frozen=True)
class Cone:
    generators: tuple[Ray, ...]

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def matrix(self) -> list[list[int]]:
        return [list(a) for a in self.generators]

    def determinant(self) -> int:
        return det(self.generators)

    def coordinates(self, w: Sequence) -> list[Fraction] | None:
        """Coefficients t with w = sum t_i a^i (maximal simplicial cones only)."""
        cols = [[self.generators[i][r] for i in range(self.dim)] for r in range(len(w))]
        return solve(cols, list(w))

    def contains(self, w: Sequence) -> bool:
        t = self.coordinates(w)
        return t is not None and all(x >= 0 for x in t)

    def to_json(self) -> list:
        return [list(a) for a in self.generators]


@dataclass(frozen=True)
class Fan:
    n: int
    rays: tuple[Ray, ...]
    maximal: tuple[tuple[int, ...], ...]  # ray indices, oriented order for smooth fans
    vertices: tuple[tuple[int, ...], ...] = ()  # dual vertex of each maximal cone (normal fans only)

    @property
    def cones(self) -> list[Cone]:
        return [Cone(tuple(self.rays[i] for i in idx)) for idx in self.maximal]

    def is_simplicial(self) -> bool:
        return all(len(idx) == self.n for idx in self.maximal)

    def is_smooth(self) -> bool:
        return self.is_simplicial() and all(abs(c.determinant()) == 1 for c in self.cones)

    def faces(self) -> list[tuple[int, ...]]:
        """All cones of a simplicial fan as sorted ray-index tuples (the zero cone excluded)."""
        out = set()
        for idx in self.maximal:
            for k in range(1, len(idx) + 1):
                out.update(tuple(sorted(s)) for s in combinations(idx, k))
        return sorted(out, key=lambda s: (len(s), s))

    def adjacency(self) -> dict[tuple[int, ...], list[int]]:
        """Each codimension-one cone mapped to the maximal cones it bounds."""
        adj: dict[tuple[int, ...], list[int]] = {}
        for ci, idx in enumerate(self.maximal):
            for s in combinations(sorted(idx), self.n - 1):
                adj.setdefault(s, []).append(ci)
        return adj

    def containing_cones(self, w: Sequence) -> list[int]:
        return [i for i, c in enumerate(self.cones) if c.contains(w)]

    def to_json(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "maximal_cones": [list(c) for c in self.maximal]}


def _require_convenient(N: NewtonPolyhedron) -> None:
    failing = [
        i
        for i in range(N.n)
        if not any(v[i] > 0 and all(v[j] == 0 for j in range(N.n) if j != i) for v in N.vertices)
    ]
    if failing:
        raise InputError(f"polynomial is not convenient: no pure power on axes {failing}")


def normal_fan(N: NewtonPolyhedron) -> Fan:
    _require_convenient(N)
    rays = tuple(fc.normal for fc in N.facets)  # already in ray order
    maximal = []
    for vi in range(len(N.vertices)):
        idx = tuple(i for i, fc in enumerate(N.facets) if vi in fc.vertices)
        maximal.append(idx)
    return Fan(N.n, rays, tuple(maximal), tuple(N.vertices))


# ---------------------------------------------------------------- n = 2


def _klein_chain(a: Ray, b: Ray) -> list[Ray]:
    """Vertices of the boundary of conv(cone(a,b) ∩ Z^2 minus 0) between a and b."""
    d = a[0] * b[1] - a[1] * b[0]
    assert d > 0
    pts = set()
    # lattice points of the triangle conv(0, a, b): x = s a + t b with s, t >= 0, s + t <= 1
    for x in range(0, max(a[0], b[0]) + 1):
        for y in range(0, max(a[1], b[1]) + 1):
            s = Fraction(x * b[1] - y * b[0], d)
            t = Fraction(a[0] * y - a[1] * x, d)
            if s >= 0 and t >= 0 and s + t <= 1 and (x, y) != (0, 0):
                pts.add(primitive((x, y)))
    # angular order from a to b
    order = sorted(pts, key=lambda p: Fraction(p[1], p[0] + p[1]))
    chain: list[Ray] = []
    for p in order:
        # keep the chain convex toward the origin; collinear points are kept as rays
        while len(chain) >= 2:
            o, q = chain[-2], chain[-1]
            cross = (q[0] - o[0]) * (p[1] - q[1]) - (q[1] - o[1]) * (p[0] - q[0])
            if cross > 0:
                chain.pop()
            else:
                break
        chain.append(p)
    return chain


def _smooth_2d(fan: Fan) -> Fan:
    rays = set(fan.rays)
    for idx in fan.maximal:
        a, b = (fan.rays[i] for i in idx)
        if a[0] * b[1] - a[1] * b[0] < 0:
            a, b = b, a
        rays.update(_klein_chain(a, b))
    ordered = sorted(rays, key=ray_order_key)
    maximal = tuple((i, i + 1) for i in range(len(ordered) - 1))
    return Fan(2, tuple(ordered), maximal)


# ---------------------------------------------------------------- n >= 3


def _cone_facets(rays: Sequence[Ray], n: int) -> list[tuple[Ray, ...]]:
    d = rank(rays)
    out = set()
    for sub in combinations(rays, d - 1):
        if d > 1 and rank(sub) != d - 1:
            continue
        normal = next(
            (u for u in integer_nullspace(list(sub), n) if any(dot(u, r) != 0 for r in rays)), None
        )
        if normal is None:
            continue
        vals = [dot(normal, r) for r in rays]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            out.add(tuple(r for r, v in zip(rays, vals) if v == 0))
    return sorted(out)


def _pulling(rays: Sequence[Ray], n: int, order: dict[Ray, int]) -> list[tuple[Ray, ...]]:
    rays = sorted(rays, key=order.__getitem__)
    d = rank(rays)
    if len(rays) == d:
        return [tuple(rays)]
    apex = rays[0]
    out = []
    for facet in _cone_facets(rays, n):
        if apex in facet:
            continue
        for simplex in _pulling(facet, n, order):
            out.append((apex,) + simplex)
    return out


def _parallelepiped_point(gens: Sequence[Ray]) -> Ray | None:
    """Nonzero lattice point of the half-open parallelepiped with least coordinate sum."""
    n = len(gens)
    hi = [sum(g[i] for g in gens) for i in range(n)]
    cols = [[gens[j][i] for j in range(n)] for i in range(n)]
    best = None
    for x in product(*(range(h + 1) for h in hi)):
        if not any(x):
            continue
        key = (sum(x), x)
        if best is not None and key >= best[0]:
            continue
        t = solve(cols, list(x))
        if t is not None and all(0 <= ti < 1 for ti in t):
            best = (key, x)
    return None if best is None else tuple(best[1])


def _smooth_nd(fan: Fan, max_cones: int) -> Fan:
    n = fan.n
    order = {r: i for i, r in enumerate(fan.rays)}
    cones: set[tuple[Ray, ...]] = set()
    for idx in fan.maximal:
        for simplex in _pulling([fan.rays[i] for i in idx], n, order):
            cones.add(tuple(sorted(simplex, key=ray_order_key)))
    while True:
        if len(cones) > max_cones:
            raise ResourceLimitError(f"smooth subdivision exceeded the budget of {max_cones} cones")
        bad = sorted((c for c in cones if abs(det(c)) > 1), key=lambda c: [ray_order_key(r) for r in c])
        if not bad:
            break
        p = _parallelepiped_point(bad[0])
        if p is None:
            raise ConsistencyError("no interior lattice point in a non-unimodular cone")
        p = primitive(p)
        new = set()
        for c in cones:
            t = Cone(c).coordinates(p)
            if t is None or any(x < 0 for x in t):
                new.add(c)
                continue
            for i, ti in enumerate(t):
                if ti > 0:
                    g = list(c)
                    g[i] = p
                    new.add(tuple(sorted(g, key=ray_order_key)))
        cones = new
    rays = sorted({r for c in cones for r in c}, key=ray_order_key)
    index = {r: i for i, r in enumerate(rays)}
    maximal = sorted(tuple(index[r] for r in c) for c in cones)
    return Fan(n, tuple(rays), tuple(maximal))


def _orient(fan: Fan) -> Fan:
    maximal = []
    for idx in fan.maximal:
        idx = tuple(sorted(idx))
        if det([fan.rays[i] for i in idx]) < 0:
            idx = (idx[1], idx[0]) + idx[2:]
        maximal.append(idx)
    return Fan(fan.n, fan.rays, tuple(maximal))


def smooth_subdivision(fan: Fan, max_cones: int = 20000) -> Fan:
    """Unimodular refinement; maximal cones come out oriented to determinant +1."""
    if fan.n == 1:
        out = Fan(1, ((1,),), ((0,),))
    elif fan.n == 2:
        out = _smooth_2d(fan)
    else:
        out = _smooth_nd(fan, max_cones)
    if len(out.maximal) > max_cones:
        raise ResourceLimitError(f"smooth subdivision exceeded the budget of {max_cones} cones")
    return _orient(out)


def dual_vertex(cone: Cone, N: NewtonPolyhedron) -> tuple[int, ...]:
    """The vertex of the polyhedron whose normal cone contains the given cone."""
    w = [sum(g[i] for g in cone.generators) for i in range(N.n)]
    # w is in the interior of the cone; the vertex minimizing <w, .> is unique when
    # the cone refines a normal cone
    vals = [dot(w, v) for v in N.vertices]
    m = min(vals)
    hits = [v for v, x in zip(N.vertices, vals) if x == m]
    if len(hits) != 1:
        raise ConsistencyError(f"cone {cone.generators} does not refine a single normal cone")
    return hits[0]


@dataclass(frozen=True)
class ChartData:
    cone: Cone
    l_vector: tuple[int, ...]
    norm_sums: tuple[int, ...]
    f_sigma: SparsePolynomial
    c0: Fraction
    vertex: tuple[int, ...] = field(default=())

    @property
    def generators(self) -> tuple[Ray, ...]:
        return self.cone.generators


def chart_data(cone: Cone, f: SparsePolynomial, N: NewtonPolyhedron) -> ChartData:
    if cone.dim != f.n:
        raise InputError("chart data needs a maximal cone")
    if cone.determinant() != 1:
        raise InputError(f"cone {cone.generators} is not oriented to determinant +1")
    l_vec = tuple(support_min(a, N) for a in cone.generators)
    pulled = monomial_pullback(f, cone.matrix)
    try:
        f_sigma = pulled.divide_monomial(l_vec)
    except InputError as exc:
        raise ConsistencyError(f"exceptional monomial does not divide the pullback: {exc}") from exc
    c0 = f_sigma.constant_term()
    if c0 == 0:
        raise ConsistencyError(f"f_sigma vanishes at the origin on cone {cone.generators}")
    return ChartData(
        cone=cone,
        l_vector=l_vec,
        norm_sums=tuple(sum(a) for a in cone.generators),
        f_sigma=f_sigma,
        c0=c0,
        vertex=dual_vertex(cone, N),
    )
