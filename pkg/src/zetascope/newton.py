"""Newton polyhedra conv(supp f) + R_+^n with exact integer data.

Facets are found by brute force over candidate hyperplanes: every facet
of the polyhedron is spanned by n-1 independent directions drawn from
differences of support points and coordinate directions (the recession
cone). This is fine at the dimensions we care about (n <= 4).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import InputError
from .exact import dot, integer_nullspace, rank
from .lattice import Exponent, SparsePolynomial


@dataclass(frozen=True)
class Facet:
    normal: tuple[int, ...]
    offset: int
    vertices: tuple[int, ...]  # indices into NewtonPolyhedron.vertices

    @property
    def compact(self) -> bool:
        return all(a > 0 for a in self.normal)


@dataclass(frozen=True)
class Face:
    dim: int
    vertices: tuple[int, ...]
    normals: tuple[tuple[int, ...], ...]  # normals of the facets containing the face

    @property
    def interior_normal(self) -> tuple[int, ...]:
        """Sum of the containing facet normals; strictly positive iff the face is compact."""
        n = len(self.normals[0])
        return tuple(sum(a[i] for a in self.normals) for i in range(n))


@dataclass(frozen=True)
class NewtonPolyhedron:
    n: int
    vertices: tuple[Exponent, ...]
    facets: tuple[Facet, ...]
    compact_faces: tuple[Face, ...]

    def facet_normals(self) -> list[tuple[int, ...]]:
        return [fc.normal for fc in self.facets]

    def vertex_index(self, v: Sequence[int]) -> int:
        return self.vertices.index(tuple(v))

    def face_with_vertices(self, verts: Sequence[Sequence[int]]) -> Face:
        idx = tuple(sorted(self.vertex_index(v) for v in verts))
        for face in self.compact_faces:
            if face.vertices == idx:
                return face
        raise InputError(f"no compact face with vertices {list(verts)}")

    def to_json(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "facets": [{"normal": list(fc.normal), "offset": fc.offset} for fc in self.facets],
            "compact_faces": [
                {"dim": fc.dim, "vertices": [list(self.vertices[i]) for i in fc.vertices]}
                for fc in self.compact_faces
            ],
        }


def ray_order_key(a: Sequence[int]) -> tuple:
    """Deterministic ordering of nonnegative directions; in 2-D this is the angular order from e1 to e2."""
    s = sum(a)
    return tuple(-Fraction(x, s) for x in a)


def _minimal_points(support: Sequence[Exponent]) -> list[Exponent]:
    """Drop points that dominate another support point (they are never vertices)."""
    pts = sorted(set(support))
    keep = []
    for p in pts:
        if not any(q != p and all(qi <= pi for qi, pi in zip(q, p)) for q in pts):
            keep.append(p)
    return keep


def _affine_rank(points: Sequence[Sequence[int]], extra_dirs: Sequence[Sequence[int]] = ()) -> int:
    rows = [tuple(p[i] - points[0][i] for i in range(len(p))) for p in points[1:]]
    rows += [tuple(d) for d in extra_dirs]
    rows = [r for r in rows if any(r)]
    return rank(rows) if rows else 0


def _facets(points: list[Exponent], n: int) -> list[tuple[tuple[int, ...], int]]:
    unit = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    dirs = []
    seen = set()
    for p, q in combinations(points, 2):
        d = tuple(a - b for a, b in zip(p, q))
        if d not in seen:
            seen.add(d)
            dirs.append(d)
    dirs += unit
    found: dict[tuple[int, ...], int] = {}
    for combo in combinations(dirs, n - 1):
        basis = integer_nullspace(list(combo), n)
        if len(basis) != 1:
            continue
        a = basis[0]
        if all(x <= 0 for x in a):
            a = tuple(-x for x in a)
        if any(x < 0 for x in a) or a in found:
            continue
        offset = min(dot(a, p) for p in points)
        tight = [p for p in points if dot(a, p) == offset]
        rec = [e for e, ai in zip(unit, a) if ai == 0]
        if _affine_rank(tight, rec) == n - 1:
            found[a] = offset
    return sorted(found.items(), key=lambda t: ray_order_key(t[0]))


def newton_polyhedron(f: SparsePolynomial) -> NewtonPolyhedron:
    if f.is_zero():
        raise InputError("the zero polynomial has no Newton polyhedron")
    n = f.n
    points = _minimal_points(f.support)
    facet_list = _facets(points, n)
    # a point is a vertex iff the facets through it have full rank
    vertices = []
    for p in points:
        active = [a for a, l in facet_list if dot(a, p) == l]
        if active and rank(active) == n:
            vertices.append(p)
    vertices.sort(reverse=True)
    vidx = {v: i for i, v in enumerate(vertices)}
    facets = tuple(
        Facet(a, l, tuple(sorted(vidx[v] for v in vertices if dot(a, v) == l))) for a, l in facet_list
    )

    # compact faces: closures of intersections of facet vertex sets
    family: set[frozenset[int]] = {frozenset([i]) for i in range(len(vertices))}
    frontier = {frozenset(fc.vertices) for fc in facets if fc.vertices}
    while frontier:
        family |= frontier
        new = set()
        for s, t in combinations(sorted(family, key=sorted), 2):
            u = s & t
            if u and u not in family:
                new.add(u)
        frontier = new
    faces = []
    for vs in family:
        containing = [fc for fc in facets if vs <= set(fc.vertices)]
        if not containing:
            continue
        closure = set(range(len(vertices)))
        for fc in containing:
            closure &= set(fc.vertices)
        if closure != set(vs):
            continue
        normals = tuple(fc.normal for fc in containing)
        if not all(sum(a[i] for a in normals) > 0 for i in range(n)):
            continue
        pts = [vertices[i] for i in sorted(vs)]
        faces.append(Face(_affine_rank(pts), tuple(sorted(vs)), normals))
    faces.sort(key=lambda fc: (fc.dim, fc.vertices))
    return NewtonPolyhedron(n, tuple(vertices), facets, tuple(faces))


def _on_face_predicate(N: NewtonPolyhedron, face: Face):
    return lambda alpha: all(dot(a, alpha) == _offset(N, a) for a in face.normals)


def _offset(N: NewtonPolyhedron, a: Sequence[int]) -> int:
    return min(dot(a, v) for v in N.vertices)


def gamma_part(f: SparsePolynomial, face: Face, N: NewtonPolyhedron | None = None) -> SparsePolynomial:
    """Sub-sum of f supported on the compact face."""
    N = N or newton_polyhedron(f)
    if face not in N.compact_faces:
        raise InputError("face does not belong to this Newton polyhedron")
    on_face = _on_face_predicate(N, face)
    return SparsePolynomial(f.n, {e: c for e, c in f.items() if on_face(e)})


def support_min(a: Sequence[int], N: NewtonPolyhedron) -> int:
    if len(a) != N.n:
        raise InputError(f"vector {tuple(a)} has wrong length")
    if any(x < 0 for x in a):
        raise InputError(f"support_min needs a non-negative vector, got {tuple(a)}")
    return _offset(N, a)


@dataclass(frozen=True)
class ConvenienceCheck:
    ok: bool
    witnesses: tuple[Exponent | None, ...]  # lowest pure power per axis, None if missing
    failing_axes: tuple[int, ...]

    def __bool__(self):
        return self.ok


def is_convenient(f: SparsePolynomial) -> ConvenienceCheck:
    witnesses = []
    for i in range(f.n):
        pure = [e for e in f.support if e[i] > 0 and all(e[j] == 0 for j in range(f.n) if j != i)]
        witnesses.append(min(pure, key=lambda e: e[i]) if pure else None)
    failing = tuple(i for i, w in enumerate(witnesses) if w is None)
    return ConvenienceCheck(not failing, tuple(witnesses), failing)
