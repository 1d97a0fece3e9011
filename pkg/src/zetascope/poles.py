"""Candidate poles, their profiles over the smooth fan, and vanishing certificates."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from math import floor
from typing import Iterable, Sequence

from .errors import InputError
from .exact import dot, format_rational
from .fan import Fan
from .newton import NewtonPolyhedron, support_min

MT_I = "ParityMT_i"
MT_II = "ParityMT_ii"
VT_I = "SupportVT_i"
VT_II = "SupportVT_ii"
VT2_I = "SupportVT2_i"
VT2_II = "SupportVT2_ii"


@dataclass(frozen=True)
class SigmaEntry:
    rays: tuple[int, ...]  # sorted indices into Fan.rays
    generators: tuple[tuple[int, ...], ...]
    nu: tuple[int, ...]

    def to_json(self) -> dict:
        return {"generators": [list(a) for a in self.generators], "nu": list(self.nu)}


@dataclass(frozen=True)
class VanishingCertificate:
    j: int
    k: int
    kj: int
    rule: str
    zero: tuple[str, ...]  # which coefficient families vanish for k..kj
    evidence: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {"rule": self.rule, "k": self.k, "kj": self.kj, "zero": list(self.zero), "evidence": self.evidence}


@dataclass(frozen=True)
class CandidatePole:
    index: int
    lam: Fraction
    contributing_rays: tuple[tuple[int, ...], ...]
    sigma: dict[int, tuple[SigmaEntry, ...]] = field(default_factory=dict, compare=False)
    kj: int | None = None

    @property
    def is_integer(self) -> bool:
        return self.lam.denominator == 1

    @property
    def is_odd_integer(self) -> bool:
        return self.is_integer and self.lam.numerator % 2 == 1

    def max_k(self) -> int:
        return max((k for k, cones in self.sigma.items() if cones), default=0)


@dataclass(frozen=True)
class DeltaRegion:
    j: int
    k: int
    polytopes: tuple[tuple[tuple[tuple[int, ...], ...], tuple[int, ...]], ...]  # (generators, nu)
    lattice_points: tuple[tuple[int, ...], ...]


def ray_table(fan: Fan, N: NewtonPolyhedron) -> list[tuple[tuple[int, ...], int, int]]:
    """(ray, l(ray), |ray|) for every ray of the fan."""
    return [(a, support_min(a, N), sum(a)) for a in fan.rays]


def default_depth(fan: Fan, N: NewtonPolyhedron) -> Fraction:
    vals = [Fraction(s + fan.n, l) for _, l, s in ray_table(fan, N) if l > 0]
    return 2 * max(vals)


def _in_ladder(lam: Fraction, l: int, s: int) -> int | None:
    """nu with lam = (s + nu)/l, or None."""
    if l <= 0:
        return None
    nu = lam * l - s
    if nu.denominator != 1 or nu < 0:
        return None
    return int(nu)


def candidate_values(fan: Fan, N: NewtonPolyhedron, depth) -> list[Fraction]:
    """Sorted elements of P up to depth."""
    depth = Fraction(depth)
    if depth <= 0:
        raise InputError("depth must be positive")
    table = ray_table(fan, N)
    values = {Fraction(k) for k in range(1, floor(depth) + 1)}
    for _, l, s in table:
        if l <= 0:
            continue
        nu = 0
        while Fraction(s + nu, l) <= depth:
            values.add(Fraction(s + nu, l))
            nu += 1
    return sorted(values)


def candidate_poles(fan: Fan, N: NewtonPolyhedron, depth) -> list[CandidatePole]:
    table = ray_table(fan, N)
    poles = []
    for j, lam in enumerate(candidate_values(fan, N, depth), start=1):
        rays = tuple(a for a, l, s in table if _in_ladder(lam, l, s) is not None)
        poles.append(pole_profile(CandidatePole(j, lam, rays), fan, N))
    return poles


def pole_profile(pole: CandidatePole, fan: Fan, N: NewtonPolyhedron) -> CandidatePole:
    table = ray_table(fan, N)
    nus = {i: _in_ladder(pole.lam, l, s) for i, (_, l, s) in enumerate(table)}
    sigma: dict[int, list[SigmaEntry]] = {k: [] for k in range(1, fan.n + 1)}
    for face in fan.faces():
        if all(nus[i] is not None for i in face):
            sigma[len(face)].append(
                SigmaEntry(face, tuple(fan.rays[i] for i in face), tuple(nus[i] for i in face))
            )
    frozen = {k: tuple(v) for k, v in sigma.items()}
    top = max((k for k, v in frozen.items() if v), default=0)
    kj = top + 1 if pole.lam.denominator == 1 else top
    return replace(pole, sigma=frozen, kj=kj)


def delta_lattice_points(pole: CandidatePole, k: int) -> DeltaRegion:
    cones = pole.sigma.get(k, ())
    if not cones:
        raise InputError(f"Sigma_{pole.index}^({k}) is empty")
    points = set()
    polys = []
    for entry in cones:
        n = len(entry.generators[0])
        # every generator is strictly positive, so each coordinate is bounded
        hi = [min(nu // a[m] for a, nu in zip(entry.generators, entry.nu)) for m in range(n)]
        for alpha in product(*(range(h + 1) for h in hi)):
            if all(dot(a, alpha) <= nu for a, nu in zip(entry.generators, entry.nu)):
                points.add(alpha)
        polys.append((entry.generators, entry.nu))
    return DeltaRegion(pole.index, k, tuple(polys), tuple(sorted(points)))


def _parity_evidence(cones: Sequence[SigmaEntry]) -> list | None:
    """For each cone an index with odd nu, or None if some cone has all nu even."""
    out = []
    for entry in cones:
        odd = next((i for i, nu in enumerate(entry.nu) if nu % 2), None)
        if odd is None:
            return None
        out.append({"generators": [list(a) for a in entry.generators], "odd_index": odd, "nu": entry.nu[odd]})
    return out


def _support_evidence(pole: CandidatePole, k: int, support: Iterable[tuple[int, ...]]) -> dict | None:
    if k < 1:
        return None
    pts = set(delta_lattice_points(pole, k).lattice_points) if pole.sigma.get(k) else set()
    hit = sorted(pts & set(support))
    if hit:
        return None
    return {"delta_k": k, "delta_points": [list(p) for p in sorted(pts)], "support_hits": []}


def vanishing_certificates(
    pole: CandidatePole, jet_support: Iterable[Sequence[int]] | None = None
) -> list[VanishingCertificate]:
    support = None if jet_support is None else [tuple(a) for a in jet_support]
    lam_int = pole.is_integer
    lam_odd = pole.is_odd_integer
    out = []
    for k in range(1, pole.kj + 1):
        # parity theorem
        if not lam_odd:
            ev = _parity_evidence(pole.sigma.get(k, ()))
            if ev is not None:
                out.append(VanishingCertificate(pole.index, k, pole.kj, MT_I, ("a",), {"cones": ev}))
        elif k >= 2:
            ev = _parity_evidence(pole.sigma.get(k - 1, ()))
            if ev is not None:
                out.append(VanishingCertificate(pole.index, k, pole.kj, MT_II, ("a",), {"cones": ev}))
        if support is None:
            continue
        # support theorems: the signed and oscillatory version split on integrality,
        # the absolute version on odd integrality
        dk = k if not lam_odd else k - 1
        if not lam_odd or k >= 2:
            ev = _support_evidence(pole, dk, support)
            if ev is not None:
                out.append(VanishingCertificate(pole.index, k, pole.kj, VT_I if not lam_odd else VT_II, ("a",), ev))
        dk = k if not lam_int else k - 1
        if not lam_int or k >= 2:
            ev = _support_evidence(pole, dk, support)
            if ev is not None:
                rule = VT2_I if not lam_int else VT2_II
                out.append(VanishingCertificate(pole.index, k, pole.kj, rule, ("a+", "a-", "c"), ev))
    return out


def is_fake(pole: CandidatePole, certificates: Sequence[VanishingCertificate]) -> bool:
    """Every Laurent coefficient a_{j,1..kj} is certified zero."""
    return any(c.k == 1 and "a" in c.zero for c in certificates)


def pole_to_json(pole: CandidatePole) -> dict:
    return {
        "lambda": format_rational(pole.lam),
        "j": pole.index,
        "kj": pole.kj,
        "integer": pole.is_integer,
        "rays": [list(a) for a in pole.contributing_rays],
        "sigma": {str(k): [e.to_json() for e in v] for k, v in sorted(pole.sigma.items()) if v},
    }
