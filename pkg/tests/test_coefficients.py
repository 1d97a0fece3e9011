import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from zetascope.coefficients import (
    chart_nu,
    deepest_coefficient_abs,
    deepest_coefficient_signed,
    deepest_coefficients,
    f_sigma_power_jet,
    mu,
    oscillating_leading,
    parity_factor,
    sign_counts,
)
from zetascope.errors import NotApplicable
from zetascope.fan import ChartData, Cone, chart_data, normal_fan, smooth_subdivision
from zetascope.lattice import AlgebraicScalar, SparsePolynomial
from zetascope.newton import newton_polyhedron
from zetascope.poles import candidate_poles, default_depth, delta_lattice_points

from conftest import poly
from strategies import convenient_polys, nonzero


def engine(f, depth=None):
    N = newton_polyhedron(f)
    fan = smooth_subdivision(normal_fan(N))
    charts = [chart_data(c, f, N) for c in fan.cones]
    poles = candidate_poles(fan, N, depth or default_depth(fan, N) / 2)
    return poles, charts


def pole_at(f, lam):
    poles, charts = engine(f, Fraction(lam))
    return next(p for p in poles if p.lam == Fraction(lam)), charts


ONE2 = SparsePolynomial.constant(2, 1)
ONE1 = SparsePolynomial.constant(1, 1)


def w1_chart(w1):
    return chart_data(Cone(((2, 1), (1, 1))), w1, newton_polyhedron(w1))


# ---------------------------------------------------------------- building blocks


def test_mu_examples():
    gens = ((2, 1), (1, 1))
    assert mu(gens, (0, 0), (0, 0)) == (0, 0)
    assert mu(gens, (0, 0), (1, 0)) == (-2, -1)
    assert mu(gens, (3, 1), (0, 0)) == (3, 1)


def test_power_jet_w1(w1):
    series, unit = f_sigma_power_jet(w1_chart(w1), Fraction(1, 2), 2)
    assert series.terms == {(0, 0): 1, (0, 2): Fraction(-1, 2), (2, 0): Fraction(-1, 2)}
    assert unit.as_rational() == 1


def test_power_jet_constant_and_geometric():
    cd = ChartData(Cone(((1, 0), (0, 1))), (1, 1), (1, 1), SparsePolynomial.constant(2, 3), Fraction(3))
    series, unit = f_sigma_power_jet(cd, Fraction(1, 2), 4)
    assert series.terms == {(0, 0): 1}
    assert unit == AlgebraicScalar([(1, 3, Fraction(-1, 2))])
    cd = ChartData(Cone(((1, 0), (0, 1))), (1, 1), (1, 1), poly(2, {(0, 0): 1, (1, 0): 1}), Fraction(1))
    series, _ = f_sigma_power_jet(cd, 1, 2)
    assert series.terms == {(0, 0): 1, (1, 0): -1, (2, 0): 1}


def test_sign_counts_examples(w1):
    s = sign_counts(w1_chart(w1), (0, 0))
    assert (len(s.q_plus), s.c_plus, s.c_minus) == (4, 4, 0)
    x3 = poly(1, {(3,): 1})
    N = newton_polyhedron(x3)
    cd = chart_data(Cone(((1,),)), x3, N)
    s = sign_counts(cd, (0,))
    assert s.q_plus == ((1,),) and s.q_minus == ((-1,),) and s.c_plus == s.c_minus == 1


# ---------------------------------------------------------------- exact coefficients


def test_w1_deepest(w1):
    p, charts = pole_at(w1, Fraction(1, 2))
    assert deepest_coefficient_abs(p, charts, ONE2).as_rational() == Fraction(1, 6)
    bp, bm = deepest_coefficient_signed(p, charts, ONE2)
    assert bp.as_rational() == Fraction(1, 6) and bm.is_zero()
    c = oscillating_leading(p, bp, bm, 2)
    want = math.sqrt(math.pi) * cmath.exp(1j * math.pi / 4) / 6
    assert abs(c.value - want) < 1e-15
    assert abs(c.re - 0.2089) < 1e-4 and abs(c.im - 0.2089) < 1e-4


def test_x2_deepest():
    p, charts = pole_at(poly(1, {(2,): 1}), Fraction(1, 2))
    assert deepest_coefficient_abs(p, charts, ONE1).as_rational() == 1


def test_x3_deepest():
    p, charts = pole_at(poly(1, {(3,): 1}), Fraction(1, 3))
    ap, am = deepest_coefficient_signed(p, charts, ONE1)
    assert ap.as_rational() == am.as_rational() == Fraction(1, 3)
    c = oscillating_leading(p, ap, am, 1)
    assert abs(c.value - math.gamma(1 / 3) / math.sqrt(3)) < 1e-14
    assert abs(c.value - 1.5467) < 1e-4


def test_odd_nu_everywhere_gives_zero(x2y4):
    p, charts = pole_at(x2y4, Fraction(3, 2))
    assert deepest_coefficient_abs(p, charts, ONE2).is_zero()


def test_zero_signed_inputs():
    p, charts = pole_at(poly(1, {(3,): 1}), Fraction(1, 3))
    zero = AlgebraicScalar()
    assert oscillating_leading(p, zero, zero, 1).value == 0


def test_jet_outside_delta_gives_zero(w1):
    p, charts = pole_at(w1, Fraction(1, 2))
    far = poly(2, {(5, 5): 1})
    bp, bm = deepest_coefficient_signed(p, charts, far)
    assert bp.is_zero() and bm.is_zero()
    # alpha = (1, 0) has mu = (-2, -1) in the only contributing chart
    assert deepest_coefficient_abs(p, charts, poly(2, {(0, 0): 1, (1, 0): 7})).as_rational() == Fraction(1, 6)


def test_preconditions(w1):
    p, charts = pole_at(w1, Fraction(2, 3))
    with pytest.raises(NotApplicable):
        deepest_coefficient_abs(p, charts, ONE2)
    x2 = poly(1, {(2,): 1})
    p, charts = pole_at(x2, 1)
    assert p.kj == 2
    assert not deepest_coefficients(p, charts, ONE1).applicable


def test_integer_lambda_withholds_signed(w1):
    p, charts = pole_at(w1, Fraction(1, 2))
    out = deepest_coefficients(p, charts, ONE2)
    assert out.a_plus.as_rational() == Fraction(1, 6) and not out.caveats
    circle = poly(2, {(2, 0): 1, (0, 2): 1})
    for lam in (1, 2):
        q, charts = pole_at(circle, lam)
        assert q.kj == 2  # one ray on the ladder, plus one for the integer
        out = deepest_coefficients(q, charts, ONE2)
        assert out.applicable and out.a_plus is None and out.a_minus is None
        assert out.signed_reason and out.caveats
        assert out.b_plus is not None and out.c_osc is not None
        assert (out.a is None) == (lam == 1)  # odd integer: no THA value


# ---------------------------------------------------------------- properties


@given(
    st.lists(st.integers(1, 9), min_size=1, max_size=4),
    st.lists(st.integers(0, 9), min_size=4, max_size=4),
    st.sampled_from([Fraction(1), Fraction(-2), Fraction(3, 5)]),
)
def test_quadrant_identity(ls, nus, c0):
    n = len(ls)
    nu = tuple(nus[:n])
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    cd = ChartData(Cone(ident), tuple(ls), (1,) * n, SparsePolynomial.constant(n, c0), c0)
    s = sign_counts(cd, nu)
    assert s.c_plus + s.c_minus == parity_factor(nu)
    assert len(s.q_plus) + len(s.q_minus) == 2**n


def _deep_poles(f):
    poles, charts = engine(f)
    return [p for p in poles if p.kj == f.n], charts


@settings(max_examples=200)
@given(st.one_of(convenient_polys(1, max_power=9, extra=0), convenient_polys(2, max_power=6, extra=2)))
def test_signed_parts_sum_to_absolute(f):
    poles, charts = _deep_poles(f)
    jet = SparsePolynomial.constant(f.n, 1) + SparsePolynomial.monomial((1,) * f.n, 2)
    for p in poles:
        if p.is_integer:
            continue
        a = deepest_coefficient_abs(p, charts, jet)
        bp, bm = deepest_coefficient_signed(p, charts, jet)
        assert bp + bm == a


jets2 = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), nonzero, max_size=4).map(
    lambda d: SparsePolynomial(2, d)
)


@settings(max_examples=200)
@given(convenient_polys(2, max_power=6, extra=2), jets2, jets2, nonzero)
def test_jet_linearity(f, j1, j2, c):
    poles, charts = _deep_poles(f)
    for p in poles:
        if p.is_odd_integer:
            continue
        lhs = deepest_coefficient_abs(p, charts, j1 * c + j2)
        rhs = deepest_coefficient_abs(p, charts, j1) * c + deepest_coefficient_abs(p, charts, j2)
        assert lhs == rhs


@settings(max_examples=200)
@given(convenient_polys(2, max_power=6, extra=2), jets2, jets2)
def test_support_locality(f, j1, extra):
    poles, charts = _deep_poles(f)
    for p in poles:
        if p.is_odd_integer:
            continue
        # an even integer lambda_j can have k_j = n with Sigma_j^(n) empty; then Delta is empty too
        inside = set(delta_lattice_points(p, 2).lattice_points) if p.sigma[2] else set()
        # change the jet only away from Delta_{j,n}
        outside = SparsePolynomial(2, {e: c for e, c in extra.items() if e not in inside})
        j2 = j1 + outside
        assert deepest_coefficient_abs(p, charts, j1) == deepest_coefficient_abs(p, charts, j2)
        assert deepest_coefficient_signed(p, charts, j1) == deepest_coefficient_signed(p, charts, j2)
