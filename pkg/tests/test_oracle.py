from fractions import Fraction
from math import gamma, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from zetascope.errors import InputError, NotApplicable, QuadratureError
from zetascope.lattice import SparsePolynomial
from zetascope.oracle.closed_form import (
    ABSOLUTE,
    PLUS_ONLY,
    MonomialWeightSpec,
    monomial_laurent_deepest,
    residue_1d,
)
from zetascope.oracle.fitting import (
    DEFAULT_OFFSETS,
    fit_laurent,
    laurent_contour,
    laurent_fit,
    monomial_laurent_fit,
    oscillatory_fit,
)
from zetascope.oracle.plateau import PlateauTestFunction
from zetascope.oracle.quadrature import continuation_unavailable, zeta_quadrature

from conftest import poly

ONE1 = poly(1, {(0,): 1})
X2 = poly(1, {(2,): 1})
X3 = poly(1, {(3,): 1})


def plateau(jet):
    return PlateauTestFunction(jet, Fraction(1, 2), Fraction(1))


# ---------------------------------------------------------------- plateau


def test_plateau_profile():
    phi = plateau(ONE1)
    s = np.linspace(0, 1.5, 301)
    chi = phi.chi(s)
    assert np.all(chi[s <= 0.5] == 1.0) and np.all(chi[s >= 1.0] == 0.0)
    assert np.all(np.diff(chi) <= 0)
    # derivative agrees with a central difference
    h = 1e-6
    mid = np.linspace(0.55, 0.95, 9)
    assert np.allclose(phi.dchi(mid), (phi.chi(mid + h) - phi.chi(mid - h)) / (2 * h), atol=1e-6)


def test_plateau_taylor_support_is_jet_support():
    jet = poly(2, {(0, 0): 1, (2, 1): -3})
    assert plateau(jet).taylor_support == jet.support
    with pytest.raises(InputError):
        PlateauTestFunction(jet, Fraction(1), Fraction(1, 2))


# ---------------------------------------------------------------- closed forms


def test_residue_1d_examples():
    assert residue_1d(2, 0, 1, ONE1, "+") == Fraction(1, 2)
    assert residue_1d(2, 0, 1, ONE1, "+") + residue_1d(2, 0, 1, ONE1, "-") == 1
    assert residue_1d(3, 0, 1, ONE1, "+") == residue_1d(3, 0, 1, ONE1, "-") == Fraction(1, 3)
    assert residue_1d(1, 0, 2, poly(1, {(1,): 1}), "+") == 1
    assert residue_1d(1, 0, 2, poly(1, {(1,): 1}), "-") == -1


@pytest.mark.parametrize("args", [(2, 0, 0, ONE1, "+"), (2, 0, 1, ONE1, "x"), (2, 0, 1, poly(2, {(0, 0): 1}), "+")])
def test_residue_1d_rejects(args):
    with pytest.raises(InputError):
        residue_1d(*args)


def test_monomial_deepest_examples():
    w1_chart = MonomialWeightSpec((6, 4), (5, 3))
    assert monomial_laurent_deepest(w1_chart, 1, poly(2, {(0, 0): 1})) == Fraction(1, 6)
    assert monomial_laurent_deepest(MonomialWeightSpec((2,), (0,)), Fraction(1, 2), ONE1) == 1
    # d^nu phi(0) = 0
    assert monomial_laurent_deepest(w1_chart, 1, poly(2, {(1, 0): 1})) == 0
    # one-sided weight drops the parity factor
    assert monomial_laurent_deepest(MonomialWeightSpec((2,), (0,), PLUS_ONLY), Fraction(1, 2), ONE1) == Fraction(1, 2)
    with pytest.raises(NotApplicable):
        monomial_laurent_deepest(w1_chart, Fraction(1, 2), poly(2, {(0, 0): 1}))
    with pytest.raises(InputError):
        MonomialWeightSpec((0, 1), (0, 0))


@given(
    st.fractions(min_value=Fraction(1, 4), max_value=6, max_denominator=5),
    st.fractions(min_value=0, max_value=4, max_denominator=3),
    st.integers(0, 2),
    st.lists(st.fractions(-3, 3, max_denominator=4), min_size=3, max_size=3),
)
def test_residue_sum_matches_monomial_deepest(l, m, nu, coefs):
    jet = SparsePolynomial(1, {(i,): c for i, c in enumerate(coefs)})
    lam = (m + 1 + nu) / l
    both = residue_1d(l, m, nu + 1, jet, "+") + residue_1d(l, m, nu + 1, jet, "-")
    assert both == monomial_laurent_deepest(MonomialWeightSpec((l,), (m,), ABSOLUTE), lam, jet)
    assert residue_1d(l, m, nu + 1, jet, "+") == monomial_laurent_deepest(MonomialWeightSpec((l,), (m,), PLUS_ONLY), lam, jet)


# ---------------------------------------------------------------- quadrature


def test_quadrature_x2_against_1d_reference():
    phi = plateau(ONE1)
    want = 2 * quad(lambda x: x**2 * float(phi.chi(np.array([x]))[0]), 0, 1, epsabs=1e-13, limit=200)[0]
    got = zeta_quadrature(X2, phi, 1.0)
    assert abs(got.value - want) < 1e-8


def test_quadrature_zero_jet():
    f = poly(2, {(4, 0): 1, (2, 2): 1, (0, 6): 1})
    assert zeta_quadrature(f, plateau(SparsePolynomial(2)), 0.5).value == 0


@pytest.mark.parametrize("lam", [1.0, 2.0])
def test_quadrature_sign_split_x3(lam):
    phi = plateau(poly(1, {(0,): 1, (1,): 2}))
    parts = [zeta_quadrature(X3, phi, lam, mode).value for mode in ("abs", "plus", "minus")]
    assert abs(parts[0] - parts[1] - parts[2]) < 1e-8
    assert parts[1] != pytest.approx(parts[2])  # the odd jet term breaks the symmetry


@settings(max_examples=12)
@given(
    st.dictionaries(st.integers(1, 5), st.fractions(-3, 3, max_denominator=3).filter(bool), min_size=1, max_size=3),
    st.sampled_from([1.0, 2.0]),
)
def test_quadrature_sign_split_random_1d(terms, lam):
    f = SparsePolynomial(1, {(k,): c for k, c in terms.items()})
    phi = plateau(poly(1, {(0,): 1, (1,): -1, (2,): 3}))
    a, p, m = (zeta_quadrature(f, phi, lam, mode).value for mode in ("abs", "plus", "minus"))
    assert abs(a - p - m) < 1e-7


@pytest.mark.parametrize(
    "terms",
    [{(2, 0): 1, (0, 2): -1}, {(3, 0): 1, (0, 2): -1, (1, 1): 2}, {(4, 0): 1, (1, 1): 1, (0, 3): -2}],
)
def test_quadrature_sign_split_2d(terms):
    f = poly(2, terms)
    phi = plateau(poly(2, {(0, 0): 1, (1, 0): 1}))
    for lam in (1.0, 2.0):
        a, p, m = (zeta_quadrature(f, phi, lam, mode, tol=1e-9).value for mode in ("abs", "plus", "minus"))
        assert abs(a - p - m) < 1e-7


# ---------------------------------------------------------------- Laurent fitting


def test_fit_laurent_recovers_synthetic_model():
    t = np.asarray(DEFAULT_OFFSETS)
    z = 2 / t**2 - 3 / t + 0.5 + 0.25 * t - t**3
    fit = fit_laurent(t, z, 2)
    assert fit.coefficients[2] == pytest.approx(2, abs=1e-9)
    assert fit.coefficients[1] == pytest.approx(-3, abs=1e-8)
    with pytest.raises(InputError):
        fit_laurent(t[:5], z[:5], 2)


def test_laurent_fit_x2_residue():
    fit = laurent_fit(X2, plateau(ONE1), Fraction(1, 2), 1)
    assert abs(fit.coefficients[1] - 1) <= 1e-4


def _random_monomial_specs(count, seed=20240611):
    """Weights with (m_i + 1)/l_i = lam for both coordinates, so k_j = n = 2 at the first pole."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        lam = Fraction(int(rng.integers(1, 4)), int(rng.integers(2, 5)))
        ks = rng.integers(1, 4, size=2)
        l = tuple(lam.denominator * int(k) for k in ks)
        m = tuple(lam.numerator * int(k) - 1 for k in ks)
        coefs = {(0, 0): Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4)))}
        for e in [(1, 0), (0, 1), (2, 0), (1, 1)]:
            coefs[e] = Fraction(int(rng.integers(-3, 4)), 2)
        out.append((MonomialWeightSpec(l, m), lam, SparsePolynomial(2, coefs)))
    return out


@pytest.mark.parametrize("spec,lam,jet", _random_monomial_specs(10))
def test_monomial_fit_matches_closed_form(spec, lam, jet):
    assert spec.first_pole() == lam and None not in spec.nu(lam)
    want = float(monomial_laurent_deepest(spec, lam, jet))
    fit = monomial_laurent_fit(spec, plateau(jet), lam, 2, tol=1e-7)
    assert abs(fit.coefficients[2] - want) <= 1e-3 * abs(want)


@pytest.mark.parametrize(
    "f,jet,lam",
    [
        (X2, ONE1, Fraction(1, 2)),
        (poly(2, {(4, 0): 1, (2, 2): 1, (0, 6): 1}), poly(2, {(0, 0): 1}), Fraction(1, 2)),
    ],
    ids=["x2", "w1"],
)
def test_fit_stable_under_halved_offsets(f, jet, lam):
    k = f.n
    full = laurent_fit(f, plateau(jet), lam, k)
    half = laurent_fit(f, plateau(jet), lam, k, offsets=tuple(t / 2 for t in DEFAULT_OFFSETS))
    assert abs(half.coefficients[k] - full.coefficients[k]) < 1e-3 * abs(full.coefficients[k])


def test_contour_reproduces_deep_residue_x2():
    # residue of |x|^(2 lam) (1 + 5 x^2) chi at lam = -3/2 is 5
    jet = poly(1, {(0,): 1, (2,): 5})
    c = laurent_contour(X2, plateau(jet), Fraction(3, 2), 1, radius=0.25)
    assert abs(c.coefficients[1] - 5) < 1e-8 and abs(c.imag[1]) < 1e-8
    assert c.errors[1] < 1e-8


def test_contour_agrees_with_direct_fit_at_first_pole():
    f = poly(2, {(2, 0): 1, (0, 4): 1})
    jet = poly(2, {(0, 0): 1, (0, 2): 1, (1, 1): 3})
    c = laurent_contour(f, plateau(jet), Fraction(3, 4), 1, radius=0.25)
    d = laurent_fit(f, plateau(jet), Fraction(3, 4), 1)
    assert abs(c.coefficients[1] - d.coefficients[1]) < 1e-3 * abs(c.coefficients[1])


def test_contour_rejects_bad_input():
    with pytest.raises(InputError):
        laurent_contour(X2, plateau(ONE1), Fraction(1, 2), 1, radius=0.0)
    with pytest.raises(InputError):
        laurent_contour(X2, plateau(ONE1), Fraction(1, 2), 0, radius=0.1)


def test_continuation_limits():
    assert continuation_unavailable(X2, plateau(ONE1)) is None
    cusp = poly(2, {(3, 0): 1, (0, 2): -1})
    assert "vanishes" in continuation_unavailable(cusp, plateau(poly(2, {(0, 0): 1})))
    w1 = poly(2, {(4, 0): 1, (2, 2): 1, (0, 6): 1})
    assert "quasi-homogeneous" in continuation_unavailable(w1, plateau(poly(2, {(0, 0): 1})))


# ---------------------------------------------------------------- oscillatory


T_GRID = (40, 60, 90, 135, 200, 300, 400)


def test_oscillatory_x3():
    fit = oscillatory_fit(X3, plateau(ONE1), T_GRID, Fraction(1, 3), 1)
    want = gamma(1 / 3) / sqrt(3)
    assert abs(fit.c - want) <= 0.05 * want


def test_oscillatory_x2_modulus():
    fit = oscillatory_fit(X2, plateau(ONE1), T_GRID, Fraction(1, 2), 1)
    assert abs(abs(fit.c) - sqrt(pi)) <= 0.05 * sqrt(pi)
    assert abs(np.angle(fit.c) - pi / 4) < 0.05


def test_oscillatory_zero_jet():
    fit = oscillatory_fit(X3, plateau(SparsePolynomial(1)), T_GRID, Fraction(1, 3), 1)
    assert fit.c == 0


def test_oscillatory_rejects():
    with pytest.raises(InputError):
        oscillatory_fit(X3, plateau(ONE1), (0.5, 2.0), Fraction(1, 3), 1)
    with pytest.raises(QuadratureError):
        oscillatory_fit(poly(2, {(2, 0): 1, (0, 2): 1}), plateau(poly(2, {(0, 0): 1})), T_GRID, 1, 1)
