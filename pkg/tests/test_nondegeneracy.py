import numpy as np
import pytest

from zetascope.newton import gamma_part, newton_polyhedron
from zetascope.nondegeneracy import DEGENERATE, PROBABLY, PROVEN, check_nondegenerate, torus_residual

from conftest import poly

# (polynomial, degenerate?) for the grid-scan comparison; every degenerate
# example has a critical torus zero on the 1/200 grid
CORPUS = [
    (poly(2, {(2, 0): 1, (0, 2): 1}), False),
    (poly(2, {(2, 0): 1, (0, 2): -1}), False),
    (poly(2, {(3, 0): 1, (0, 2): -1}), False),
    (poly(2, {(4, 0): 1, (2, 2): 1, (0, 6): 1}), False),
    (poly(2, {(2, 0): 1, (0, 4): 1}), False),
    (poly(2, {(3, 0): 1, (0, 3): 1}), False),
    (poly(2, {(5, 0): 1, (2, 2): 1, (0, 5): 1}), False),
    (poly(2, {(2, 0): 1, (1, 1): 3, (0, 2): 1}), False),
    (poly(2, {(4, 0): 1, (0, 4): -1}), False),
    (poly(2, {(4, 0): 1, (2, 2): -1, (0, 4): 1}), False),
    (poly(2, {(3, 0): 1, (1, 1): 1, (0, 3): 1}), False),
    (poly(2, {(2, 0): 1, (1, 1): -2, (0, 2): 2}), False),
    (poly(2, {(6, 0): 1, (3, 2): 1, (0, 4): 1}), False),
    (poly(2, {(2, 0): 1, (0, 3): 1}), False),
    (poly(2, {(2, 0): 1, (1, 1): 2, (0, 2): 1}), True),  # (x + y)^2
    (poly(2, {(2, 0): 1, (1, 1): -4, (0, 2): 4}), True),  # (x - 2y)^2
    (poly(2, {(4, 0): 1, (2, 1): -4, (0, 2): 4}), True),  # (x^2 - 2y)^2
    (poly(2, {(6, 0): 1, (3, 2): -2, (0, 4): 1}), True),  # (x^3 - y^2)^2
    (poly(2, {(3, 0): 1, (2, 1): 1, (1, 2): -1, (0, 3): -1}), True),  # (x + y)^2 (x - y)
    (poly(2, {(4, 0): 1, (3, 1): 4, (2, 2): 5, (1, 3): 4, (0, 4): 4}), True),  # (x + 2y)^2 (x^2 + y^2)
]


def grid_scan_degenerate(f, step=1 / 200, bound=3.0, tol=1e-6):
    g = np.arange(-bound, bound + step / 2, step)
    g = g[np.abs(g) > step / 2]  # torus points only
    X, Y = np.meshgrid(g, g, indexing="ij")
    N = newton_polyhedron(f)
    for face in N.compact_faces:
        if face.dim == 0:
            continue
        fg = gamma_part(f, face, N)
        exps, coefs = fg.as_arrays()
        t = coefs[:, None, None] * X[None] ** exps[:, 0, None, None] * Y[None] ** exps[:, 1, None, None]
        scale = np.abs(t).sum(axis=0)
        euler = np.tensordot(exps.T, t, axes=1)
        res = np.sqrt(t.sum(axis=0) ** 2 + (euler**2).sum(axis=0)) / scale
        if res.min() < tol:
            return True
    return False


@pytest.mark.parametrize("f,degenerate", CORPUS, ids=[p.to_string() for p, _ in CORPUS])
def test_grid_scan_agreement(f, degenerate):
    verdict = check_nondegenerate(f, newton_polyhedron(f))
    assert grid_scan_degenerate(f) == degenerate
    assert (verdict.status == DEGENERATE) == degenerate
    if degenerate:
        fv = next(fv for fv in verdict.faces if fv.status == DEGENERATE)
        fg = gamma_part(f, newton_polyhedron(f).face_with_vertices(fv.vertices), newton_polyhedron(f))
        assert torus_residual(fg, fv.witness) < 1e-9


def test_canonical_examples(w1, cusp):
    assert check_nondegenerate(w1, newton_polyhedron(w1)).status == PROVEN
    assert check_nondegenerate(cusp, newton_polyhedron(cusp)).status == PROVEN
    f = poly(2, {(2, 0): 1, (1, 1): 2, (0, 2): 1})
    v = check_nondegenerate(f, newton_polyhedron(f))
    assert v.status == DEGENERATE
    assert v.witness == (1.0, -1.0)


def test_three_variables():
    sphere = poly(3, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})
    v = check_nondegenerate(sphere, newton_polyhedron(sphere), trials=16)
    assert v.status == PROBABLY  # the 2-face is only searched numerically
    square = poly(3, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1, (1, 1, 0): 2, (1, 0, 1): 2, (0, 1, 1): 2})
    v = check_nondegenerate(square, newton_polyhedron(square))
    assert v.status == DEGENERATE  # (x + y + z)^2; already its edges are squares
    N = newton_polyhedron(square)
    fv = next(fv for fv in v.faces if fv.status == DEGENERATE)
    assert torus_residual(gamma_part(square, N.face_with_vertices(fv.vertices), N), fv.witness) < 1e-9


def test_seeded_search_is_deterministic():
    f = poly(3, {(4, 0, 0): 1, (0, 4, 0): 2, (0, 0, 4): 3, (1, 1, 1): 1})
    N = newton_polyhedron(f)
    a = check_nondegenerate(f, N, trials=12, seed=5)
    b = check_nondegenerate(f, N, trials=12, seed=5)
    assert a == b


def test_degenerate_two_face_found_by_search():
    # edges x^3 + y^3 etc. are fine; the 2-face has a critical zero at (1, 1, 1)
    f = poly(3, {(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1, (1, 1, 1): -3})
    N = newton_polyhedron(f)
    v = check_nondegenerate(f, N)
    assert v.status == DEGENERATE
    fv = next(fv for fv in v.faces if fv.status == DEGENERATE)
    assert fv.dim == 2 and fv.method == "random-search"
    assert torus_residual(f, fv.witness) < 1e-8
