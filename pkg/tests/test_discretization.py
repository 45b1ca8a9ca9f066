"""Discretization oracles: polynomial exactness, eigenvalues, and the
elliptic projection.

Collocation differentiation is exact on polynomials up to the node count and
the three-point stencil is exact on cubics; both facts give sharp, tolerance-
free oracles for the assembled interior/boundary operator split.
"""

import numpy as np
import pytest

import strangsplit as ss
from strangsplit.discretization import (apply_operator, chebyshev_matrix,
                                        elliptic_project, fd_eigenvalues)


def test_chebyshev_nodes_ascend_unit_interval():
    x, D = chebyshev_matrix(8)
    assert x[0] == 0.0 and x[-1] == 1.0
    assert np.all(np.diff(x) > 0)
    assert D.shape == (9, 9)


def test_chebyshev_differentiates_polynomials_exactly():
    x, D = chebyshev_matrix(10)
    np.testing.assert_allclose(D @ np.ones_like(x), 0.0, atol=1e-12)
    np.testing.assert_allclose(D @ x, np.ones_like(x), atol=1e-12)
    np.testing.assert_allclose(D @ x ** 5, 5 * x ** 4, atol=1e-10)


@pytest.mark.parametrize("kind,res", [("spectral1d", 9), ("fd1d", 0.125),
                                      ("spectral2d", 7), ("fd2d", 0.2)])
def test_operator_annihilates_constants(kind, res):
    d = ss.build(kind, res)
    ones_i = np.ones(d.n_interior)
    ones_b = np.ones(d.n_boundary)
    folded = apply_operator(d, ones_i, ones_b)
    scale = np.max(np.abs(d.C_h.toarray() if d.is_sparse else d.C_h))
    np.testing.assert_allclose(folded / scale, 0.0, atol=1e-13)


def test_fd_stencil_exact_on_cubics():
    d = ss.build("fd1d", 0.25)
    x = d.interior_nodes
    u = lambda s: s ** 3 - 2 * s ** 2 + 3 * s + 7
    lap = apply_operator(d, u(x), u(d.boundary_nodes))
    np.testing.assert_allclose(lap, 6 * x - 4, rtol=1e-13)


def test_spectral_operator_exact_on_polynomials_with_boundary_data():
    d = ss.build("spectral1d", 10)
    x = d.interior_nodes
    u = lambda s: s ** 4 - 2 * s ** 3 + 7
    lap = apply_operator(d, u(x), u(d.boundary_nodes))
    np.testing.assert_allclose(lap, 12 * x ** 2 - 12 * x, atol=1e-9)


def test_fd2d_five_point_exact_on_quadratics():
    d = ss.build("fd2d", 0.2)
    xs, ys = d.interior_nodes[:, 0], d.interior_nodes[:, 1]
    xb, yb = d.boundary_nodes[:, 0], d.boundary_nodes[:, 1]
    u = lambda x, y: x ** 2 * y ** 2 + 3 * x * y
    lap = apply_operator(d, u(xs, ys), u(xb, yb))
    np.testing.assert_allclose(lap, 2 * ys ** 2 + 2 * xs ** 2, rtol=1e-11)


def test_spectral2d_exact_on_separable_polynomials():
    d = ss.build("spectral2d", 8)
    xs, ys = d.interior_nodes[:, 0], d.interior_nodes[:, 1]
    xb, yb = d.boundary_nodes[:, 0], d.boundary_nodes[:, 1]
    u = lambda x, y: x ** 3 * y ** 2 + y ** 3
    lap = apply_operator(d, u(xs, ys), u(xb, yb))
    want = 6 * xs * ys ** 2 + 2 * xs ** 3 + 6 * ys
    np.testing.assert_allclose(lap, want, atol=1e-8)


def test_fd_eigenvalues_match_dense_spectrum():
    d = ss.build("fd1d", 0.1)
    lam = np.sort(fd_eigenvalues(d)[0])
    dense = np.sort(np.linalg.eigvalsh(d.A_h0.toarray()))
    np.testing.assert_allclose(lam, dense, rtol=1e-12)


def test_fd_eigenvalue_closed_form_quarter_mesh():
    d = ss.build("fd1d", 0.25)
    lam = fd_eigenvalues(d)[0]
    assert lam[0] == pytest.approx(-64 * np.sin(np.pi / 8) ** 2, rel=1e-14)


def test_fd2d_boundary_walk_layout():
    # 0.25 mesh: 3 interior nodes per axis, edges walked bottom, top (x
    # ascending, corners included) then left, right (y ascending, interior
    # rows only).
    d = ss.build("fd2d", 0.25)
    assert d.n_boundary == 16
    b = d.boundary_nodes
    np.testing.assert_allclose(b[:5, 1], 0.0)          # bottom edge
    np.testing.assert_allclose(b[:5, 0], [0, .25, .5, .75, 1])
    np.testing.assert_allclose(b[5:10, 1], 1.0)        # top edge
    np.testing.assert_allclose(b[10:13, 0], 0.0)       # left edge
    np.testing.assert_allclose(b[10:13, 1], [.25, .5, .75])
    np.testing.assert_allclose(b[13:, 0], 1.0)         # right edge
    # interior is row-major in (y, x)
    assert d.interior_shape == (3, 3)
    np.testing.assert_allclose(d.interior_nodes[:3, 1], 0.25)


def test_elliptic_projection_recovers_cubic_exactly_fd():
    # the stencil is exact on cubics, so the projection reproduces the nodal
    # values of x^3 to rounding at every mesh width
    for h in (0.05, 0.025, 0.0125):
        d = ss.build("fd1d", h)
        x = d.interior_nodes
        R = elliptic_project(d, 6 * x, d.boundary_nodes ** 3)
        assert np.max(np.abs(R - x ** 3)) < 1e-11, h


def test_elliptic_projection_second_order_fd():
    errs = []
    for h in (0.05, 0.025, 0.0125):
        d = ss.build("fd1d", h)
        x = d.interior_nodes
        R = elliptic_project(d, 20 * x ** 3, d.boundary_nodes ** 5)
        errs.append(np.max(np.abs(R - x ** 5)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    np.testing.assert_allclose(rates, 2.0, atol=0.1)


def test_elliptic_projection_spectral_is_tight():
    p = ss.builtin_problem("p1d")
    d = ss.build("spectral1d", 16)
    x = d.interior_nodes
    u0 = np.exp(x ** 3)
    lap = (6 * x + 9 * x ** 4) * u0
    R = elliptic_project(d, lap, np.exp(d.boundary_nodes ** 3))
    assert np.max(np.abs(R - u0)) < 1e-10


def test_elliptic_projection_2d_quadratic():
    d = ss.build("fd2d", 0.1)
    xs, ys = d.interior_nodes[:, 0], d.interior_nodes[:, 1]
    xb, yb = d.boundary_nodes[:, 0], d.boundary_nodes[:, 1]
    R = elliptic_project(d, np.full(d.n_interior, 4.0), xb ** 2 + yb ** 2)
    np.testing.assert_allclose(R, xs ** 2 + ys ** 2, atol=1e-11)


def test_build_rejects_bad_input():
    with pytest.raises(ValueError, match="kind"):
        ss.build("fem", 0.1)
    with pytest.raises(ValueError, match="integer"):
        ss.build("fd1d", 0.3)
    with pytest.raises(ValueError, match="mesh width"):
        ss.build("fd1d", 0.5)
    with pytest.raises(ValueError, match="interior"):
        ss.build("spectral1d", 1)


def test_apply_operator_rejects_wrong_sizes():
    d = ss.build("fd1d", 0.25)
    with pytest.raises(ValueError, match="entries"):
        apply_operator(d, np.zeros(4), np.zeros(2))
    with pytest.raises(ValueError, match="boundary"):
        apply_operator(d, np.zeros(3), np.zeros(3))


def test_sparsity_split():
    assert ss.build("fd1d", 0.25).is_sparse
    assert ss.build("fd2d", 0.25).is_sparse
    assert not ss.build("spectral1d", 8).is_sparse
    assert not ss.build("spectral2d", 5).is_sparse
