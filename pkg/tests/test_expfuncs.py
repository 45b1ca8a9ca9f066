"""phi-function oracles and cross-strategy agreement.

phi_scalar is checked against a 60-digit mpmath evaluation, the three
evaluator strategies are checked against each other on random data, and the
stiff-kernel identities (recurrence, linearity, variation of constants) are
verified per strategy.
"""

import math
import time

import mpmath
import numpy as np
import pytest
from scipy.integrate import solve_ivp

import strangsplit as ss
from strangsplit.expfuncs import (DensePhi, DstPhi, KrylovPhi, make_evaluator,
                                  phi_combination, phi_scalar)

mpmath.mp.dps = 60


def phi_reference(j, z):
    """High-precision phi_j via the defining recurrence."""
    zm = mpmath.mpf(z)
    if zm == 0:
        return float(1 / mpmath.factorial(j))
    val = mpmath.exp(zm)
    for i in range(j):
        val = (val - 1 / mpmath.factorial(i)) / zm
    return float(val)


def test_phi_scalar_matches_high_precision_on_wide_grid():
    zs = np.linspace(-1e6, 1.0, 50)
    for j in range(4):
        got = phi_scalar(j, zs)
        want = np.array([phi_reference(j, z) for z in zs])
        np.testing.assert_allclose(got, want, rtol=1e-13)


def test_phi_scalar_recurrence_property():
    rng = np.random.default_rng(123)
    zs = rng.uniform(-50.0, 1.0, 200)
    for j in range(3):
        lhs = phi_scalar(j + 1, zs)
        rhs = (phi_scalar(j, zs) - 1.0 / math.factorial(j)) / zs
        np.testing.assert_allclose(lhs, rhs, atol=1e-12, rtol=1e-12)


def test_phi_scalar_small_and_special_values():
    for j in range(4):
        assert phi_scalar(j, 0.0) == pytest.approx(1.0 / math.factorial(j),
                                                   rel=1e-15)
    assert phi_scalar(1, 1.0) == pytest.approx(math.e - 1.0, rel=1e-14)
    assert phi_scalar(2, 1e-8) == pytest.approx(0.5, abs=1e-8)
    out = phi_scalar(3, 0.25)
    assert np.ndim(out) == 0


def test_phi_scalar_rejects_unknown_order():
    with pytest.raises(ValueError, match="order"):
        phi_scalar(4, 0.1)
    with pytest.raises(ValueError, match="order"):
        phi_scalar(-1, 0.1)


def _random_inputs(disc, seed):
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(disc.n_interior) for _ in range(4)]


def test_strategies_agree_pairwise_fd1d():
    d = ss.build("fd1d", 1.0 / 50.0)
    k = 1e-3
    b0, b1, b2, b3 = _random_inputs(d, 42)
    # the krylov evaluator delivers what it is asked for, so the agreement
    # bar below needs a tighter request than its 1e-7 default
    results = {name: make_evaluator(d, name, k, tol=1e-11).combine(b0, b1,
                                                                   b2, b3)
               for name in ("dense", "krylov", "dst")}
    names = list(results)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            gap = np.max(np.abs(results[names[i]] - results[names[j]]))
            assert gap <= 1e-9, (names[i], names[j], gap)


def test_dense_and_dst_agree_fd2d():
    d = ss.build("fd2d", 0.25)
    k = 1e-2
    b0, b1, b2, b3 = _random_inputs(d, 5)
    dense = make_evaluator(d, "dense", k).combine(b0, b1, b2, b3)
    dst = make_evaluator(d, "dst", k).combine(b0, b1, b2, b3)
    np.testing.assert_allclose(dense, dst, atol=1e-12)


@pytest.mark.parametrize("strategy", ["dense", "krylov", "dst"])
def test_combination_is_linear(strategy):
    d = ss.build("fd1d", 0.1)
    ev = make_evaluator(d, strategy, 2e-3, tol=1e-10)
    rng = np.random.default_rng(17)
    a = [rng.standard_normal(d.n_interior) for _ in range(4)]
    b = [rng.standard_normal(d.n_interior) for _ in range(4)]
    lam = 0.37
    combined = ev.combine(*(ai + lam * bi for ai, bi in zip(a, b)))
    split = ev.combine(*a) + lam * ev.combine(*b)
    np.testing.assert_allclose(combined, split, atol=1e-10)


@pytest.mark.parametrize("strategy", ["dense", "krylov", "dst"])
def test_operator_recurrence_per_strategy(strategy):
    # A (k^{j+1} phi_{j+1}(kA) b) = k^j phi_j(kA) b - (k^j / j!) b
    d = ss.build("fd1d", 0.125)
    k = 4e-3
    ev = make_evaluator(d, strategy, k, tol=1e-12)
    A = d.A_h0.toarray()
    rng = np.random.default_rng(3)
    b = rng.standard_normal(d.n_interior)
    zero = np.zeros_like(b)
    actions = [ev.combine(b),
               ev.combine(zero, b),
               ev.combine(zero, None, b),
               ev.combine(zero, None, None, b)]
    for j in range(3):
        lhs = A @ actions[j + 1]
        rhs = actions[j] - (k ** j / math.factorial(j)) * b
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("strategy", ["dense", "krylov", "dst"])
def test_combine_boundary_folds_coupling(strategy):
    d = ss.build("fd1d", 0.125)
    ev = make_evaluator(d, strategy, 3e-3, tol=1e-12)
    rng = np.random.default_rng(9)
    b0 = rng.standard_normal(d.n_interior)
    g1, g2, g3 = rng.standard_normal((3, d.n_boundary))
    C = d.C_h.toarray()
    via_boundary = ev.combine_boundary(b0, g1, g2, g3)
    via_interior = ev.combine(b0, C @ g1, C @ g2, C @ g3)
    np.testing.assert_allclose(via_boundary, via_interior, atol=1e-11)


def test_variation_of_constants_against_tight_ode_solve():
    d = ss.build("fd1d", 0.2)
    A = d.A_h0.toarray()
    rng = np.random.default_rng(21)
    v0 = rng.standard_normal(d.n_interior)
    c = rng.standard_normal(d.n_interior)
    k = 2e-2
    ev = make_evaluator(d, "dense", k)
    kernel = ev.combine(v0, c)
    sol = solve_ivp(lambda t, y: A @ y + c, (0.0, k), v0, method="LSODA",
                    rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(kernel, sol.y[:, -1], atol=1e-8)


def test_phi_combination_helper_delegates():
    d = ss.build("fd1d", 0.25)
    ev = make_evaluator(d, "dense", 1e-2)
    rng = np.random.default_rng(1)
    b0, b1 = rng.standard_normal((2, d.n_interior))
    np.testing.assert_array_equal(phi_combination(ev, b0, b1),
                                  ev.combine(b0, b1))


def test_krylov_construction_does_no_precomputation():
    d = ss.build("fd1d", 1e-3)      # 999 interior nodes
    t0 = time.perf_counter()
    ev = make_evaluator(d, "krylov", 1e-3)
    elapsed = time.perf_counter() - t0
    assert elapsed < 0.05
    assert not hasattr(ev, "expkA")


def test_krylov_exact_when_basis_spans_space():
    d = ss.build("fd1d", 0.25)      # 3 interior nodes, basis exhausts space
    k = 0.5
    b0, b1, b2, b3 = _random_inputs(d, 77)
    kr = make_evaluator(d, "krylov", k).combine(b0, b1, b2, b3)
    dn = make_evaluator(d, "dense", k).combine(b0, b1, b2, b3)
    np.testing.assert_allclose(kr, dn, atol=1e-12)


def test_krylov_reports_basis_size_on_failure():
    d = ss.build("fd1d", 5e-4)
    ev = make_evaluator(d, "krylov", 1e-3, max_basis=40)
    b = np.ones(d.n_interior)
    with pytest.raises(RuntimeError, match="max_basis=40"):
        ev.combine(b, b)


def test_strategy_validation():
    d1 = ss.build("spectral1d", 8)
    with pytest.raises(ValueError, match="FD"):
        make_evaluator(d1, "dst", 1e-3)
    with pytest.raises(ValueError, match="strategy"):
        make_evaluator(d1, "pade", 1e-3)
    with pytest.raises(ValueError, match="positive"):
        make_evaluator(d1, "dense", 0.0)
    with pytest.raises(ValueError, match="positive"):
        make_evaluator(ss.build("fd1d", 0.25), "krylov", 1e-3, tol=0.0)


def test_dst_combination_is_deterministic():
    d = ss.build("fd1d", 0.05)
    ev = make_evaluator(d, "dst", 1e-3)
    rng = np.random.default_rng(31)
    b = [rng.standard_normal(d.n_interior) for _ in range(4)]
    first = ev.combine(*b)
    second = ev.combine(*b)
    np.testing.assert_array_equal(first, second)
