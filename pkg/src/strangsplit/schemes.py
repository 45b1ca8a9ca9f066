"""Strang splitting steppers that avoid order reduction at Dirichlet boundaries.

Plain Strang splitting of u_t = Lap(u) + f into a diffusion flow and a
reaction flow drops to first order when the boundary data moves in time,
because the split subflows see boundary values that are inconsistent with
the subproblem they solve.  Two families of corrected steppers restore
second order:

* ``eo1`` / ``eo2`` / ``eo2nd`` subtract a space-interpolated source q(t)
  that matches f on the boundary from the reaction subflow and add it to the
  diffusion subflow, so each subflow carries boundary-consistent data.  In
  1D q is the line through the two boundary values of f; in 2D a 2x2 corner
  system produces a cross-product interpolant; ``eo2nd`` upgrades q to a
  cubic whose second derivative matches the boundary trace of Lap(f),
  recovered numerically from one-sided differences (1D only).
* ``acr1`` / ``acr2`` / ``acr2nd`` replace the diffusion subflow by
  exponential steps with phi-function boundary corrections built from the
  boundary Taylor data g, g', trace(f), so no stiff solver is needed.
  ``acr2nd`` adds the phi3 terms with the numerically recovered traces of
  Lap(f) and Lap(Lap(u)) to push the local order towards three (1D only).

The middle digit encodes the splitting order: ``*1`` puts the reaction flow
outside (reaction half, diffusion full, reaction half), ``*2`` the diffusion
flow outside.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .discretization import Discretization
from .expfuncs import make_evaluator
from .integrators import OdeStats, ToleranceProfile, integrate_nonstiff, \
    integrate_stiff_linear
from .problems import ProblemSpec, _af_trace_1d, _coords, eval_on_nodes

SCHEME_IDS = ("eo1", "eo2", "eo2nd", "acr1", "acr2", "acr2nd")
ND_SCHEMES = ("eo2nd", "acr2nd")


@dataclass
class StepOutcome:
    """Result of one macro-step: new state, solver counters, elapsed wall time."""

    state: np.ndarray
    stats: OdeStats
    wall_seconds: float


@dataclass
class BoundaryTaylorData:
    """Boundary traces at one time, as needed by the exponential correctors.

    ``au`` is the trace of Lap(u) obtained from the PDE on the boundary
    (g' - f).  The optional fields are only filled for the
    numerical-differentiation variants.
    """

    g: np.ndarray
    gt: np.ndarray
    f: np.ndarray
    au: np.ndarray
    gtt: Optional[np.ndarray] = None
    ft: Optional[np.ndarray] = None
    fu: Optional[np.ndarray] = None
    af: Optional[np.ndarray] = None
    a2u: Optional[np.ndarray] = None


def boundary_taylor(problem: ProblemSpec, disc: Discretization, t: float,
                    state: Optional[np.ndarray] = None,
                    nd: bool = False) -> BoundaryTaylorData:
    """Collect the boundary traces entering the exponential corrections."""
    nodes = disc.boundary_nodes
    g = eval_on_nodes(problem.boundary, t, nodes)
    gt = eval_on_nodes(problem.boundary_t, t, nodes)
    f = eval_on_nodes(problem.reaction, t, nodes, g)
    data = BoundaryTaylorData(g=g, gt=gt, f=f, au=gt - f)
    if not nd:
        return data
    if state is None:
        raise ValueError("numerical-differentiation traces need the interior state")
    ux = boundary_ux_nd(disc, np.asarray(state, dtype=float), g)
    data.gtt = eval_on_nodes(problem.boundary_tt, t, nodes)
    data.ft = eval_on_nodes(problem.reaction_t, t, nodes, g)
    data.fu = eval_on_nodes(problem.reaction_u, t, nodes, g)
    data.af = _af_trace_1d(problem, t, nodes, ux)
    data.a2u = data.gtt - (data.ft + data.fu * gt) - data.af
    return data


def boundary_ux_nd(disc: Discretization, state: np.ndarray,
                   g: np.ndarray) -> np.ndarray:
    """One-sided second-order gradient of the state at the two 1D boundaries.

    Uses (-3/2 u(0) + 2 u(h) - 1/2 u(2h)) / h at the left boundary and its
    mirror image at the right one, with the boundary value taken from g and
    the interior values from the state.
    """
    if disc.kind != "fd1d":
        raise ValueError(
            f"one-sided boundary gradients need the fd1d kind, got {disc.kind!r}")
    if disc.n_interior < 2:
        raise ValueError("need at least 2 interior nodes")
    h = disc.h
    ux0 = (-1.5 * g[0] + 2.0 * state[0] - 0.5 * state[1]) / h
    ux1 = (1.5 * g[1] - 2.0 * state[-1] + 0.5 * state[-2]) / h
    return np.array([ux0, ux1])


# ---------------------------------------------------------------------------
# Boundary-matching sources q for the eo family.
# ---------------------------------------------------------------------------

def build_q_function(problem: ProblemSpec, t: float) -> Callable:
    """Space interpolant of f(t, ., g(t)) that matches f on the whole boundary.

    1D: the straight line through the two boundary values of f.  2D: q(x,y) =
    r(x) f(t,1,y,g) + s(x) f(t,0,y,g) with (r,s) solving the 2x2 corner
    system; the construction reproduces f on all four edges.  Raises if the
    corner system is singular at this t.
    """
    p = problem
    if p.dim == 1:
        f0 = float(p.reaction(t, 0.0, p.boundary(t, 0.0)))
        f1 = float(p.reaction(t, 1.0, p.boundary(t, 1.0)))
        return lambda x: f0 + x * (f1 - f0)

    def f_edge(x, y):
        return p.reaction(t, x, y, p.boundary(t, x, y))

    corner = np.array([
        [f_edge(1.0, 0.0), f_edge(0.0, 0.0)],
        [f_edge(1.0, 1.0), f_edge(0.0, 1.0)],
    ])
    det = corner[0, 0] * corner[1, 1] - corner[0, 1] * corner[1, 0]
    scale = np.max(np.abs(corner))
    if abs(det) <= 1e-14 * max(scale ** 2, 1e-300):
        raise ValueError(
            f"corner system for the boundary source is singular at t={t:.6g}; "
            "the cross-product interpolant does not exist there")

    def q(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        rhs = np.stack([np.atleast_1d(f_edge(x, 0.0 * x)),
                        np.atleast_1d(f_edge(x, np.ones_like(x)))])
        rs = np.linalg.solve(corner, rhs)
        return rs[0] * f_edge(np.ones_like(y), y) + rs[1] * f_edge(0.0 * y, y)

    return q


def build_q(problem: ProblemSpec, disc: Discretization, t: float):
    """Evaluate the boundary-matching source on the interior nodes.

    Returns ``(q_interior, boundary_mismatch)`` where the mismatch is the
    largest deviation of q from f over the boundary nodes (a construction
    check; it should sit at rounding level).
    """
    qf = build_q_function(problem, t)
    q_int = np.asarray(qf(*_coords(disc.interior_nodes)), dtype=float)
    q_bnd = np.asarray(qf(*_coords(disc.boundary_nodes)), dtype=float)
    g = eval_on_nodes(problem.boundary, t, disc.boundary_nodes)
    f_bnd = eval_on_nodes(problem.reaction, t, disc.boundary_nodes, g)
    return q_int, float(np.max(np.abs(q_bnd - f_bnd)))


def build_q_nd_1d(problem: ProblemSpec, disc: Discretization, t_n: float,
                  state: np.ndarray) -> Callable:
    """Cubic boundary source for the 1D numerical-differentiation variant.

    Returns q(t, x) with q = f on the boundary and q_xx the linear
    interpolant of the two boundary traces of Lap(f).  The boundary gradient
    u_x entering those traces is frozen at (t_n, state); every other factor
    follows the continuous time t.
    """
    p = problem
    if p.dim != 1:
        raise ValueError("the cubic boundary source is 1D only")
    nodes_b = disc.boundary_nodes
    g_n = eval_on_nodes(p.boundary, t_n, nodes_b)
    ux = boundary_ux_nd(disc, np.asarray(state, dtype=float), g_n)

    def q(t, x):
        a0, a1 = _af_trace_1d(p, t, nodes_b, ux)
        f0 = float(p.reaction(t, 0.0, p.boundary(t, 0.0)))
        f1 = float(p.reaction(t, 1.0, p.boundary(t, 1.0)))
        return (f0 + x * (f1 - f0) + 0.5 * a0 * x ** 2
                + (a1 - a0) * x ** 3 / 6.0 - x * (a0 / 3.0 + a1 / 6.0))

    return q


# ---------------------------------------------------------------------------
# Steppers.
# ---------------------------------------------------------------------------

def _reaction_rhs(problem: ProblemSpec, disc: Discretization) -> Callable:
    cs = _coords(disc.interior_nodes)
    return lambda t, y: np.asarray(problem.reaction(t, *cs, y), dtype=float)


def _q_interior(problem: ProblemSpec, disc: Discretization) -> Callable:
    """t -> q(t) on the interior nodes, rebuilt at every evaluation time."""
    cs = _coords(disc.interior_nodes)
    return lambda t: np.asarray(build_q_function(problem, t)(*cs), dtype=float)


def _boundary_fun(problem: ProblemSpec, disc: Discretization) -> Callable:
    return lambda t: eval_on_nodes(problem.boundary, t, disc.boundary_nodes)


def step_eo1(problem, disc, state, t_n, k, tol, q_int=None):
    """Reaction half-step, diffusion full step, reaction half-step.

    The diffusion subflow carries the physical boundary data g(t) plus the
    source q(t); both reaction half-steps integrate f - q.  The single stiff
    solve per step spans [t_n, t_n + k].
    """
    start = time.perf_counter()
    if q_int is None:
        q_int = _q_interior(problem, disc)
    rhs = _reaction_rhs(problem, disc)

    def rhs_minus_q(t, y):
        return rhs(t, y) - q_int(t)

    t_half, t_end = t_n + k / 2.0, t_n + k
    w1, s1 = integrate_nonstiff(rhs_minus_q, t_n, state, t_half, tol)
    v, s2 = integrate_stiff_linear(disc, q_int, _boundary_fun(problem, disc),
                                   t_n, w1, t_end, tol)
    w2, s3 = integrate_nonstiff(rhs_minus_q, t_half, v, t_end, tol)
    stats = s1.merge(s2).merge(s3)
    return StepOutcome(w2, stats, time.perf_counter() - start)


def step_eo2(problem, disc, state, t_n, k, tol, q_int=None):
    """Diffusion half-step, reaction full step, diffusion half-step."""
    start = time.perf_counter()
    if q_int is None:
        q_int = _q_interior(problem, disc)
    rhs = _reaction_rhs(problem, disc)

    def rhs_minus_q(t, y):
        return rhs(t, y) - q_int(t)

    g_fun = _boundary_fun(problem, disc)
    t_half, t_end = t_n + k / 2.0, t_n + k
    v1, s1 = integrate_stiff_linear(disc, q_int, g_fun, t_n, state, t_half, tol)
    w, s2 = integrate_nonstiff(rhs_minus_q, t_n, v1, t_end, tol)
    v2, s3 = integrate_stiff_linear(disc, q_int, g_fun, t_half, w, t_end, tol)
    stats = s1.merge(s2).merge(s3)
    return StepOutcome(v2, stats, time.perf_counter() - start)


def step_eo2_nd(problem, disc, state, t_n, k, tol):
    """eo2 with the cubic boundary source, gradients frozen at step start."""
    qf = build_q_nd_1d(problem, disc, t_n, state)
    x = disc.interior_nodes
    return step_eo2(problem, disc, state, t_n, k, tol,
                    q_int=lambda t: qf(t, x))


def step_acr1(problem, disc, ev, state, t_n, k, tol):
    """Reaction halves around one boundary-corrected exponential full step.

    ``ev`` must be bound to the full step k.  The phi1/phi2 corrections use
    the boundary Taylor data at t_n: g + (k/2) f and g' - f.
    """
    start = time.perf_counter()
    rhs = _reaction_rhs(problem, disc)
    t_half, t_end = t_n + k / 2.0, t_n + k
    V, s1 = integrate_nonstiff(rhs, t_n, state, t_half, tol)
    bd = boundary_taylor(problem, disc, t_n)
    W = ev.combine_boundary(V, bd.g + (k / 2.0) * bd.f, bd.au)
    U, s2 = integrate_nonstiff(rhs, t_half, W, t_end, tol)
    return StepOutcome(U, s1.merge(s2), time.perf_counter() - start)


def step_acr2(problem, disc, ev, state, t_n, k, tol):
    """Boundary-corrected exponential halves around one reaction full step.

    ``ev`` must be bound to the half step k/2.  The closing half-step uses
    the advanced boundary bracket g + (k/2)(g' - f) + k f at t_n.
    """
    start = time.perf_counter()
    rhs = _reaction_rhs(problem, disc)
    bd = boundary_taylor(problem, disc, t_n)
    W = ev.combine_boundary(state, bd.g, bd.au)
    V, s1 = integrate_nonstiff(rhs, t_n, W, t_n + k, tol)
    U = ev.combine_boundary(V, bd.g + (k / 2.0) * bd.au + k * bd.f, bd.au)
    return StepOutcome(U, s1, time.perf_counter() - start)


def step_acr2_nd(problem, disc, ev, state, t_n, k, tol):
    """acr2 with third-order boundary data recovered by one-sided differences.

    Adds the phi3 corrections with the trace of Lap(Lap(u)) and extends the
    phi1/phi2 brackets by the k^2-order boundary Taylor terms.  1D only.
    """
    start = time.perf_counter()
    rhs = _reaction_rhs(problem, disc)
    bd = boundary_taylor(problem, disc, t_n, state=state, nd=True)
    W = ev.combine_boundary(state, bd.g, bd.au, bd.a2u)
    V, s1 = integrate_nonstiff(rhs, t_n, W, t_n + k, tol)
    b1 = (bd.g + k * (0.5 * bd.au + bd.f)
          + k ** 2 * (bd.a2u / 8.0 + 0.5 * bd.fu * bd.au
                      + 0.5 * (bd.ft + bd.fu * bd.f)))
    b2 = bd.au + (k / 2.0) * bd.a2u + k * bd.af
    U = ev.combine_boundary(V, b1, b2, bd.a2u)
    return StepOutcome(U, s1, time.perf_counter() - start)


class Stepper:
    """A scheme bound to problem, discretization, step size and tolerances.

    Evaluator construction for the exponential schemes happens here and is
    reported in ``setup_seconds`` so that benchmark timings can exclude it.
    """

    def __init__(self, scheme: str, problem: ProblemSpec, disc: Discretization,
                 k: float, tol: ToleranceProfile, phi: str = "dense",
                 krylov_tol: float = 1e-7, max_basis: int = 100):
        if scheme not in SCHEME_IDS:
            raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEME_IDS}")
        if scheme in ND_SCHEMES and disc.kind != "fd1d":
            raise ValueError(
                f"scheme {scheme!r} needs one-sided boundary gradients and is "
                f"only available on the fd1d discretization, got {disc.kind!r}")
        if k <= 0.0:
            raise ValueError(f"macro step k must be positive, got {k}")
        self.scheme = scheme
        self.problem = problem
        self.disc = disc
        self.k = k
        self.tol = tol
        self.ev = None
        start = time.perf_counter()
        if scheme == "acr1":
            self.ev = make_evaluator(disc, phi, k, tol=krylov_tol,
                                     max_basis=max_basis)
        elif scheme in ("acr2", "acr2nd"):
            self.ev = make_evaluator(disc, phi, k / 2.0, tol=krylov_tol,
                                     max_basis=max_basis)
        self.setup_seconds = time.perf_counter() - start

    def step(self, state: np.ndarray, t_n: float) -> StepOutcome:
        p, d, k, tol = self.problem, self.disc, self.k, self.tol
        if self.scheme == "eo1":
            return step_eo1(p, d, state, t_n, k, tol)
        if self.scheme == "eo2":
            return step_eo2(p, d, state, t_n, k, tol)
        if self.scheme == "eo2nd":
            return step_eo2_nd(p, d, state, t_n, k, tol)
        if self.scheme == "acr1":
            return step_acr1(p, d, self.ev, state, t_n, k, tol)
        if self.scheme == "acr2":
            return step_acr2(p, d, self.ev, state, t_n, k, tol)
        return step_acr2_nd(p, d, self.ev, state, t_n, k, tol)
