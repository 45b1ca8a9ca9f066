"""Reaction-diffusion initial-boundary value problems on the unit interval/square.

A problem is

    u_t = Lap(u) + f(t, x, u),   u(0) = u0,   u = g(t) on the boundary,

with time-dependent Dirichlet data g.  ``ProblemSpec`` bundles the reaction
``f``, its partial derivatives (needed by the boundary-corrected splitting
schemes), the boundary data and its first two time derivatives, the initial
condition, and optionally the exact solution for error measurement.

Three manufactured problems are built in (``p1d``, ``p2da``, ``p2db``); custom
problems can be constructed directly from callables with the same signatures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

# Boundary traces are plain arrays ordered like Discretization.boundary_nodes.
BoundaryTrace = np.ndarray

#: Quantities that boundary_trace can evaluate on the boundary nodes.
TRACE_QUANTITIES = (
    "g",       # boundary data g(t)
    "gt",      # d/dt g
    "gtt",     # d2/dt2 g
    "f",       # f(t, ., g(t))
    "ft",      # f_t(t, ., g(t))
    "fu",      # f_u(t, ., g(t))
    "au",      # trace of Lap(u): g' - f  (from the PDE on the boundary)
    "af_nd",   # trace of Lap(f(t, ., u)), one-sided numerical u_x (1D only)
    "a2u_nd",  # trace of Lap(Lap(u)): g'' - (f_t + f_u g') - af_nd (1D only)
)


@dataclass(frozen=True)
class ProblemSpec:
    """A reaction-diffusion problem with Dirichlet boundary data.

    Scalar callables are vectorized over numpy arrays.  1D signatures are
    ``reaction(t, x, u)``, ``boundary(t, x)``, ``initial(x)``, ``exact(t, x)``;
    in 2D an extra ``y`` argument precedes ``u``.  The per-axis derivative
    tuples (``reaction_x`` etc.) have one entry per space dimension.
    """

    name: str
    dim: int
    horizon: float
    reaction: Callable
    reaction_t: Callable
    reaction_u: Callable
    reaction_uu: Callable
    reaction_x: Tuple[Callable, ...]
    reaction_xx: Tuple[Callable, ...]
    reaction_xu: Tuple[Callable, ...]
    boundary: Callable
    boundary_t: Callable
    boundary_tt: Callable
    initial: Callable
    exact: Optional[Callable] = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.horizon <= 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        for tup in (self.reaction_x, self.reaction_xx, self.reaction_xu):
            if len(tup) != self.dim:
                raise ValueError(
                    f"per-axis derivative tuples must have {self.dim} entries"
                )


def _coords(nodes: np.ndarray) -> tuple:
    """Split an (n, dim) node array into per-axis coordinate arrays."""
    nodes = np.asarray(nodes)
    if nodes.ndim == 1:
        return (nodes,)
    return tuple(nodes[:, j] for j in range(nodes.shape[1]))


def eval_on_nodes(fn: Callable, t: float, nodes: np.ndarray, u=None) -> np.ndarray:
    """Evaluate a problem callable at every node, appending u if given."""
    args = _coords(nodes)
    if u is None:
        return np.asarray(fn(t, *args), dtype=float)
    return np.asarray(fn(t, *args, u), dtype=float)


def boundary_trace(problem: ProblemSpec, disc, quantity: str, t: float,
                   state: Optional[np.ndarray] = None) -> BoundaryTrace:
    """Evaluate a boundary quantity at every boundary node of ``disc``.

    ``state`` (interior values at the evaluation time) is only consulted by
    the numerical-differentiation quantities ``af_nd``/``a2u_nd``, which use a
    one-sided gradient of the state at the boundary and are 1D-only.
    """
    if quantity not in TRACE_QUANTITIES:
        raise ValueError(
            f"unknown trace quantity {quantity!r}; expected one of {TRACE_QUANTITIES}"
        )
    nodes = disc.boundary_nodes
    if quantity == "g":
        return eval_on_nodes(problem.boundary, t, nodes)
    if quantity == "gt":
        return eval_on_nodes(problem.boundary_t, t, nodes)
    if quantity == "gtt":
        return eval_on_nodes(problem.boundary_tt, t, nodes)

    g = eval_on_nodes(problem.boundary, t, nodes)
    if quantity == "f":
        return eval_on_nodes(problem.reaction, t, nodes, g)
    if quantity == "ft":
        return eval_on_nodes(problem.reaction_t, t, nodes, g)
    if quantity == "fu":
        return eval_on_nodes(problem.reaction_u, t, nodes, g)
    if quantity == "au":
        gt = eval_on_nodes(problem.boundary_t, t, nodes)
        f = eval_on_nodes(problem.reaction, t, nodes, g)
        return gt - f

    # Numerical-differentiation quantities.
    if problem.dim != 1:
        raise ValueError(f"{quantity!r} is only available for 1D problems")
    if state is None:
        raise ValueError(f"{quantity!r} needs the interior state at time t")
    from .schemes import boundary_ux_nd

    ux = boundary_ux_nd(disc, np.asarray(state, dtype=float), g)
    af = _af_trace_1d(problem, t, nodes, ux)
    if quantity == "af_nd":
        return af
    # a2u_nd = g'' - (f_t + f_u g') - af
    gt = eval_on_nodes(problem.boundary_t, t, nodes)
    gtt = eval_on_nodes(problem.boundary_tt, t, nodes)
    ft = eval_on_nodes(problem.reaction_t, t, nodes, g)
    fu = eval_on_nodes(problem.reaction_u, t, nodes, g)
    return gtt - (ft + fu * gt) - af


def _af_trace_1d(problem: ProblemSpec, t: float, nodes: np.ndarray,
                 ux: np.ndarray) -> np.ndarray:
    """Trace of Lap(f(t, x, u(t, x))) via the chain rule.

    Lap(f) = f_xx + 2 f_xu u_x + f_uu u_x^2 + f_u u_xx with every factor taken
    at the boundary; u_xx there is g' - f by the PDE, u_x is supplied
    (one-sided differences of the current state, frozen by the caller).
    """
    g = eval_on_nodes(problem.boundary, t, nodes)
    gt = eval_on_nodes(problem.boundary_t, t, nodes)
    f = eval_on_nodes(problem.reaction, t, nodes, g)
    fxx = eval_on_nodes(problem.reaction_xx[0], t, nodes, g)
    fxu = eval_on_nodes(problem.reaction_xu[0], t, nodes, g)
    fuu = eval_on_nodes(problem.reaction_uu, t, nodes, g)
    fu = eval_on_nodes(problem.reaction_u, t, nodes, g)
    uxx = gt - f
    return fxx + 2.0 * fxu * ux + fuu * ux ** 2 + fu * uxx


def initial_state(problem: ProblemSpec, disc) -> np.ndarray:
    """Initial condition sampled on the interior nodes."""
    return np.asarray(problem.initial(*_coords(disc.interior_nodes)), dtype=float)


def max_error(state: np.ndarray, disc, problem: ProblemSpec, t: float) -> float:
    """Max-norm error of an interior state against the exact solution at t."""
    if problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    ref = eval_on_nodes(problem.exact, t, disc.interior_nodes)
    return float(np.max(np.abs(np.asarray(state, dtype=float) - ref)))


# ---------------------------------------------------------------------------
# Built-in manufactured problems.  All three have exact solutions and use the
# exact trace (and its time derivatives) as boundary data.
# ---------------------------------------------------------------------------

def _p1d() -> ProblemSpec:
    """1D problem with exact solution u = exp(t + x^3) on [0, 1]."""

    def E(t, x):
        return np.exp(t + x ** 3)

    def W(t, x):
        return 9.0 * x ** 4 + 6.0 * x + E(t, x) - 1.0

    def reaction(t, x, u):
        return u ** 2 - E(t, x) * W(t, x)

    def reaction_t(t, x, u):
        return -E(t, x) * (W(t, x) + E(t, x))

    def reaction_u(t, x, u):
        return 2.0 * u

    def reaction_uu(t, x, u):
        return 2.0 * np.ones_like(np.asarray(u, dtype=float))

    def reaction_x(t, x, u):
        e = E(t, x)
        wx = 36.0 * x ** 3 + 6.0 + 3.0 * x ** 2 * e
        return -e * (3.0 * x ** 2 * W(t, x) + wx)

    def reaction_xx(t, x, u):
        e = E(t, x)
        w = W(t, x)
        wx = 36.0 * x ** 3 + 6.0 + 3.0 * x ** 2 * e
        wxx = 108.0 * x ** 2 + (6.0 * x + 9.0 * x ** 4) * e
        return -e * ((6.0 * x + 9.0 * x ** 4) * w + 6.0 * x ** 2 * wx + wxx)

    def reaction_xu(t, x, u):
        return np.zeros_like(np.asarray(x, dtype=float) + np.asarray(u, dtype=float))

    def trace(t, x):
        return E(t, x)

    def initial(x):
        return np.exp(x ** 3)

    return ProblemSpec(
        name="p1d", dim=1, horizon=0.2,
        reaction=reaction, reaction_t=reaction_t, reaction_u=reaction_u,
        reaction_uu=reaction_uu, reaction_x=(reaction_x,),
        reaction_xx=(reaction_xx,), reaction_xu=(reaction_xu,),
        boundary=trace, boundary_t=trace, boundary_tt=trace,
        initial=initial, exact=trace,
    )


def _p2da() -> ProblemSpec:
    """2D problem with exact solution u = exp(t + x^3 + y^3) on the unit square."""

    def E(t, x, y):
        return np.exp(t + x ** 3 + y ** 3)

    def W(t, x, y):
        return 9.0 * (x ** 4 + y ** 4) + 6.0 * (x + y) + E(t, x, y) - 1.0

    def reaction(t, x, y, u):
        return u ** 2 - E(t, x, y) * W(t, x, y)

    def reaction_t(t, x, y, u):
        return -E(t, x, y) * (W(t, x, y) + E(t, x, y))

    def reaction_u(t, x, y, u):
        return 2.0 * u

    def reaction_uu(t, x, y, u):
        return 2.0 * np.ones_like(np.asarray(u, dtype=float))

    def _axis_x(t, x, y):
        # d/dx pieces; the y-axis versions follow by symmetry.
        e = E(t, x, y)
        wx = 36.0 * x ** 3 + 6.0 + 3.0 * x ** 2 * e
        return e, wx

    def reaction_x(t, x, y, u):
        e, wx = _axis_x(t, x, y)
        return -e * (3.0 * x ** 2 * W(t, x, y) + wx)

    def reaction_y(t, x, y, u):
        return reaction_x(t, y, x, u)

    def reaction_xx(t, x, y, u):
        e, wx = _axis_x(t, x, y)
        wxx = 108.0 * x ** 2 + (6.0 * x + 9.0 * x ** 4) * e
        return -e * ((6.0 * x + 9.0 * x ** 4) * W(t, x, y) + 6.0 * x ** 2 * wx + wxx)

    def reaction_yy(t, x, y, u):
        return reaction_xx(t, y, x, u)

    def reaction_xu(t, x, y, u):
        return np.zeros_like(np.asarray(x, dtype=float) + np.asarray(u, dtype=float))

    def trace(t, x, y):
        return E(t, x, y)

    def initial(x, y):
        return np.exp(x ** 3 + y ** 3)

    return ProblemSpec(
        name="p2da", dim=2, horizon=0.2,
        reaction=reaction, reaction_t=reaction_t, reaction_u=reaction_u,
        reaction_uu=reaction_uu, reaction_x=(reaction_x, reaction_y),
        reaction_xx=(reaction_xx, reaction_yy), reaction_xu=(reaction_xu, reaction_xu),
        boundary=trace, boundary_t=trace, boundary_tt=trace,
        initial=initial, exact=trace,
    )


def _p2db() -> ProblemSpec:
    """2D problem with exact solution u = exp(t)(x^2 + y^2), quadratic in space.

    Being quadratic, the exact solution carries no spatial discretization
    error under second-order finite differences, which makes this problem the
    natural choice for time-integration efficiency studies on coarse grids.
    """

    def S(x, y):
        return x ** 2 + y ** 2

    def reaction(t, x, y, u):
        s = S(x, y)
        return u ** 2 - np.exp(2.0 * t) * s ** 2 + np.exp(t) * (s - 4.0)

    def reaction_t(t, x, y, u):
        s = S(x, y)
        return -2.0 * np.exp(2.0 * t) * s ** 2 + np.exp(t) * (s - 4.0)

    def reaction_u(t, x, y, u):
        return 2.0 * u

    def reaction_uu(t, x, y, u):
        return 2.0 * np.ones_like(np.asarray(u, dtype=float))

    def reaction_x(t, x, y, u):
        return -4.0 * x * S(x, y) * np.exp(2.0 * t) + 2.0 * x * np.exp(t)

    def reaction_y(t, x, y, u):
        return reaction_x(t, y, x, u)

    def reaction_xx(t, x, y, u):
        return -(4.0 * S(x, y) + 8.0 * x ** 2) * np.exp(2.0 * t) + 2.0 * np.exp(t)

    def reaction_yy(t, x, y, u):
        return reaction_xx(t, y, x, u)

    def reaction_xu(t, x, y, u):
        return np.zeros_like(np.asarray(x, dtype=float) + np.asarray(u, dtype=float))

    def trace(t, x, y):
        return np.exp(t) * S(x, y)

    def initial(x, y):
        return S(x, y)

    return ProblemSpec(
        name="p2db", dim=2, horizon=0.2,
        reaction=reaction, reaction_t=reaction_t, reaction_u=reaction_u,
        reaction_uu=reaction_uu, reaction_x=(reaction_x, reaction_y),
        reaction_xx=(reaction_xx, reaction_yy), reaction_xu=(reaction_xu, reaction_xu),
        boundary=trace, boundary_t=trace, boundary_tt=trace,
        initial=initial, exact=trace,
    )


_BUILTIN = {"p1d": _p1d, "p2da": _p2da, "p2db": _p2db}


def builtin_problem(pid: str) -> ProblemSpec:
    """Return one of the built-in problems by id (case-insensitive)."""
    key = pid.lower()
    if key not in _BUILTIN:
        raise ValueError(
            f"unknown problem {pid!r}; available: {sorted(_BUILTIN)}"
        )
    return _BUILTIN[key]()
