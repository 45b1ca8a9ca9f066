"""Space discretizations of the Dirichlet Laplacian on [0,1] and [0,1]^2.

The Laplacian with boundary data folded in splits as

    Lap_h(U, g) = A_h0 @ U + C_h @ g,

where ``A_h0`` acts on interior unknowns only and the narrow matrix ``C_h``
carries the boundary coupling.  Two node families are supported:

* ``spectral1d`` / ``spectral2d``: Chebyshev-Gauss-Lobatto collocation,
  dense operators, resolution = number of interior nodes per axis;
* ``fd1d`` / ``fd2d``: second-order centered differences on a uniform grid,
  sparse operators, resolution = mesh width h (1/h must be an integer).

2D unknowns are ordered row-major over (y, x): index = iy * nx + ix.  The 2D
boundary walk is bottom edge (y=0, x ascending, corners included), top edge
(y=1, x ascending, corners included), left edge (x=0, y ascending, interior
y only), right edge (x=1, y ascending, interior y only).  Corner columns of
C_h are identically zero: no interior stencil reaches a corner.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

KINDS = ("spectral1d", "spectral2d", "fd1d", "fd2d")


@dataclass
class Discretization:
    """Discrete Dirichlet Laplacian split into interior and boundary parts."""

    kind: str
    dim: int
    resolution: float                  # interior nodes per axis (spectral) or h (FD)
    interior_nodes: np.ndarray         # (n,) in 1D, (n, 2) in 2D
    boundary_nodes: np.ndarray
    A_h0: object                       # dense ndarray (spectral) or CSR (FD)
    C_h: object
    axis_interior: Tuple[np.ndarray, ...] = field(default_factory=tuple)
    interior_shape: Tuple[int, ...] = ()
    h: Optional[float] = None          # uniform mesh width (FD kinds only)

    @property
    def n_interior(self) -> int:
        return self.interior_nodes.shape[0]

    @property
    def n_boundary(self) -> int:
        return self.boundary_nodes.shape[0]

    @property
    def is_sparse(self) -> bool:
        return scipy.sparse.issparse(self.A_h0)


def chebyshev_matrix(n_intervals: int) -> tuple:
    """Chebyshev-Gauss-Lobatto nodes on [0,1] and first-derivative matrix.

    Returns ``(x, D)`` with ``x`` ascending, ``x[0] = 0``, ``x[-1] = 1``.
    The diagonal uses the negative-sum trick so each row sums exactly to the
    negated off-diagonal total, which keeps constants in the null space.
    """
    n = n_intervals
    if n < 2:
        raise ValueError("need at least 2 intervals")
    j = np.arange(n + 1)
    xi = np.cos(np.pi * j / n)              # 1 ... -1
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c = c * (-1.0) ** j
    Xi = np.tile(xi, (n + 1, 1)).T
    dXi = Xi - Xi.T + np.eye(n + 1)
    D = np.outer(c, 1.0 / c) / dXi
    D = D - np.diag(D.sum(axis=1))          # negative-sum trick
    # Map xi in [-1,1] (descending) to x = (1-xi)/2 in [0,1] (ascending);
    # d/dx = -2 d/dxi.
    x = (1.0 - xi) / 2.0
    return x, -2.0 * D


def _spectral_1d_pieces(m_interior: int) -> tuple:
    """All-node grid, interior/boundary split of D^2 for Chebyshev collocation."""
    if m_interior < 2:
        raise ValueError(f"spectral resolution must be >= 2 interior nodes, got {m_interior}")
    x, D = chebyshev_matrix(m_interior + 1)
    D2 = D @ D
    A = D2[1:-1, 1:-1]
    C = D2[1:-1, [0, -1]]
    return x, A, C


def _fd_1d_pieces(h: float) -> tuple:
    """Uniform grid and sparse [1, -2, 1]/h^2 pieces for the unit interval."""
    if not (0.0 < h < 0.5):
        raise ValueError(f"mesh width must lie in (0, 0.5), got {h}")
    n_cells = round(1.0 / h)
    if abs(n_cells * h - 1.0) > 1e-8:
        raise ValueError(f"1/h must be an integer, got h={h}")
    h = 1.0 / n_cells
    m = n_cells - 1
    x = np.linspace(0.0, 1.0, n_cells + 1)
    inv_h2 = 1.0 / h ** 2
    A = scipy.sparse.diags(
        [inv_h2 * np.ones(m - 1), -2.0 * inv_h2 * np.ones(m), inv_h2 * np.ones(m - 1)],
        offsets=[-1, 0, 1], format="csr")
    C = scipy.sparse.lil_matrix((m, 2))
    C[0, 0] = inv_h2
    C[-1, 1] = inv_h2
    return x, h, A, C.tocsr()


def _boundary_walk_2d(x: np.ndarray) -> np.ndarray:
    """Boundary nodes of the square grid: bottom, top, left, right."""
    xi = x[1:-1]
    bottom = np.column_stack([x, np.zeros_like(x)])
    top = np.column_stack([x, np.ones_like(x)])
    left = np.column_stack([np.zeros_like(xi), xi])
    right = np.column_stack([np.ones_like(xi), xi])
    return np.vstack([bottom, top, left, right])


def _assemble_2d(x: np.ndarray, A1: object, C1: object, sparse: bool) -> tuple:
    """Kronecker-sum Laplacian and boundary coupling on the tensor grid.

    ``A1``/``C1`` are the 1D interior operator and boundary coupling; the same
    grid is used along both axes.  With row-major (y, x) ordering the x-part
    acts as kron(I, A1) and the y-part as kron(A1, I).
    """
    m = A1.shape[0]
    n_all = x.size
    if sparse:
        I = scipy.sparse.identity(m, format="csr")
        A = scipy.sparse.kron(I, A1, format="csr") + scipy.sparse.kron(A1, I, format="csr")
        C = scipy.sparse.lil_matrix((m * m, 2 * n_all + 2 * m))
        C1 = C1.toarray()
    else:
        I = np.eye(m)
        A = np.kron(I, A1) + np.kron(A1, I)
        C = np.zeros((m * m, 2 * n_all + 2 * m))
    off_top = n_all
    off_left = 2 * n_all
    off_right = 2 * n_all + m
    for iy in range(m):
        for ix in range(m):
            r = iy * m + ix
            # y-direction couples to bottom/top nodes at the same x (walk
            # index ix+1 skips the corner at x=0).
            C[r, ix + 1] = C1[iy, 0]
            C[r, off_top + ix + 1] = C1[iy, 1]
            # x-direction couples to left/right nodes at the same y.
            C[r, off_left + iy] = C1[ix, 0]
            C[r, off_right + iy] = C1[ix, 1]
    if sparse:
        C = C.tocsr()
    xi = x[1:-1]
    X, Y = np.meshgrid(xi, xi, indexing="xy")
    interior = np.column_stack([X.ravel(), Y.ravel()])
    boundary = _boundary_walk_2d(x)
    return interior, boundary, A, C


def build(kind: str, resolution) -> Discretization:
    """Build a discretization of the given kind.

    ``resolution`` is the interior node count per axis for spectral kinds and
    the mesh width h for finite-difference kinds.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown discretization kind {kind!r}; expected one of {KINDS}")

    if kind == "spectral1d":
        m = int(resolution)
        x, A, C = _spectral_1d_pieces(m)
        return Discretization(
            kind=kind, dim=1, resolution=m,
            interior_nodes=x[1:-1], boundary_nodes=np.array([0.0, 1.0]),
            A_h0=A, C_h=C, axis_interior=(x[1:-1],), interior_shape=(m,))

    if kind == "spectral2d":
        m = int(resolution)
        x, A1, C1 = _spectral_1d_pieces(m)
        interior, boundary, A, C = _assemble_2d(x, A1, C1, sparse=False)
        return Discretization(
            kind=kind, dim=2, resolution=m,
            interior_nodes=interior, boundary_nodes=boundary,
            A_h0=A, C_h=C, axis_interior=(x[1:-1], x[1:-1]),
            interior_shape=(m, m))

    if kind == "fd1d":
        x, h, A, C = _fd_1d_pieces(float(resolution))
        m = x.size - 2
        return Discretization(
            kind=kind, dim=1, resolution=h,
            interior_nodes=x[1:-1], boundary_nodes=np.array([0.0, 1.0]),
            A_h0=A, C_h=C, axis_interior=(x[1:-1],), interior_shape=(m,), h=h)

    # fd2d
    x, h, A1, C1 = _fd_1d_pieces(float(resolution))
    m = x.size - 2
    interior, boundary, A, C = _assemble_2d(x, A1, C1, sparse=True)
    return Discretization(
        kind=kind, dim=2, resolution=h,
        interior_nodes=interior, boundary_nodes=boundary,
        A_h0=A, C_h=C, axis_interior=(x[1:-1], x[1:-1]),
        interior_shape=(m, m), h=h)


def apply_operator(disc: Discretization, state: np.ndarray,
                   g: np.ndarray) -> np.ndarray:
    """Discrete Laplacian with boundary data: A_h0 @ state + C_h @ g."""
    state = np.asarray(state, dtype=float)
    g = np.asarray(g, dtype=float)
    if state.shape[0] != disc.n_interior:
        raise ValueError(f"state has {state.shape[0]} entries, expected {disc.n_interior}")
    if g.shape[0] != disc.n_boundary:
        raise ValueError(f"boundary trace has {g.shape[0]} entries, expected {disc.n_boundary}")
    return disc.A_h0 @ state + disc.C_h @ g


def elliptic_project(disc: Discretization, F: np.ndarray,
                     g: np.ndarray) -> np.ndarray:
    """Solve A_h0 @ R + C_h @ g = F for the interior values R.

    This is the elliptic projection used to compare discrete states against
    smooth functions: given nodal forcing F and boundary trace g, R is the
    discrete solution whose folded Laplacian reproduces F.
    """
    F = np.asarray(F, dtype=float)
    g = np.asarray(g, dtype=float)
    rhs = F - disc.C_h @ g
    if disc.is_sparse:
        return scipy.sparse.linalg.spsolve(disc.A_h0.tocsc(), rhs)
    return scipy.linalg.solve(disc.A_h0, rhs)


def fd_eigenvalues(disc: Discretization) -> Tuple[np.ndarray, ...]:
    """Per-axis eigenvalues -(4/h^2) sin^2(j pi h / 2) of the FD operator."""
    if disc.kind not in ("fd1d", "fd2d"):
        raise ValueError("eigenvalues in closed form are only available for FD kinds")
    m = len(disc.axis_interior[0])
    h = disc.h
    j = np.arange(1, m + 1)
    lam = -(4.0 / h ** 2) * np.sin(j * np.pi * h / 2.0) ** 2
    return tuple(lam for _ in range(disc.dim))
