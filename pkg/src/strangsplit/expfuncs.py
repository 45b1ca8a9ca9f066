"""Exponential and phi-function actions for the splitting schemes.

The schemes need linear combinations

    exp(kA) b0 + k phi1(kA) b1 + k^2 phi2(kA) b2 + k^3 phi3(kA) b3,

where A is the interior Laplacian of a discretization and the b_j with j >= 1
are boundary couplings C_h @ g.  phi0 = exp and phi_{j+1}(z) =
(phi_j(z) - 1/j!) / z.

Three interchangeable strategies realize the combination:

* ``dense``  - scaling-and-squaring matrix exponential; the narrow products
  phi_j(kA) @ C_h are cached at setup since they only ever multiply boundary
  data.  Best for the small dense spectral operators.
* ``krylov`` - a single Arnoldi process on the (n+3)-dimensional augmented
  operator [[A, W], [0, J]] whose exponential produces the full combination
  in one shot.  No setup cost; intended for large sparse operators with
  moderate ||kA||.
* ``dst``    - diagonalization by the type-I discrete sine transform; exact
  for the uniform-grid FD operators, whose eigenvectors are sine modes.

An evaluator is bound to one (discretization, k) pair at construction.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.sparse

from .discretization import Discretization, fd_eigenvalues

STRATEGIES = ("dense", "krylov", "dst")

_TAYLOR_TERMS = 12
_TAYLOR_RADIUS = 0.1


def phi_scalar(j: int, z):
    """phi_j evaluated elementwise; j in 0..3, z scalar or array.

    Near the origin (|z| < 0.1) a 12-term Taylor series avoids the
    cancellation in the recurrence; elsewhere the recurrence from exp(z) is
    stable, including very negative real z where exp underflows to 0.
    """
    if j not in (0, 1, 2, 3):
        raise ValueError(f"phi order must be in 0..3, got {j}")
    z_arr = np.asarray(z, dtype=np.result_type(np.asarray(z).dtype, float))
    scalar_in = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)

    if j == 0:
        out = np.exp(z_arr)
        return out[0] if scalar_in else out

    small = np.abs(z_arr) < _TAYLOR_RADIUS
    out = np.empty_like(z_arr)

    if np.any(small):
        zs = z_arr[small]
        # Horner evaluation of sum_n z^n / (n+j)!
        acc = np.full_like(zs, 1.0 / math.factorial(_TAYLOR_TERMS - 1 + j))
        for n in range(_TAYLOR_TERMS - 2, -1, -1):
            acc = acc * zs + 1.0 / math.factorial(n + j)
        out[small] = acc

    if np.any(~small):
        zl = z_arr[~small]
        val = np.exp(zl)
        for m in range(j):
            val = (val - 1.0 / math.factorial(m)) / zl
        out[~small] = val

    return out[0] if scalar_in else out


def _dense_operator(disc: Discretization) -> np.ndarray:
    A = disc.A_h0
    return A.toarray() if scipy.sparse.issparse(A) else np.asarray(A, dtype=float)


def _dense_coupling(disc: Discretization) -> np.ndarray:
    C = disc.C_h
    return C.toarray() if scipy.sparse.issparse(C) else np.asarray(C, dtype=float)


def _augmented_combine_dense(kA: np.ndarray, b0, w1, w2, w3) -> np.ndarray:
    """exp(kA) b0 + phi1(kA) w3 + phi2(kA) w2 + phi3(kA) w1, all dense.

    Uses the block identity: for M = [[kA, W], [0, J]] with W = [w1 w2 w3]
    and J the 3x3 nilpotent upper shift, the top part of exp(M) [b0; e3]
    equals the combination above.
    """
    n = kA.shape[0]
    M = np.zeros((n + 3, n + 3))
    M[:n, :n] = kA
    M[:n, n + 0] = w1
    M[:n, n + 1] = w2
    M[:n, n + 2] = w3
    M[n, n + 1] = 1.0
    M[n + 1, n + 2] = 1.0
    v = np.zeros(n + 3)
    v[:n] = b0
    v[n + 2] = 1.0
    return (scipy.linalg.expm(M) @ v)[:n]


class DensePhi:
    """Dense strategy: precomputed exp(kA) and narrow phi_j(kA) @ C_h blocks."""

    strategy = "dense"

    def __init__(self, disc: Discretization, k: float):
        if k <= 0.0:
            raise ValueError(f"k must be positive, got {k}")
        self.disc = disc
        self.k = k
        A = _dense_operator(disc)
        C = _dense_coupling(disc)
        n, nb = A.shape[0], C.shape[1]
        kA = k * A
        self._kA = kA
        self.expkA = scipy.linalg.expm(kA)
        # One chained augmented exponential yields phi_1..phi_3 applied to
        # every column of C_h, without inverting kA.
        M = np.zeros((n + 3 * nb, n + 3 * nb))
        M[:n, :n] = kA
        M[:n, n:n + nb] = C
        M[n:n + nb, n + nb:n + 2 * nb] = np.eye(nb)
        M[n + nb:n + 2 * nb, n + 2 * nb:] = np.eye(nb)
        EM = scipy.linalg.expm(M)
        self.phi1_C = EM[:n, n:n + nb]
        self.phi2_C = EM[:n, n + nb:n + 2 * nb]
        self.phi3_C = EM[:n, n + 2 * nb:]

    def combine(self, b0, b1=None, b2=None, b3=None) -> np.ndarray:
        n = self.disc.n_interior
        b0 = np.zeros(n) if b0 is None else np.asarray(b0, dtype=float)
        if b1 is None and b2 is None and b3 is None:
            return self.expkA @ b0
        k = self.k
        z = np.zeros(n)
        w3 = k * np.asarray(b1, dtype=float) if b1 is not None else z
        w2 = k ** 2 * np.asarray(b2, dtype=float) if b2 is not None else z
        w1 = k ** 3 * np.asarray(b3, dtype=float) if b3 is not None else z
        return _augmented_combine_dense(self._kA, b0, w1, w2, w3)

    def combine_boundary(self, b0, g1=None, g2=None, g3=None) -> np.ndarray:
        out = self.expkA @ np.asarray(b0, dtype=float)
        k = self.k
        if g1 is not None:
            out = out + k * (self.phi1_C @ np.asarray(g1, dtype=float))
        if g2 is not None:
            out = out + k ** 2 * (self.phi2_C @ np.asarray(g2, dtype=float))
        if g3 is not None:
            out = out + k ** 3 * (self.phi3_C @ np.asarray(g3, dtype=float))
        return out


class KrylovPhi:
    """Krylov strategy: one Arnoldi run per combination on the augmented operator.

    Construction does no work; each ``combine`` builds an orthonormal basis
    until the residual estimate drops below ``tol`` (relative to the input
    norm) or ``max_basis`` is reached, in which case it raises.
    """

    strategy = "krylov"

    def __init__(self, disc: Discretization, k: float, tol: float = 1e-7,
                 max_basis: int = 100):
        if k <= 0.0:
            raise ValueError(f"k must be positive, got {k}")
        if tol <= 0.0:
            raise ValueError(f"tol must be positive, got {tol}")
        self.disc = disc
        self.k = k
        self.tol = tol
        self.max_basis = int(max_basis)

    def combine(self, b0, b1=None, b2=None, b3=None) -> np.ndarray:
        n = self.disc.n_interior
        A = self.disc.A_h0
        k = self.k
        zeros = np.zeros(n)
        b0 = zeros if b0 is None else np.asarray(b0, dtype=float)
        # Columns of the coupling block, ordered so that the nilpotent chain
        # integrates w3 once (phi1), w2 twice (phi2), w1 three times (phi3).
        W = np.column_stack([
            zeros if b3 is None else np.asarray(b3, dtype=float),
            zeros if b2 is None else np.asarray(b2, dtype=float),
            zeros if b1 is None else np.asarray(b1, dtype=float),
        ])
        J = np.zeros((3, 3))
        J[0, 1] = J[1, 2] = 1.0

        def aug_matvec(v):
            x, y = v[:n], v[n:]
            return np.concatenate([A @ x + W @ y, J @ y])

        v0 = np.concatenate([b0, [0.0, 0.0, 1.0]])
        beta = float(np.linalg.norm(v0))
        m_max = min(self.max_basis, n + 3)
        V = np.zeros((n + 3, m_max + 1))
        H = np.zeros((m_max + 1, m_max))
        V[:, 0] = v0 / beta
        breakdown = False
        for m in range(1, m_max + 1):
            w = aug_matvec(V[:, m - 1])
            # Modified Gram-Schmidt with one reorthogonalization pass.
            for it in range(2):
                for i in range(m):
                    c = float(V[:, i] @ w)
                    H[i, m - 1] += c
                    w = w - c * V[:, i]
            hnext = float(np.linalg.norm(w))
            H[m, m - 1] = hnext
            # Exponentiate H with one extra column e1 appended: the top-left
            # block of the result is expm(kH) (whose first column is the
            # combination sought) and the extra column is its running
            # integral k phi1(kH) e1.  The neglected coupling enters the
            # error through h_{m+1,m} int_0^k e_m' y(s) ds, so the last
            # component of that integral column is the natural residual
            # weight.  Unlike the endpoint value e_m' y(k), it decays only
            # algebraically for very stiff kH and cannot underflow to a
            # spurious zero before the combination has converged.
            Hbar = np.zeros((m + 1, m + 1))
            Hbar[:m, :m] = H[:m, :m]
            Hbar[0, m] = 1.0
            F = scipy.linalg.expm(k * Hbar)
            if hnext < 1e-12 * max(1.0, abs(H[:m, :m]).max()):
                breakdown = True
            else:
                V[:, m] = w / hnext
            resid = beta * hnext * abs(F[m - 1, m])
            if breakdown or resid <= self.tol * max(beta, 1e-300):
                return beta * (V[:, :m] @ F[:m, 0])[:n]
        raise RuntimeError(
            f"Krylov combination did not converge within max_basis={self.max_basis} "
            f"(last residual estimate {resid:.3e}, tol {self.tol:.1e}); "
            f"reduce k or use the dense/dst strategy")

    def combine_boundary(self, b0, g1=None, g2=None, g3=None) -> np.ndarray:
        C = self.disc.C_h
        b1 = C @ np.asarray(g1, dtype=float) if g1 is not None else None
        b2 = C @ np.asarray(g2, dtype=float) if g2 is not None else None
        b3 = C @ np.asarray(g3, dtype=float) if g3 is not None else None
        return self.combine(b0, b1, b2, b3)


class DstPhi:
    """Sine-transform strategy: exact diagonalization of the FD operators.

    The type-I DST with orthonormal scaling is involutory, so the same
    transform maps both ways.  Coefficient grids k^j phi_j(k lambda) are
    cached at setup.
    """

    strategy = "dst"

    def __init__(self, disc: Discretization, k: float):
        if disc.kind not in ("fd1d", "fd2d"):
            raise ValueError(
                f"dst strategy needs a uniform-grid FD discretization, got {disc.kind!r}")
        if k <= 0.0:
            raise ValueError(f"k must be positive, got {k}")
        self.disc = disc
        self.k = k
        lams = fd_eigenvalues(disc)
        if disc.dim == 1:
            lam = lams[0]
        else:
            lam = lams[0][:, None] + lams[1][None, :]   # (iy, ix) grid
        self._coef = [k ** j * phi_scalar(j, k * lam) for j in range(4)]

    def _fwd(self, v: np.ndarray) -> np.ndarray:
        if self.disc.dim == 1:
            return scipy.fft.dst(v, type=1, norm="ortho")
        return scipy.fft.dstn(v.reshape(self.disc.interior_shape), type=1, norm="ortho")

    def combine(self, b0, b1=None, b2=None, b3=None) -> np.ndarray:
        acc = None
        for j, b in enumerate((b0, b1, b2, b3)):
            if b is None:
                continue
            term = self._coef[j] * self._fwd(np.asarray(b, dtype=float))
            acc = term if acc is None else acc + term
        if acc is None:
            return np.zeros(self.disc.n_interior)
        out = self._fwd(acc)   # involutory transform: same map back
        return out.ravel() if self.disc.dim == 2 else out

    def combine_boundary(self, b0, g1=None, g2=None, g3=None) -> np.ndarray:
        C = self.disc.C_h
        b1 = C @ np.asarray(g1, dtype=float) if g1 is not None else None
        b2 = C @ np.asarray(g2, dtype=float) if g2 is not None else None
        b3 = C @ np.asarray(g3, dtype=float) if g3 is not None else None
        return self.combine(b0, b1, b2, b3)


def make_evaluator(disc: Discretization, strategy: str, k: float, *,
                   tol: float = 1e-7, max_basis: int = 100):
    """Build a phi-function evaluator bound to (disc, k)."""
    if strategy == "dense":
        return DensePhi(disc, k)
    if strategy == "krylov":
        return KrylovPhi(disc, k, tol=tol, max_basis=max_basis)
    if strategy == "dst":
        return DstPhi(disc, k)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def phi_combination(ev, b0, b1=None, b2=None, b3=None) -> np.ndarray:
    """exp(kA) b0 + k phi1(kA) b1 + k^2 phi2(kA) b2 + k^3 phi3(kA) b3."""
    return ev.combine(b0, b1, b2, b3)
