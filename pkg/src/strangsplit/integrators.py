"""Adaptive time integrators used inside the splitting substeps.

Two solvers, both one-step methods with embedded error estimates and PI
step-size control:

* ``integrate_nonstiff`` - explicit Dormand-Prince 5(4) pair (FSAL) for the
  pointwise reaction subflows;
* ``integrate_affine`` / ``integrate_stiff_linear`` - TR-BDF2, an L-stable
  one-step composite of a trapezoidal stage and a BDF2 stage, specialized to
  affine systems v' = A v + b(t).  With gamma = 2 - sqrt(2) both implicit
  stages share the matrix I - (gamma/2) h A, so each step reuses one
  factorization; the factorization is rebuilt only when the controller moves
  the step size by more than 20% (smaller proposed changes are ignored and
  the current step size is kept).

Acceptance uses the componentwise criterion max_i |err_i| / (atol +
rtol * |y_i|) <= 1.  The first step is always (t1 - t0) * 1e-3; steps
below 1e-14 * (t1 - t0) raise StepSizeUnderflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

_FIRST_STEP_FRACTION = 1e-3
_UNDERFLOW_FRACTION = 1e-14
_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0


@dataclass
class ToleranceProfile:
    """Relative/absolute tolerance pair with validated floors."""

    rtol: float
    atol: float

    def __post_init__(self):
        if self.rtol < 1e-14:
            raise ValueError(f"rtol must be >= 1e-14, got {self.rtol}")
        if self.atol < 1e-16:
            raise ValueError(f"atol must be >= 1e-16, got {self.atol}")


@dataclass
class OdeStats:
    """Work counters accumulated across integrator calls."""

    steps_accepted: int = 0
    steps_rejected: int = 0
    rhs_evals: int = 0
    lin_solves: int = 0

    def merge(self, other: "OdeStats") -> "OdeStats":
        self.steps_accepted += other.steps_accepted
        self.steps_rejected += other.steps_rejected
        self.rhs_evals += other.rhs_evals
        self.lin_solves += other.lin_solves
        return self


class StepSizeUnderflow(RuntimeError):
    """Raised when the controller pushes the step below the underflow floor."""


# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4: coefficients of the embedded error estimate.
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])


def dp54_step(rhs: Callable, t: float, y: np.ndarray, h: float, k1=None):
    """One Dormand-Prince 5(4) step; returns (y5, err, k_last, n_evals).

    ``k1`` may carry the FSAL stage of the previous step; ``k_last`` is the
    derivative at (t + h, y5) and doubles as the next step's ``k1``.
    """
    stages = [None] * 7
    n_evals = 0
    if k1 is None:
        k1 = np.asarray(rhs(t, y))
        n_evals += 1
    stages[0] = k1
    for i in range(1, 7):
        yi = y + h * sum(a * stages[j] for j, a in enumerate(_A[i]))
        stages[i] = np.asarray(rhs(t + _C[i] * h, yi))
        n_evals += 1
    y5 = y + h * sum(b * stages[j] for j, b in enumerate(_B5) if b != 0.0)
    err = h * sum(e * stages[j] for j, e in enumerate(_E) if e != 0.0)
    return y5, err, stages[6], n_evals


def _error_ratio(err: np.ndarray, y_old: np.ndarray, y_new: np.ndarray,
                 tol: ToleranceProfile) -> float:
    scale = tol.atol + tol.rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def integrate_nonstiff(rhs: Callable, t0: float, y0: np.ndarray, t1: float,
                       tol: ToleranceProfile):
    """Integrate y' = rhs(t, y) from t0 to t1, landing on t1 exactly.

    Returns ``(y(t1), OdeStats)``.
    """
    span = t1 - t0
    if span <= 0.0:
        raise ValueError(f"need t1 > t0, got span {span}")
    stats = OdeStats()
    t = t0
    y = np.array(y0, dtype=float)
    h = span * _FIRST_STEP_FRACTION
    k1 = None
    err_prev = 1.0
    rejected_last = False
    alpha, beta = 0.7 / 5, 0.4 / 5
    while t < t1 - 1e-14 * span:
        if h < _UNDERFLOW_FRACTION * span:
            raise StepSizeUnderflow(
                f"step size {h:.3e} underflowed at t={t:.6g} (span {span:.3e})")
        h = min(h, t1 - t)
        y_new, err, k_last, n_evals = dp54_step(rhs, t, y, h, k1)
        stats.rhs_evals += n_evals
        ratio = _error_ratio(err, y, y_new, tol)
        if ratio <= 1.0:
            t += h
            y = y_new
            k1 = k_last
            stats.steps_accepted += 1
            ratio_c = max(ratio, 1e-16)
            fac = _SAFETY * ratio_c ** (-alpha) * err_prev ** beta
            fac = min(1.0 if rejected_last else _FAC_MAX, max(_FAC_MIN, fac))
            err_prev = ratio_c
            rejected_last = False
            h *= fac
        else:
            stats.steps_rejected += 1
            h *= max(_FAC_MIN, _SAFETY * ratio ** (-1.0 / 5))
            rejected_last = True
    return y, stats


# ---------------------------------------------------------------------------
# TR-BDF2 for affine systems.
# ---------------------------------------------------------------------------

_GAMMA = 2.0 - math.sqrt(2.0)
_D = _GAMMA / 2.0
_C_G = 1.0 / (_GAMMA * (2.0 - _GAMMA))
_C_N = (1.0 - _GAMMA) ** 2 * _C_G
# Quadrature weights of the third-order companion used for error estimation:
# integral over the step of the quadratic interpolant of v' through the three
# stage derivatives.
_BW1 = 0.5 - 1.0 / (6.0 * _GAMMA)
_BW2 = 1.0 / (6.0 * _GAMMA * (1.0 - _GAMMA))
_BW3 = (2.0 - 3.0 * _GAMMA) / (6.0 * (1.0 - _GAMMA))


def _make_solver(A, h: float):
    """Factor I - d*h*A and return a solve closure."""
    n = A.shape[0]
    if scipy.sparse.issparse(A):
        M = (scipy.sparse.identity(n, format="csc") - (_D * h) * A).tocsc()
        lu = scipy.sparse.linalg.splu(M)
        return lu.solve
    M = np.eye(n) - (_D * h) * np.asarray(A, dtype=float)
    lu, piv = scipy.linalg.lu_factor(M)
    return lambda rhs: scipy.linalg.lu_solve((lu, piv), rhs)


def integrate_affine(A, b: Callable, t0: float, y0: np.ndarray, t1: float,
                     tol: ToleranceProfile):
    """TR-BDF2 for v' = A v + b(t) from t0 to t1; returns (v(t1), OdeStats).

    ``A`` is a dense or sparse square matrix, ``b`` maps t to a vector.
    Each b evaluation counts as one rhs_eval, each triangular solve as one
    lin_solve (two stage solves plus one filtered error estimate per step).
    """
    span = t1 - t0
    if span <= 0.0:
        raise ValueError(f"need t1 > t0, got span {span}")
    stats = OdeStats()
    t = t0
    v = np.array(y0, dtype=float)
    h = span * _FIRST_STEP_FRACTION
    solve = _make_solver(A, h)
    h_fact = h
    b_n = np.asarray(b(t))
    stats.rhs_evals += 1
    err_prev = 1.0
    rejected_last = False
    alpha, beta = 0.7 / 3, 0.4 / 3
    while t < t1 - 1e-14 * span:
        if h < _UNDERFLOW_FRACTION * span:
            raise StepSizeUnderflow(
                f"step size {h:.3e} underflowed at t={t:.6g} (span {span:.3e})")
        if t + h > t1:
            h = t1 - t
        if h != h_fact:
            solve = _make_solver(A, h)
            h_fact = h
        F_n = A @ v + b_n
        b_g = np.asarray(b(t + _GAMMA * h))
        b_1 = np.asarray(b(t + h))
        stats.rhs_evals += 2
        v_g = solve(v + (_D * h) * (F_n + b_g))
        v_1 = solve(_C_G * v_g - _C_N * v + (_D * h) * b_1)
        F_g = A @ v_g + b_g
        F_1 = A @ v_1 + b_1
        est = v + h * (_BW1 * F_n + _BW2 * F_g + _BW3 * F_1) - v_1
        est = solve(est)   # stiffly damped error estimate
        stats.lin_solves += 3
        ratio = _error_ratio(est, v, v_1, tol)
        if ratio <= 1.0:
            t += h
            v = v_1
            b_n = b_1
            stats.steps_accepted += 1
            ratio_c = max(ratio, 1e-16)
            fac = _SAFETY * ratio_c ** (-alpha) * err_prev ** beta
            fac = min(1.0 if rejected_last else _FAC_MAX, max(_FAC_MIN, fac))
            err_prev = ratio_c
            rejected_last = False
            h_prop = h * fac
            # Lazy refactorization: ignore step-size changes within 20%.
            if abs(h_prop - h) > 0.2 * h:
                h = h_prop
        else:
            stats.steps_rejected += 1
            h *= max(_FAC_MIN, _SAFETY * ratio ** (-1.0 / 3))
            rejected_last = True
    return v, stats


def integrate_stiff_linear(disc, forcing: Callable, g: Callable, t0: float,
                           y0: np.ndarray, t1: float, tol: ToleranceProfile):
    """Integrate v' = A_h0 v + C_h g(t) + forcing(t) on the interior nodes."""
    C = disc.C_h

    def b(t):
        return C @ np.asarray(g(t), dtype=float) + np.asarray(forcing(t), dtype=float)

    return integrate_affine(disc.A_h0, b, t0, y0, t1, tol)
