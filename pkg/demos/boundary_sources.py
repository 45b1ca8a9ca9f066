"""The boundary-matching source q(t): the correction behind the EO family.

The splitting loses order because the nonlinear substep feeds boundary
data it cannot honor.  The fix is a spatial function q(t) that equals the
reaction term f on the whole boundary; subtracting it from the reaction
substep and adding it to the stiff substep moves the mismatch into the
subproblem that can absorb it.  In 1D q is a straight line; in 2D it is a
cross product of edge traces r(x) f(t,1,y) + s(x) f(t,0,y) pinned down by
a 2x2 corner system.

Run:  python3 demos/boundary_sources.py        (instant)
"""

import numpy as np

import strangsplit as ss


def main():
    t = 0.1

    problem = ss.builtin_problem("p1d")
    disc = ss.build("spectral1d", 12)
    q_int, mismatch = ss.build_q(problem, disc, t)
    print(f"1D ({problem.name}): q is the chord through the boundary values")
    print(f"  boundary mismatch max|q - f| = {mismatch:.2e}")
    print(f"  q on the first interior nodes: {np.round(q_int[:3], 4)}")

    problem2 = ss.builtin_problem("p2da")
    disc2 = ss.build("fd2d", 0.05)
    _, mismatch2 = ss.build_q(problem2, disc2, t)
    print(f"\n2D ({problem2.name}): q is a cross product of edge traces")
    print(f"  mismatch over all four edges = {mismatch2:.2e}")

    qf = ss.build_q_function(problem2, t)
    s = np.linspace(0.0, 1.0, 5)
    inner = qf(s, np.full_like(s, 0.5))
    f_inner = problem2.reaction(t, s, np.full_like(s, 0.5),
                                problem2.boundary(t, s, np.full_like(s, 0.5)))
    print("  off the boundary q only interpolates; along y=0.5 the gap is")
    print(f"  {np.round(np.abs(inner - f_inner), 4)}")

    data = ss.boundary_taylor(problem, ss.build("fd1d", 1e-2), t)
    print("\nboundary traces the exponential family uses instead (x=0, x=1):")
    print(f"  g'        = {np.round(data.gt, 4)}")
    print(f"  f on g    = {np.round(data.f, 4)}")
    print(f"  Lap u = g' - f = {np.round(data.au, 4)}")
    print("\nThe exponential correctors weave these traces into phi-function")
    print("terms, which is why they never need q itself.")


if __name__ == "__main__":
    main()
