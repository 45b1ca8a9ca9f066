"""A small accuracy-versus-work study using the benchmark harness.

Both scheme families converge at order two, so the interesting question
is the constant: how much wall time does each need to reach a given
error?  The harness answers it by sweeping stepsize ladders, then ranking
the schemes by wall time at the smallest error level every one of them
reached.

Run:  python3 demos/efficiency_study.py        (under a minute)
"""

import strangsplit as ss

TOL = ss.ToleranceProfile(rtol=1e-7, atol=1e-8)


def main():
    h = 2e-3
    sweeps = (
        ss.SweepConfig("p1d", "fd1d", h, ("eo1", "eo2"), (2e-3, 1e-3, 5e-4),
                       TOL, reps=1),
        ss.SweepConfig("p1d", "fd1d", h, ("acr1", "acr2"),
                       (2e-3, 1e-3, 5e-4, 2.5e-4), TOL, phi="dst", reps=1),
    )
    print(f"reaction-diffusion run to T=0.2 on a uniform mesh, h={h}")
    print(f"{'scheme':7s} {'k':>10s} {'max error':>12s} {'wall':>8s}")
    records = []
    for cfg in sweeps:
        for rec in ss.run_sweep(cfg):
            records.append(rec)
            print(f"{rec.scheme:7s} {rec.k:10.1e} {rec.max_error:12.3e} "
                  f"{rec.wall_seconds:7.3f}s")

    for scheme, rows in ss.group_by_scheme(records).items():
        summary = ss.observed_order(rows)
        print(f"{scheme}: slope {summary.slope:.2f}")

    report = ss.efficiency_ranking(records)
    print(f"\ncheapest run per scheme with error <= {report.level:.3e}:")
    for entry in report.entries:
        print(f"  {entry.scheme:7s} {entry.wall_seconds:7.3f}s "
              f"(k={entry.k:.1e}, err={entry.max_error:.3e})")

    print("\nThe splitting steppers all hit slope 2; the exponential family")
    print("reaches the common error level in a fraction of the wall time")
    print("because each step costs two kernel applications instead of an")
    print("adaptive implicit solve.")


if __name__ == "__main__":
    main()
