"""Benchmark harness: sweep execution, order/efficiency summaries, CSV I/O."""

import math
import time

import numpy as np
import pytest

import strangsplit.schemes
from strangsplit.bench import (CSV_HEADER, PRESETS, RunRecord, SweepConfig,
                               efficiency_ranking, observed_order,
                               parse_config_file, read_csv, run_sweep,
                               write_csv)
from strangsplit.integrators import ToleranceProfile

LOOSE = ToleranceProfile(1e-7, 1e-8)


def _rec(scheme="eo1", k=1e-3, err=1e-4, wall=1.0, **kw):
    base = dict(scheme=scheme, problem="p1d", disc="fd1d", resolution=0.1,
                k=k, max_error=err, wall_seconds=wall, setup_seconds=0.0,
                steps=10, rhs_evals=100, lin_solves=30)
    base.update(kw)
    return RunRecord(**base)


def test_run_record_failed_property():
    assert not _rec().failed
    assert _rec(err=math.nan).failed
    assert _rec(failure="KrylovError: no convergence").failed


def test_csv_round_trip_including_failure_rows(tmp_path):
    records = [
        _rec(scheme="acr2", k=5e-4, err=3.4717384261e-07, wall=0.4471),
        _rec(scheme="eo1", k=1e-3, err=math.nan, wall=math.nan,
             setup_seconds=math.nan, steps=0, rhs_evals=0, lin_solves=0,
             failure="ValueError: boom"),
    ]
    path = tmp_path / "sweep.csv"
    write_csv(path, records)
    back = read_csv(path)
    assert back == records
    # full float precision survives the trip
    assert back[0].max_error == records[0].max_error


def test_read_csv_rejects_foreign_files(tmp_path):
    p = tmp_path / "bad_header.csv"
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        read_csv(p)
    p2 = tmp_path / "short_row.csv"
    p2.write_text(",".join(CSV_HEADER) + "\neo1,p1d,fd1d,0.1\n")
    with pytest.raises(ValueError, match="row"):
        read_csv(p2)


def test_observed_order_second_order_ladder():
    recs = [_rec(k=1e-3, err=1e-4), _rec(k=5e-4, err=2.5e-5),
            _rec(k=2.5e-4, err=6.25e-6)]
    summary = observed_order(recs)
    assert summary.scheme == "eo1"
    np.testing.assert_allclose(summary.pairwise, (2.0, 2.0), rtol=1e-12)
    assert summary.slope == pytest.approx(2.0, rel=1e-12)


def test_observed_order_sorts_by_stepsize():
    recs = [_rec(k=2.5e-4, err=6.25e-6), _rec(k=1e-3, err=1e-4),
            _rec(k=5e-4, err=2.5e-5)]
    summary = observed_order(recs)
    assert summary.stepsizes == (1e-3, 5e-4, 2.5e-4)
    assert summary.errors == (1e-4, 2.5e-5, 6.25e-6)


def test_observed_order_flat_errors_give_zero_slope():
    recs = [_rec(k=1e-3, err=1e-6), _rec(k=5e-4, err=1e-6)]
    assert observed_order(recs).slope == pytest.approx(0.0, abs=1e-12)


def test_observed_order_excludes_failed_rows_with_warning():
    recs = [_rec(k=1e-3, err=1e-4), _rec(k=5e-4, err=2.5e-5),
            _rec(k=2.5e-4, err=math.nan, failure="ValueError: boom")]
    with pytest.warns(UserWarning, match="excluding"):
        summary = observed_order(recs)
    assert len(summary.pairwise) == 1
    assert summary.pairwise[0] == pytest.approx(2.0, rel=1e-12)


def test_observed_order_rejects_mixed_and_thin_input():
    with pytest.raises(ValueError, match="mix"):
        observed_order([_rec(scheme="eo1"), _rec(scheme="eo2", k=5e-4)])
    with pytest.raises(ValueError):
        observed_order([])
    with pytest.warns(UserWarning):
        with pytest.raises(ValueError, match="two"):
            observed_order([_rec(k=1e-3), _rec(k=5e-4, err=0.0)])


def test_efficiency_ranking_synthetic():
    recs = [
        _rec(scheme="eo1", k=1e-3, err=1e-3, wall=1.0),
        _rec(scheme="eo1", k=2.5e-4, err=1e-5, wall=10.0),
        _rec(scheme="acr2", k=1e-3, err=5e-4, wall=0.5),
        _rec(scheme="acr2", k=2.5e-4, err=2e-5, wall=3.0),
        _rec(scheme="acr1", k=1e-3, err=math.nan, wall=math.nan,
             failure="ValueError: boom"),
    ]
    report = efficiency_ranking(recs)
    # the coarsest per-scheme floor sets the common level
    assert report.level == pytest.approx(2e-5)
    assert [e.scheme for e in report.entries] == ["acr2", "eo1"]
    assert report.wall("eo1") == pytest.approx(10.0)
    assert report.wall("acr2") == pytest.approx(3.0)
    assert report.skipped == ("acr1",)
    with pytest.raises(KeyError):
        report.wall("eo2")


def test_efficiency_ranking_needs_a_successful_row():
    with pytest.raises(ValueError, match="successful"):
        efficiency_ranking([_rec(err=math.nan, failure="ValueError: boom")])


def test_sweep_config_validation():
    ok = dict(problem="p1d", disc="fd1d", resolution=0.1,
              schemes=("eo1",), stepsizes=(1e-2,), tol=LOOSE)
    SweepConfig(**ok)
    with pytest.raises(ValueError, match="scheme"):
        SweepConfig(**{**ok, "schemes": ("rk4",)})
    with pytest.raises(ValueError, match="non-empty"):
        SweepConfig(**{**ok, "stepsizes": ()})
    with pytest.raises(ValueError, match="decreasing"):
        SweepConfig(**{**ok, "stepsizes": (1e-3, 2e-3)})
    with pytest.raises(ValueError, match="positive"):
        SweepConfig(**{**ok, "stepsizes": (1e-3, -1e-3)})
    with pytest.raises(ValueError, match="reps"):
        SweepConfig(**{**ok, "reps": 0})


def test_run_sweep_row_order_and_contents():
    cfg = SweepConfig("p1d", "fd1d", 0.1, ("eo1", "acr2"), (2e-2, 1e-2),
                      LOOSE, phi="dst", reps=1)
    seen = []
    records = run_sweep(cfg, progress=seen.append)
    assert [(r.scheme, r.k) for r in records] == [
        ("eo1", 2e-2), ("eo1", 1e-2), ("acr2", 2e-2), ("acr2", 1e-2)]
    assert seen == records
    for r in records:
        assert not r.failed
        assert 0.0 < r.max_error < 1.0
        assert r.wall_seconds > 0.0 and r.setup_seconds >= 0.0
        assert r.rhs_evals > 0
    # halving k lowers the error for both schemes (the coarse mesh keeps the
    # spatial floor in view, so no clean factor of 4 here)
    for pair in (records[:2], records[2:]):
        assert pair[1].max_error < pair[0].max_error


def test_run_sweep_rejects_non_divisible_stepsize():
    cfg = SweepConfig("p1d", "fd1d", 0.1, ("eo1",), (3e-3,), LOOSE)
    with pytest.raises(ValueError, match="divide"):
        run_sweep(cfg)


def test_run_sweep_marks_failures_and_continues():
    # dst refuses a spectral mesh, so the acr2 rows fail during setup while
    # the eo1 row (which never builds an evaluator) still completes
    cfg = SweepConfig("p1d", "spectral1d", 12, ("acr2", "eo1"), (2e-2,),
                      LOOSE, phi="dst", reps=1)
    records = run_sweep(cfg)
    assert records[0].failed
    assert "FD" in records[0].failure
    assert math.isnan(records[0].max_error)
    assert not records[1].failed


def test_median_of_reps_and_setup_exclusion(monkeypatch):
    real = strangsplit.schemes.make_evaluator

    def slow(*args, **kwargs):
        time.sleep(0.05)
        return real(*args, **kwargs)

    monkeypatch.setattr(strangsplit.schemes, "make_evaluator", slow)
    cfg = SweepConfig("p1d", "fd1d", 0.1, ("acr2",), (2e-2,), LOOSE,
                      phi="dst", reps=3)
    rec = run_sweep(cfg)[0]
    assert rec.setup_seconds >= 0.05
    assert rec.wall_seconds < 0.05


def test_presets_are_well_formed():
    assert set(PRESETS) == {"fig1", "fig2", "fig3", "fig4"}
    for name, sweeps in PRESETS.items():
        for cfg in sweeps:
            assert isinstance(cfg, SweepConfig)
            assert cfg.schemes and cfg.stepsizes
    # the FD studies run the exponential family on fast transforms
    assert PRESETS["fig3"][-1].phi == "dst"
    assert PRESETS["fig4"][-1].phi == "krylov"
    # spectral studies use tight inner tolerances, FD studies looser ones
    assert PRESETS["fig1"][0].tol.rtol < PRESETS["fig3"][0].tol.rtol


def test_parse_config_file(tmp_path):
    p = tmp_path / "study.cfg"
    p.write_text(
        "# efficiency study\n"
        "problem = p1d\n"
        "krylov-tol = 1e-6   # hyphen spelling\n"
        "\n"
        "ks = 1e-3,5e-4\n")
    opts = parse_config_file(p)
    assert opts == {"problem": "p1d", "krylov_tol": "1e-6", "ks": "1e-3,5e-4"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("problem p1d\n")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_file(bad)
