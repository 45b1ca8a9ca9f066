"""Benchmark harness: convergence and efficiency sweeps over the steppers.

A sweep advances every configured scheme over a ladder of macro steps on one
problem/discretization pair, recording the final-time maximum error and the
median wall time over repetitions.  Evaluator construction is timed separately
(``setup_seconds``) and never counted in ``wall_seconds``.  Results serialize
to CSV with a fixed header and round-trip losslessly.
"""

from __future__ import annotations

import csv
import math
import statistics
import warnings
from dataclasses import dataclass, field

import numpy as np

from .discretization import build
from .integrators import ToleranceProfile
from .problems import builtin_problem, initial_state, max_error
from .schemes import SCHEME_IDS, Stepper

CSV_HEADER = ("scheme", "problem", "disc", "resolution", "k", "max_error",
              "wall_seconds", "setup_seconds", "steps", "rhs_evals",
              "lin_solves")


@dataclass(frozen=True)
class SweepConfig:
    """One benchmark sweep: a scheme list crossed with a stepsize ladder."""

    problem: str
    disc: str
    resolution: float
    schemes: tuple[str, ...]
    stepsizes: tuple[float, ...]
    tol: ToleranceProfile
    phi: str = "dense"
    krylov_tol: float = 1e-7
    reps: int = 3
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "stepsizes", tuple(float(k) for k in self.stepsizes))
        for s in self.schemes:
            if s not in SCHEME_IDS:
                raise ValueError(f"unknown scheme {s!r}; expected one of {SCHEME_IDS}")
        if not self.stepsizes:
            raise ValueError("stepsizes must be non-empty")
        if any(k <= 0.0 for k in self.stepsizes):
            raise ValueError(f"stepsizes must be positive, got {self.stepsizes}")
        if any(a <= b for a, b in zip(self.stepsizes, self.stepsizes[1:])):
            raise ValueError(f"stepsizes must be strictly decreasing, got {self.stepsizes}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")


@dataclass
class RunRecord:
    """One (scheme, stepsize) row of a sweep.

    A row whose run raised keeps the exception text in ``failure`` (not
    serialized) and carries NaN in the error and timing columns.
    """

    scheme: str
    problem: str
    disc: str
    resolution: float
    k: float
    max_error: float
    wall_seconds: float
    setup_seconds: float
    steps: int
    rhs_evals: int
    lin_solves: int
    failure: str = field(default="", compare=False)

    @property
    def failed(self) -> bool:
        return bool(self.failure) or math.isnan(self.max_error)

    def __eq__(self, other):
        if not isinstance(other, RunRecord):
            return NotImplemented
        def same(a, b):
            if isinstance(a, float) and isinstance(b, float):
                return a == b or (math.isnan(a) and math.isnan(b))
            return a == b
        return all(same(getattr(self, f), getattr(other, f))
                   for f in CSV_HEADER)


def _step_count(horizon: float, k: float) -> int:
    """Whole number of macro steps covering the horizon, or raise."""
    ratio = horizon / k
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-6 * max(1.0, ratio):
        raise ValueError(
            f"stepsize {k} does not divide the horizon {horizon} evenly")
    return n


def _advance(stepper: Stepper, state: np.ndarray, n_steps: int, k: float):
    """Run one full horizon; returns final state, aggregate stats, wall time."""
    stats = None
    wall = 0.0
    for i in range(n_steps):
        out = stepper.step(state, i * k)
        state = out.state
        stats = out.stats if stats is None else stats.merge(out.stats)
        wall += out.wall_seconds
    return state, stats, wall


def run_sweep(cfg: SweepConfig, progress=None) -> list[RunRecord]:
    """Execute a sweep; one RunRecord per (scheme, stepsize), in config order.

    A failure inside a single run (for example Krylov non-convergence or a
    stepsize underflow) is recorded in that row and the sweep continues.
    """
    problem = builtin_problem(cfg.problem)
    disc = build(cfg.disc, cfg.resolution)
    for k in cfg.stepsizes:
        _step_count(problem.horizon, k)

    records = []
    for scheme in cfg.schemes:
        for k in cfg.stepsizes:
            n_steps = _step_count(problem.horizon, k)
            base = dict(scheme=scheme, problem=cfg.problem, disc=cfg.disc,
                        resolution=float(cfg.resolution), k=float(k))
            try:
                walls, setups = [], []
                for _ in range(cfg.reps):
                    stepper = Stepper(scheme, problem, disc, k, cfg.tol,
                                      phi=cfg.phi, krylov_tol=cfg.krylov_tol)
                    setups.append(stepper.setup_seconds)
                    u0 = initial_state(problem, disc)
                    state, stats, wall = _advance(stepper, u0, n_steps, k)
                    walls.append(wall)
                err = max_error(state, disc, problem, problem.horizon)
                rec = RunRecord(**base, max_error=float(err),
                                wall_seconds=statistics.median(walls),
                                setup_seconds=statistics.median(setups),
                                steps=stats.steps_accepted,
                                rhs_evals=stats.rhs_evals,
                                lin_solves=stats.lin_solves)
            except Exception as exc:  # failure marker; sweep continues
                rec = RunRecord(**base, max_error=math.nan,
                                wall_seconds=math.nan, setup_seconds=math.nan,
                                steps=0, rhs_evals=0, lin_solves=0,
                                failure=f"{type(exc).__name__}: {exc}")
            records.append(rec)
            if progress is not None:
                progress(rec)
    return records


@dataclass(frozen=True)
class OrderSummary:
    """Observed convergence order of one scheme from a stepsize ladder."""

    scheme: str
    stepsizes: tuple[float, ...]
    errors: tuple[float, ...]
    pairwise: tuple[float, ...]
    slope: float


def observed_order(records: list[RunRecord]) -> OrderSummary:
    """Pairwise and least-squares slopes of log error against log stepsize.

    The records must all belong to one scheme.  Rows with zero or NaN error
    are excluded with a warning; at least two usable rows are required.
    """
    if not records:
        raise ValueError("need at least two records to measure an order")
    schemes = {r.scheme for r in records}
    if len(schemes) != 1:
        raise ValueError(f"records mix schemes {sorted(schemes)}")
    usable = []
    for r in records:
        if r.failed or r.max_error <= 0.0:
            warnings.warn(
                f"excluding unusable error for {r.scheme} at k={r.k}: "
                f"{r.failure or r.max_error}", stacklevel=2)
            continue
        usable.append(r)
    if len(usable) < 2:
        raise ValueError("need at least two records with positive errors")
    usable.sort(key=lambda r: -r.k)
    ks = np.array([r.k for r in usable])
    errs = np.array([r.max_error for r in usable])
    pairwise = np.log(errs[:-1] / errs[1:]) / np.log(ks[:-1] / ks[1:])
    slope = np.polyfit(np.log(ks), np.log(errs), 1)[0]
    return OrderSummary(usable[0].scheme, tuple(ks), tuple(errs),
                        tuple(pairwise), float(slope))


def group_by_scheme(records: list[RunRecord]) -> dict[str, list[RunRecord]]:
    """Split rows by scheme, preserving first-appearance order."""
    groups: dict[str, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(r.scheme, []).append(r)
    return groups


@dataclass(frozen=True)
class EfficiencyEntry:
    scheme: str
    wall_seconds: float
    k: float
    max_error: float


@dataclass(frozen=True)
class EfficiencyReport:
    """Wall-time ranking at the smallest error level every scheme reached.

    ``level`` is the largest per-scheme error floor; each entry is the
    cheapest run of that scheme with error at or below the level, ranked by
    wall time.  Schemes with no successful rows are listed in ``skipped``.
    """

    level: float
    entries: tuple[EfficiencyEntry, ...]
    skipped: tuple[str, ...]

    def wall(self, scheme: str) -> float:
        for e in self.entries:
            if e.scheme == scheme:
                return e.wall_seconds
        raise KeyError(scheme)


def efficiency_ranking(records: list[RunRecord]) -> EfficiencyReport:
    """Rank schemes by wall time at the smallest common error level."""
    groups = group_by_scheme(records)
    floors, skipped = {}, []
    for scheme, rows in groups.items():
        ok = [r for r in rows if not r.failed and r.max_error > 0.0]
        if ok:
            floors[scheme] = min(r.max_error for r in ok)
        else:
            skipped.append(scheme)
    if not floors:
        raise ValueError("no successful rows to rank")
    level = max(floors.values())
    entries = []
    for scheme, rows in groups.items():
        if scheme in skipped:
            continue
        feasible = [r for r in rows
                    if not r.failed and 0.0 < r.max_error <= level]
        best = min(feasible, key=lambda r: r.wall_seconds)
        entries.append(EfficiencyEntry(scheme, best.wall_seconds, best.k,
                                       best.max_error))
    entries.sort(key=lambda e: e.wall_seconds)
    return EfficiencyReport(level, tuple(entries), tuple(skipped))


def write_csv(path, records: list[RunRecord]) -> None:
    """Write rows under the fixed header; floats keep full precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                r.scheme, r.problem, r.disc, repr(r.resolution), repr(r.k),
                repr(r.max_error), repr(r.wall_seconds),
                repr(r.setup_seconds), r.steps, r.rhs_evals, r.lin_solves,
            ])


def read_csv(path) -> list[RunRecord]:
    """Parse a file written by write_csv back into identical records."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        records = []
        for row in reader:
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"malformed CSV row {row!r}")
            records.append(RunRecord(
                scheme=row[0], problem=row[1], disc=row[2],
                resolution=float(row[3]), k=float(row[4]),
                max_error=float(row[5]), wall_seconds=float(row[6]),
                setup_seconds=float(row[7]), steps=int(row[8]),
                rhs_evals=int(row[9]), lin_solves=int(row[10])))
    return records


_TIGHT = ToleranceProfile(rtol=1e-12, atol=1e-15)
_LOOSE = ToleranceProfile(rtol=1e-7, atol=1e-8)

# Named study presets.  Each preset is a tuple of sweeps because the scheme
# families run different stepsize ladders; rows concatenate in order.
PRESETS: dict[str, tuple[SweepConfig, ...]] = {
    "fig1": (
        SweepConfig("p1d", "spectral1d", 16, ("eo1", "eo2"),
                    (1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5), _TIGHT),
        SweepConfig("p1d", "spectral1d", 16, ("acr1", "acr2"),
                    (1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5, 3.125e-5), _TIGHT),
    ),
    "fig2": (
        SweepConfig("p2da", "spectral2d", 16, ("eo1", "eo2"),
                    (2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4, 3.125e-4),
                    _TIGHT),
        SweepConfig("p2da", "spectral2d", 16, ("acr1", "acr2"),
                    tuple(2.5e-3 / 2 ** j for j in range(8)), _TIGHT),
    ),
    "fig3": (
        SweepConfig("p1d", "fd1d", 5e-4, ("eo1",), (1e-3, 5e-4, 2.5e-4),
                    _LOOSE),
        SweepConfig("p1d", "fd1d", 5e-4, ("eo2",), (1e-3, 5e-4), _LOOSE),
        SweepConfig("p1d", "fd1d", 5e-4, ("eo2nd",), (2e-3, 1e-3), _LOOSE),
        SweepConfig("p1d", "fd1d", 5e-4, ("acr1", "acr2", "acr2nd"),
                    (1e-3, 5e-4, 2.5e-4, 1.25e-4), _LOOSE, phi="dst"),
    ),
    "fig4": (
        SweepConfig("p2db", "fd2d", 2e-2, ("eo1", "eo2"),
                    (1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4), _LOOSE),
        # kernel tolerance kept below the finest splitting error so the
        # ladder measures the schemes, not the Krylov stopping rule
        SweepConfig("p2db", "fd2d", 2e-2, ("acr1", "acr2"),
                    (1.25e-3, 6.25e-4, 3.125e-4, 1.5625e-4, 7.8125e-5),
                    _LOOSE, phi="krylov", krylov_tol=1e-10),
    ),
}


def parse_config_file(path) -> dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment, blanks are skipped."""
    options: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', "
                                 f"got {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            options[key.strip().replace("-", "_")] = value.strip()
    return options
