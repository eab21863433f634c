"""Scenario definitions, Monte Carlo sweeps over the connection fraction,
and ensemble statistics.

Three scenarios are provided: corner injection with absorbing detectors on
all sides, corner injection with reflectors feeding the two injection-side
edges back into the lattice (escape only at the injection point), and
center injection with absorbing detectors.  Sweeps average percolation,
backscattering and localization probabilities over independently sampled
reflector configurations, with per-realization seeds derived from a single
master seed so results are reproducible under any parallel schedule.
"""

from __future__ import annotations

import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import engine
from .engine import CheckpointRecord, evolve, init_state
from .lattice import BoundarySpec, Mode, ReflectorConfig, Site, sample_config

SCENARIO_NAMES = ("corner-absorbing", "corner-reflecting", "center-absorbing")

CSV_HEADER = "scenario,n,t,f,realizations,p_perc,p_back,p_loc,se_perc,se_back,se_loc"

THREADS_ENV_VAR = "BSWALK_THREADS"


def center_site(n: int) -> Site:
    """Injection site for the centered scenario: ceil(n/2) on both axes."""
    return Site((n + 1) // 2, (n + 1) // 2)


def default_checkpoints(n: int, t_max: int) -> tuple[int, ...]:
    """Measurement times {n, 2n, 4n, 8n} clamped into [1, t_max]."""
    return tuple(sorted({min(k * n, t_max) for k in (1, 2, 4, 8)}))


@dataclass(frozen=True)
class ScenarioSpec:
    """One experiment setup: lattice size, injection, boundary, and times."""

    name: str
    n: int
    injection_site: Site
    injection_mode: Mode
    boundary: BoundarySpec
    t_max: int
    checkpoints: tuple[int, ...]

    def __post_init__(self):
        if self.name not in SCENARIO_NAMES:
            raise ValueError(f"unknown scenario {self.name!r}")
        if self.n < 2:
            raise ValueError(f"lattice size must be >= 2, got {self.n}")
        if self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if any(t < 1 or t > self.t_max for t in self.checkpoints):
            raise ValueError(f"checkpoints {self.checkpoints} outside [1, {self.t_max}]")
        if self.name in ("corner-absorbing", "corner-reflecting"):
            expected = Site(1, 1)
        else:
            expected = center_site(self.n)
        if Site(*self.injection_site) != expected or self.injection_mode != Mode.A:
            raise ValueError(f"{self.name} injects mode A at {tuple(expected)}")
        wanted = {
            "corner-absorbing": BoundarySpec.absorb_all(),
            "corner-reflecting": BoundarySpec.reflect_injection_sides((1, 1)),
            "center-absorbing": BoundarySpec.absorb_all(),
        }[self.name]
        if self.boundary != wanted:
            raise ValueError(f"{self.name} requires boundary {wanted}")

    @classmethod
    def make(cls, name: str, n: int, t_max: int, checkpoints=None) -> "ScenarioSpec":
        if checkpoints is None:
            checkpoints = default_checkpoints(n, t_max)
        site = Site(1, 1) if name.startswith("corner") else center_site(n)
        boundary = (
            BoundarySpec.reflect_injection_sides((1, 1))
            if name == "corner-reflecting"
            else BoundarySpec.absorb_all()
        )
        return cls(name, n, site, Mode.A, boundary, t_max, tuple(sorted(set(checkpoints))))

    @classmethod
    def corner_absorbing(cls, n: int, t_max: int, checkpoints=None) -> "ScenarioSpec":
        return cls.make("corner-absorbing", n, t_max, checkpoints)

    @classmethod
    def corner_reflecting(cls, n: int, t_max: int, checkpoints=None) -> "ScenarioSpec":
        return cls.make("corner-reflecting", n, t_max, checkpoints)

    @classmethod
    def center_absorbing(cls, n: int, t_max: int, checkpoints=None) -> "ScenarioSpec":
        return cls.make("center-absorbing", n, t_max, checkpoints)


@dataclass(frozen=True)
class SweepSpec:
    """Fraction grid, ensemble size per fraction, and the master seed."""

    fractions: tuple[float, ...]
    realizations: int
    master_seed: int

    def __post_init__(self):
        fr = tuple(float(f) for f in self.fractions)
        object.__setattr__(self, "fractions", fr)
        if not fr:
            raise ValueError("fraction grid is empty")
        if any(not (0.0 <= f <= 1.0) for f in fr):
            raise ValueError(f"fractions must lie in [0, 1]: {fr}")
        if any(b <= a for a, b in zip(fr, fr[1:])):
            raise ValueError(f"fraction grid must be strictly increasing: {fr}")
        if self.realizations < 1:
            raise ValueError(f"need at least one realization, got {self.realizations}")


def realization_rng(master_seed: int, f_index: int, realization_index: int) -> np.random.Generator:
    """Seeded generator for one realization of one grid point.

    Derivation: PCG64 keyed by SeedSequence(master_seed, spawn_key=
    (f_index, realization_index)).  Independent of scheduling, so parallel
    and serial sweeps sample identical configurations.
    """
    seq = np.random.SeedSequence(master_seed, spawn_key=(f_index, realization_index))
    return np.random.Generator(np.random.PCG64(seq))


def run_realization(scenario: ScenarioSpec, config: ReflectorConfig) -> list[CheckpointRecord]:
    """Evolve one configuration through the scenario; per-checkpoint triples."""
    if config.n != scenario.n:
        raise ValueError(f"config size {config.n} != scenario size {scenario.n}")
    state = init_state(scenario.n, scenario.injection_site, scenario.injection_mode)
    return evolve(state, config, scenario.boundary, scenario.t_max, scenario.checkpoints)


def aggregate(series: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error over the first (realization) axis.

    The standard error is the sample standard deviation (ddof=1) divided by
    sqrt(M); it is zero when M == 1.
    """
    series = np.asarray(series, dtype=float)
    m = series.shape[0]
    if m < 1:
        raise ValueError("aggregate needs at least one series")
    mean = series.mean(axis=0)
    if m == 1:
        return mean, np.zeros_like(mean)
    # identical samples have sample std exactly 0; don't let the rounding of
    # the mean leak a ~1e-17 residual into the error bars
    spread = series.max(axis=0) != series.min(axis=0)
    se = np.where(spread, series.std(axis=0, ddof=1) / np.sqrt(m), 0.0)
    return mean, se


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    n: int
    t: int
    f: float
    realizations: int
    p_perc: float
    p_back: float
    p_loc: float
    se_perc: float
    se_back: float
    se_loc: float


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def row_for(self, f: float, t: int) -> SweepRow:
        for row in self.rows:
            if row.t == t and abs(row.f - f) < 1e-12:
                return row
        raise KeyError(f"no row for f={f}, t={t}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(
                f"{r.scenario},{r.n},{r.t},{fmt(r.f)},{r.realizations},"
                f"{fmt(r.p_perc)},{fmt(r.p_back)},{fmt(r.p_loc)},"
                f"{fmt(r.se_perc)},{fmt(r.se_back)},{fmt(r.se_loc)}\n"
            )
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def fmt(x: float) -> str:
    """Floating output at 9 significant digits (stable diffs)."""
    return f"{x:.9g}"


def resolve_workers(workers: int | None = None) -> int:
    """Worker-count policy: explicit argument, else the environment
    override, else one worker per CPU; 0 or None means auto."""
    if workers is None or workers == 0:
        env = os.environ.get(THREADS_ENV_VAR, "")
        if env.strip():
            workers = int(env)
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def _one_realization(args) -> list[tuple[float, float, float]]:
    scenario, f, master_seed, f_index, realization_index = args
    rng = realization_rng(master_seed, f_index, realization_index)
    config = sample_config(scenario.n, f, rng)
    records = run_realization(scenario, config)
    return [(r.p_perc, r.p_back, r.p_loc) for r in records]


def run_sweep(scenario: ScenarioSpec, sweep: SweepSpec, workers: int | None = None) -> SweepResult:
    """Monte Carlo sweep over the fraction grid.

    For each fraction f the ensemble configurations are sampled with seeds
    derived from (master_seed, f_index, realization_index) and evolved
    independently; aggregation runs in fixed index order, so the result is
    identical for any worker count.
    """
    workers = resolve_workers(workers)
    tasks = [
        (scenario, f, sweep.master_seed, fi, i)
        for fi, f in enumerate(sweep.fractions)
        for i in range(sweep.realizations)
    ]
    if workers == 1 or len(tasks) == 1:
        results = [_one_realization(t) for t in tasks]
    else:
        engine.warm_kernel()  # compile once before forking
        chunk = max(1, min(16, len(tasks) // (workers * 4) or 1))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_realization, tasks, chunksize=chunk))

    m = sweep.realizations
    rows: list[SweepRow] = []
    for fi, f in enumerate(sweep.fractions):
        block = np.array(results[fi * m : (fi + 1) * m])  # (M, checkpoints, 3)
        mean, se = aggregate(block)
        for k, t in enumerate(scenario.checkpoints):
            rows.append(
                SweepRow(
                    scenario.name, scenario.n, t, f, m,
                    mean[k, 0], mean[k, 1], mean[k, 2],
                    se[k, 0], se[k, 1], se[k, 2],
                )
            )
    return SweepResult(rows)
