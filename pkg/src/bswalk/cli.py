"""Command-line front end.

Subcommands:
  sweep         Monte Carlo sweep over a fraction grid, CSV output.
  run           one realization on an explicit configuration file.
  oracle-check  engine vs. exhaustive path-sum agreement on small instances.
  baseline      defect-free timing check on the fully connected lattice.

All floating output is printed with 9 significant digits and every run is
deterministic given its seed, independent of the worker count.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import engine, experiments, oracle
from .engine import DetectorTally, Mode, evolve, init_state
from .experiments import ScenarioSpec, SweepResult, SweepRow, SweepSpec, fmt
from .lattice import BoundarySpec, ReflectorConfig, load_config, sample_config


def _size(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError(f"lattice size must be >= 2, got {n}")
    return n


def _positive(text: str) -> int:
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {k}")
    return k


def _non_negative(text: str) -> int:
    k = int(text)
    if k < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {k}")
    return k


def parse_fractions(text: str) -> tuple[float, ...]:
    """Fraction grid: either one value or start:end:step, both ends
    included within 1e-9."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError
        start, end, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"fractions must be a number or start:end:step, got {text!r}"
        ) from None
    if step <= 0 or end < start:
        raise argparse.ArgumentTypeError(f"bad fraction range {text!r}")
    values = []
    k = 0
    while True:
        f = start + k * step
        if f > end + 1e-9:
            break
        values.append(min(f, 1.0))
        k += 1
    return tuple(values)


def _checkpoints(text: str) -> tuple[int, ...]:
    try:
        return tuple(sorted({int(p) for p in text.split(",") if p.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad checkpoint list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bswalk",
        description="Single-photon transport in beam-splitter lattices with reflector defects.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="ensemble sweep over a fraction grid")
    sw.add_argument("--scenario", choices=experiments.SCENARIO_NAMES, required=True)
    sw.add_argument("--n", type=_size, required=True, help="lattice size N")
    sw.add_argument("--t", type=_positive, required=True, help="number of time steps")
    sw.add_argument("--fractions", type=parse_fractions, required=True,
                    help="grid as start:end:step or a single value")
    sw.add_argument("--realizations", type=_positive, required=True)
    sw.add_argument("--seed", type=int, required=True, help="master seed")
    sw.add_argument("--checkpoints", type=_checkpoints, default=None,
                    help="comma-separated measurement times (default: N,2N,4N,8N clamped)")
    sw.add_argument("--threads", type=_non_negative, default=0,
                    help="worker processes; 0 = auto (env %s, else CPU count)"
                    % experiments.THREADS_ENV_VAR)
    sw.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    rn = sub.add_parser("run", help="single realization on an explicit configuration")
    rn.add_argument("--config-file", required=True)
    rn.add_argument("--scenario", choices=experiments.SCENARIO_NAMES, required=True)
    rn.add_argument("--t", type=_positive, required=True)
    rn.add_argument("--checkpoints", type=_checkpoints, default=None)
    rn.add_argument("--out", default="-")

    oc = sub.add_parser("oracle-check", help="engine vs. path-sum equivalence")
    oc.add_argument("--n", type=_size, default=4)
    oc.add_argument("--t", type=_positive, default=8)
    oc.add_argument("--trials", type=_positive, default=20)
    oc.add_argument("--seed", type=int, default=0)

    bl = sub.add_parser("baseline", help="defect-free percolation timing check")
    bl.add_argument("--n", type=_size, required=True)
    return parser


def parse(argv) -> argparse.Namespace:
    """Validated run request; exits with status 2 on usage errors."""
    return build_parser().parse_args(argv)


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _cmd_sweep(ns) -> int:
    scenario = ScenarioSpec.make(ns.scenario, ns.n, ns.t, ns.checkpoints)
    sweep = SweepSpec(ns.fractions, ns.realizations, ns.seed)
    result = experiments.run_sweep(scenario, sweep, workers=ns.threads or None)
    _emit(result.to_csv(), ns.out)
    return 0


def _cmd_run(ns) -> int:
    config = load_config(ns.config_file)
    scenario = ScenarioSpec.make(ns.scenario, config.n, ns.t, ns.checkpoints)
    records = experiments.run_realization(scenario, config)
    # The f column reports the measured open fraction of the loaded file.
    f = config.open_fraction()
    rows = [
        SweepRow(scenario.name, scenario.n, r.t, f, 1,
                 r.p_perc, r.p_back, r.p_loc, 0.0, 0.0, 0.0)
        for r in records
    ]
    _emit(SweepResult(rows).to_csv(), ns.out)
    return 0


def _cmd_oracle_check(ns) -> int:
    if ns.n > oracle.MAX_N or ns.t > oracle.MAX_T:
        print(f"oracle-check limited to n <= {oracle.MAX_N}, t <= {oracle.MAX_T}",
              file=sys.stderr)
        return 1
    rng = np.random.default_rng(ns.seed)
    boundary = BoundarySpec.absorb_all()
    worst = 0.0
    for trial in range(ns.trials):
        f = rng.uniform(0.3, 0.9)
        config = sample_config(ns.n, f, rng)
        expected = oracle.path_sum(config, boundary, (1, 1), Mode.A, ns.t)
        state = init_state(ns.n, (1, 1), Mode.A)
        tally = DetectorTally()
        for _ in range(ns.t):
            state, tally = engine.step(state, config, boundary, tally)
        dev = float(np.max(np.abs(state.amps - expected.amps)))
        dev = max(dev, abs(tally.perc_cum - expected.perc_cum))
        dev = max(dev, abs(tally.back_cum - expected.back_cum))
        worst = max(worst, dev)
    print(f"oracle-check: {ns.trials} trials at n={ns.n}, t={ns.t}; "
          f"max deviation {fmt(worst)}")
    ok = worst <= 1e-12
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_baseline(ns) -> int:
    n = ns.n
    config = ReflectorConfig.empty(n)
    state = init_state(n, (1, 1), Mode.A)
    records = evolve(state, config, BoundarySpec.absorb_all(), 2 * n,
                     checkpoints=range(1, 2 * n + 1))
    first_exit = next((r.t for r in records if r.p_perc > 0.0), None)
    completion = next((r.t for r in records if abs(r.p_perc - 1.0) <= 1e-10), None)
    print(f"baseline n={n}: first exit step = {first_exit}, "
          f"full percolation step = {completion}")
    ok = first_exit is not None and completion is not None
    ok = ok and first_exit >= n and completion <= 2 * n
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def execute(ns: argparse.Namespace) -> int:
    handlers = {
        "sweep": _cmd_sweep,
        "run": _cmd_run,
        "oracle-check": _cmd_oracle_check,
        "baseline": _cmd_baseline,
    }
    try:
        return handlers[ns.command](ns)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return execute(parse(argv if argv is not None else sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main())
