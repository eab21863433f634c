"""Single-photon transport through square beam-splitter lattices whose
connecting paths may hold perfect backward reflectors: state-vector
evolution, percolation/backscattering/localization detectors, Monte Carlo
ensemble sweeps, and a brute-force path-sum oracle."""

from .engine import (
    AbsorptionRecord,
    CheckpointRecord,
    DetectorTally,
    PhotonState,
    coin_step,
    coin_step_flagged,
    evolve,
    init_state,
    lattice_norm,
    step,
    transport_step,
)
from .experiments import (
    ScenarioSpec,
    SweepResult,
    SweepSpec,
    aggregate,
    realization_rng,
    run_realization,
    run_sweep,
)
from .lattice import (
    ArmKind,
    ArmStatus,
    BoundarySpec,
    Mode,
    ReflectorConfig,
    Site,
    arm_status,
    load_config,
    open_cluster,
    sample_config,
    save_config,
)
from .oracle import PathSumResult, confinement_check, path_sum

__all__ = [
    "AbsorptionRecord", "ArmKind", "ArmStatus", "BoundarySpec",
    "CheckpointRecord", "DetectorTally", "Mode", "PathSumResult",
    "PhotonState", "ReflectorConfig", "ScenarioSpec", "Site", "SweepResult",
    "SweepSpec", "aggregate", "arm_status", "coin_step", "coin_step_flagged",
    "confinement_check", "evolve", "init_state", "lattice_norm",
    "load_config", "open_cluster", "path_sum", "realization_rng",
    "run_realization", "run_sweep", "sample_config", "save_config", "step",
    "transport_step",
]

__version__ = "0.1.0"
