"""Brute-force verification for small instances.

path_sum expands every coin branch of every component as an explicit tree
of paths and sums their amplitudes, re-deriving the step rules from
arm_status alone; it deliberately shares no code with the engine's array
sweep so the two can check each other.  Exponential in t, usable only at
desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import DetectorTally, PhotonState, init_state, step
from .lattice import (
    ArmKind,
    BoundarySpec,
    Mode,
    ReflectorConfig,
    Site,
    arm_status,
    open_cluster,
)

INV_SQRT2 = 1.0 / np.sqrt(2.0)

# coin branches per input mode: (output mode, amplitude factor)
_BRANCHES = {
    Mode.A: ((Mode.A, INV_SQRT2), (Mode.B, -1j * INV_SQRT2)),
    Mode.B: ((Mode.B, INV_SQRT2), (Mode.A, -1j * INV_SQRT2)),
    Mode.C: ((Mode.C, INV_SQRT2), (Mode.D, -1j * INV_SQRT2)),
    Mode.D: ((Mode.D, INV_SQRT2), (Mode.C, -1j * INV_SQRT2)),
}

MAX_T = 20
MAX_N = 8


@dataclass
class PathSumResult:
    """Summed amplitudes and detector tallies after exhaustive expansion.

    paths_expanded counts the coin-branch paths that survive to depth
    t_max; paths_absorbed counts, in depth-t_max leaf equivalents, the
    branches terminated early at a detector, so the two always add up to
    2**t_max.
    """

    amps: np.ndarray
    perc_cum: float
    back_cum: float
    paths_expanded: int
    paths_absorbed: int

    def state(self, n: int) -> PhotonState:
        return PhotonState(n, self.amps.copy(), 0)


def path_sum(
    config: ReflectorConfig,
    boundary: BoundarySpec,
    injection_site: tuple[int, int],
    injection_mode: Mode,
    t_max: int,
) -> PathSumResult:
    """Evolve by summing over all coin-branch paths of length t_max.

    Paths exiting through an absorbing arm accumulate coherently per
    (exit step, site, mode) before squaring, exactly as the engine removes
    the already-summed component amplitude.
    """
    if t_max > MAX_T:
        raise ValueError(f"t_max {t_max} exceeds the branch-explosion guard {MAX_T}")
    if config.n > MAX_N:
        raise ValueError(f"lattice size {config.n} exceeds the oracle guard {MAX_N}")
    n = config.n
    site = Site(*injection_site)
    amps = np.zeros((4, n, n), np.complex128)
    exit_amps: dict[tuple[int, Site, Mode], complex] = {}
    counters = {"expanded": 0, "absorbed": 0}

    def walk(site: Site, mode: Mode, amp: complex, t: int) -> None:
        if t == t_max:
            amps[mode, site.x - 1, site.y - 1] += amp
            counters["expanded"] += 1
            return
        for out_mode, factor in _BRANCHES[mode]:
            branch = amp * factor
            status = arm_status(config, boundary, site, out_mode)
            if status.kind is ArmKind.OPEN_INTERIOR:
                walk(status.neighbor, out_mode, branch, t + 1)
            elif status.kind is ArmKind.BOUNDARY_ABSORB:
                key = (t + 1, site, out_mode)
                exit_amps[key] = exit_amps.get(key, 0.0) + branch
                counters["absorbed"] += 2 ** (t_max - (t + 1))
            else:  # interior reflector or reflecting boundary
                walk(site, out_mode.opposite, branch * -1j, t + 1)

    walk(site, injection_mode, 1.0 + 0.0j, 0)

    perc = 0.0
    back = 0.0
    for (_, _, mode), amp in exit_amps.items():
        p = abs(amp) ** 2
        if mode.is_forward:
            perc += p
        else:
            back += p
    return PathSumResult(amps, perc, back, counters["expanded"], counters["absorbed"])


def confinement_check(
    config: ReflectorConfig,
    boundary: BoundarySpec,
    injection_site: tuple[int, int],
    t_max: int,
) -> bool:
    """True iff the injection site's open cluster avoids the boundary.

    Requires an all-absorbing boundary.  When confined, additionally runs
    the engine for t_max steps and asserts that both detector tallies stay
    exactly zero (no amplitude can cross a reflector edge).
    """
    if boundary.model != "absorb-all":
        raise ValueError("confinement check is defined for the absorb-all boundary")
    _, touches = open_cluster(config, injection_site)
    if touches:
        return False
    state = init_state(config.n, injection_site, Mode.A)
    tally = DetectorTally()
    for _ in range(t_max):
        state, tally = step(state, config, boundary, tally)
    assert tally.perc_cum == 0.0 and tally.back_cum == 0.0, (
        f"confined cluster leaked probability: perc={tally.perc_cum}, back={tally.back_cum}"
    )
    return True
