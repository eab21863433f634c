"""Square-lattice geometry: photon modes, reflector configurations, boundaries.

Sites are addressed 1-based as (x, y) with x, y in [1, N].  Every interior
edge of the lattice carries exactly one reflector flag, stored once; both
endpoint sites see the same flag, which keeps the two views of an edge
consistent by construction.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SIDE_LEFT = "left"
SIDE_RIGHT = "right"
SIDE_BOTTOM = "bottom"
SIDE_TOP = "top"


class Mode(enum.IntEnum):
    """Single-photon occupation of one beam-splitter arm.

    The four arms are identified with travel directions:
    A -> +x, B -> +y, C -> -x, D -> -y.
    """

    A = 0
    B = 1
    C = 2
    D = 3

    @property
    def direction(self) -> tuple[int, int]:
        return _DIRECTIONS[self]

    @property
    def opposite(self) -> "Mode":
        return Mode((self + 2) % 4)

    @property
    def is_forward(self) -> bool:
        """True for the forward sector {A, B}, False for backward {C, D}."""
        return self < 2

    @property
    def exit_side(self) -> str:
        """Boundary side through which this mode leaves the lattice."""
        return _EXIT_SIDES[self]


_DIRECTIONS = {Mode.A: (1, 0), Mode.B: (0, 1), Mode.C: (-1, 0), Mode.D: (0, -1)}
_EXIT_SIDES = {Mode.A: SIDE_RIGHT, Mode.B: SIDE_TOP, Mode.C: SIDE_LEFT, Mode.D: SIDE_BOTTOM}


class Site(NamedTuple):
    x: int
    y: int


def _check_site(n: int, site: tuple[int, int]) -> Site:
    x, y = site
    if not (1 <= x <= n and 1 <= y <= n):
        raise ValueError(f"site {site!r} outside [1, {n}]^2")
    return Site(x, y)


@dataclass(frozen=True, eq=False)
class ReflectorConfig:
    """Per-edge reflector flags for all interior edges of an n x n lattice.

    h_edges[x-1, y-1] is the flag on the edge between (x, y) and (x+1, y),
    v_edges[x-1, y-1] the flag between (x, y) and (x, y+1).  Arrays are
    frozen after construction and safe to share between workers.
    """

    n: int
    h_edges: np.ndarray
    v_edges: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"lattice size must be >= 2, got {self.n}")
        h = np.ascontiguousarray(self.h_edges, dtype=bool)
        v = np.ascontiguousarray(self.v_edges, dtype=bool)
        if h.shape != (self.n - 1, self.n):
            raise ValueError(f"h_edges shape {h.shape} != {(self.n - 1, self.n)}")
        if v.shape != (self.n, self.n - 1):
            raise ValueError(f"v_edges shape {v.shape} != {(self.n, self.n - 1)}")
        h.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "h_edges", h)
        object.__setattr__(self, "v_edges", v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReflectorConfig):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.h_edges, other.h_edges)
            and np.array_equal(self.v_edges, other.v_edges)
        )

    @classmethod
    def empty(cls, n: int) -> "ReflectorConfig":
        """Fully connected lattice: no reflectors anywhere."""
        return cls(n, np.zeros((n - 1, n), bool), np.zeros((n, n - 1), bool))

    @classmethod
    def full(cls, n: int) -> "ReflectorConfig":
        """Every interior edge blocked by a reflector."""
        return cls(n, np.ones((n - 1, n), bool), np.ones((n, n - 1), bool))

    def reflector_count(self) -> int:
        return int(self.h_edges.sum() + self.v_edges.sum())

    def edge_count(self) -> int:
        return 2 * self.n * (self.n - 1)

    def open_fraction(self) -> float:
        """Measured fraction of interior edges without a reflector."""
        return 1.0 - self.reflector_count() / self.edge_count()

    def transposed(self) -> "ReflectorConfig":
        """Mirror the configuration across the x = y diagonal."""
        return ReflectorConfig(self.n, self.v_edges.T.copy(), self.h_edges.T.copy())


def sample_config(n: int, f: float, rng: np.random.Generator) -> ReflectorConfig:
    """Draw a random reflector configuration.

    Each interior edge independently carries a reflector with probability
    1 - f, where f is the fraction of intact connections.  The generator is
    consumed in a fixed order: one uniform per h-edge in row-major (x outer,
    y inner) order, then one per v-edge in row-major order; an edge is
    flagged iff its draw is >= f.  Identical (n, f, generator state) always
    produce the identical configuration.
    """
    if n < 2:
        raise ValueError(f"lattice size must be >= 2, got {n}")
    if not (0.0 <= f <= 1.0):
        raise ValueError(f"fraction of connections must be in [0, 1], got {f}")
    h = rng.random((n - 1, n)) >= f
    v = rng.random((n, n - 1)) >= f
    return ReflectorConfig(n, h, v)


@dataclass(frozen=True)
class BoundarySpec:
    """What happens to photon amplitude leaving the lattice.

    absorb_all       every outgoing arm ends on an absorbing detector.
    reflect_injection_sides(exit_site)
                     arms leaving through the x=1 and y=1 sides are fed
                     back by boundary reflectors, except the backward arms
                     at exit_site which stay absorbing; the x=N and y=N
                     sides absorb.
    all_reflect      every outgoing arm reflects; closed-system diagnostic.
    """

    model: str
    exit_site: Site | None = None

    _MODELS = ("absorb-all", "reflect-injection-sides", "all-reflect")

    def __post_init__(self):
        if self.model not in self._MODELS:
            raise ValueError(f"unknown boundary model {self.model!r}")
        if self.model == "reflect-injection-sides":
            if self.exit_site is None:
                raise ValueError("reflect-injection-sides requires an exit site")
            object.__setattr__(self, "exit_site", Site(*self.exit_site))
        elif self.exit_site is not None:
            raise ValueError(f"{self.model} takes no exit site")

    @classmethod
    def absorb_all(cls) -> "BoundarySpec":
        return cls("absorb-all")

    @classmethod
    def reflect_injection_sides(cls, exit_site: tuple[int, int]) -> "BoundarySpec":
        return cls("reflect-injection-sides", Site(*exit_site))

    @classmethod
    def all_reflect(cls) -> "BoundarySpec":
        return cls("all-reflect")

    def reflect_vectors(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Per-arm reflect/absorb choice for the four boundary sides.

        Returns boolean arrays (right, top, left, bottom), each of length n,
        indexed by the 0-based coordinate running along that side; True
        means the outgoing arm is reflected back.
        """
        no = np.zeros(n, np.bool_)
        yes = np.ones(n, np.bool_)
        if self.model == "absorb-all":
            return no, no.copy(), no.copy(), no.copy()
        if self.model == "all-reflect":
            return yes, yes.copy(), yes.copy(), yes.copy()
        ex, ey = self.exit_site
        left = np.ones(n, np.bool_)
        bottom = np.ones(n, np.bool_)
        if ex == 1:
            left[ey - 1] = False
        if ey == 1:
            bottom[ex - 1] = False
        return no, no.copy(), left, bottom


class ArmKind(enum.Enum):
    OPEN_INTERIOR = "open-interior"
    REFLECTOR_INTERIOR = "reflector-interior"
    BOUNDARY_ABSORB = "boundary-absorb"
    BOUNDARY_REFLECT = "boundary-reflect"


@dataclass(frozen=True)
class ArmStatus:
    kind: ArmKind
    neighbor: Site | None = None   # set for OPEN_INTERIOR
    side: str | None = None        # set for boundary arms


def arm_status(
    config: ReflectorConfig, boundary: BoundarySpec, site: tuple[int, int], mode: Mode
) -> ArmStatus:
    """Classify the arm leaving `site` in direction `mode`.

    Interior arms report the shared edge flag (both endpoints of an edge see
    the same flag through their opposite modes); arms leaving the lattice
    follow the boundary rule.  Pure and deterministic.
    """
    n = config.n
    x, y = _check_site(n, site)
    dx, dy = mode.direction
    nx, ny = x + dx, y + dy
    if 1 <= nx <= n and 1 <= ny <= n:
        if dx != 0:
            flagged = config.h_edges[min(x, nx) - 1, y - 1]
        else:
            flagged = config.v_edges[x - 1, min(y, ny) - 1]
        if flagged:
            return ArmStatus(ArmKind.REFLECTOR_INTERIOR)
        return ArmStatus(ArmKind.OPEN_INTERIOR, neighbor=Site(nx, ny))
    side = mode.exit_side
    right, top, left, bottom = boundary.reflect_vectors(n)
    along = {SIDE_RIGHT: y, SIDE_TOP: x, SIDE_LEFT: y, SIDE_BOTTOM: x}[side] - 1
    reflects = {SIDE_RIGHT: right, SIDE_TOP: top, SIDE_LEFT: left, SIDE_BOTTOM: bottom}[side][along]
    if reflects:
        return ArmStatus(ArmKind.BOUNDARY_REFLECT, side=side)
    return ArmStatus(ArmKind.BOUNDARY_ABSORB, side=side)


def save_config(config: ReflectorConfig, path) -> None:
    """Write a configuration as diff-friendly plain text.

    Line 1 is ``n=<N>``; every interior edge follows as ``h x y 0|1`` or
    ``v x y 0|1`` (h block first, row-major, then the v block).
    """
    with open(path, "w") as fh:
        fh.write(f"n={config.n}\n")
        for x in range(1, config.n):
            for y in range(1, config.n + 1):
                fh.write(f"h {x} {y} {int(config.h_edges[x - 1, y - 1])}\n")
        for x in range(1, config.n + 1):
            for y in range(1, config.n):
                fh.write(f"v {x} {y} {int(config.v_edges[x - 1, y - 1])}\n")


def load_config(path) -> ReflectorConfig:
    """Read a configuration written by save_config.

    Missing edge lines default to 0 (no reflector); malformed lines,
    out-of-range coordinates, duplicate edges, or n < 2 raise ValueError.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("n="):
        raise ValueError("config file must start with an 'n=<N>' line")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise ValueError(f"unparseable lattice size line {lines[0]!r}") from None
    if n < 2:
        raise ValueError(f"lattice size must be >= 2, got {n}")
    h = np.zeros((n - 1, n), bool)
    v = np.zeros((n, n - 1), bool)
    seen: set[tuple[str, int, int]] = set()
    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ("h", "v") or parts[3] not in ("0", "1"):
            raise ValueError(f"line {ln}: malformed edge line {raw!r}")
        try:
            kind, x, y, flag = parts[0], int(parts[1]), int(parts[2]), parts[3] == "1"
        except ValueError:
            raise ValueError(f"line {ln}: malformed edge line {raw!r}") from None
        xmax, ymax = (n - 1, n) if kind == "h" else (n, n - 1)
        if not (1 <= x <= xmax and 1 <= y <= ymax):
            raise ValueError(f"line {ln}: edge {kind} {x} {y} outside an n={n} lattice")
        if (kind, x, y) in seen:
            raise ValueError(f"line {ln}: duplicate edge {kind} {x} {y}")
        seen.add((kind, x, y))
        (h if kind == "h" else v)[x - 1, y - 1] = flag
    return ReflectorConfig(n, h, v)


def open_cluster(config: ReflectorConfig, origin: tuple[int, int]) -> tuple[set[Site], bool]:
    """Connected component of `origin` through reflector-free interior edges.

    Returns the set of member sites and whether any of them lies on the
    lattice boundary (x or y equal to 1 or N).
    """
    n = config.n
    origin = _check_site(n, origin)
    h, v = config.h_edges, config.v_edges
    seen = {origin}
    queue = deque([origin])
    touches = _on_boundary(origin, n)
    while queue:
        x, y = queue.popleft()
        neighbors = []
        if x < n and not h[x - 1, y - 1]:
            neighbors.append(Site(x + 1, y))
        if x > 1 and not h[x - 2, y - 1]:
            neighbors.append(Site(x - 1, y))
        if y < n and not v[x - 1, y - 1]:
            neighbors.append(Site(x, y + 1))
        if y > 1 and not v[x - 1, y - 2]:
            neighbors.append(Site(x, y - 1))
        for s in neighbors:
            if s not in seen:
                seen.add(s)
                touches = touches or _on_boundary(s, n)
                queue.append(s)
    return seen, touches


def _on_boundary(site: Site, n: int) -> bool:
    return site.x in (1, n) or site.y in (1, n)
