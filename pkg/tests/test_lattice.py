import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bswalk.lattice import (
    ArmKind,
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


def test_mode_opposite_is_involution():
    for m in Mode:
        assert m.opposite.opposite is m
    assert Mode.A.opposite is Mode.C
    assert Mode.B.opposite is Mode.D


def test_mode_directions_and_sectors():
    assert Mode.A.direction == (1, 0)
    assert Mode.B.direction == (0, 1)
    assert Mode.C.direction == (-1, 0)
    assert Mode.D.direction == (0, -1)
    assert Mode.A.is_forward and Mode.B.is_forward
    assert not Mode.C.is_forward and not Mode.D.is_forward


# ---------------------------------------------------------------- sampling

def test_sample_f1_has_no_reflectors():
    cfg = sample_config(4, 1.0, np.random.default_rng(0))
    assert cfg.reflector_count() == 0
    assert cfg.edge_count() == 24


def test_sample_f0_blocks_every_edge():
    cfg = sample_config(4, 0.0, np.random.default_rng(0))
    assert cfg.reflector_count() == 24


def test_sample_counts_follow_binomial_statistics():
    # 2*100*99 = 19800 Bernoulli(0.5) draws per config; per-config sigma is
    # sqrt(19800/4) ~ 70.36, so the mean over 200 seeds must sit within
    # 5 * 70.36/sqrt(200) of 9900.
    m = 200
    counts = [
        sample_config(100, 0.5, np.random.default_rng(seed)).reflector_count()
        for seed in range(m)
    ]
    sigma = np.sqrt(19800 * 0.25)
    assert abs(np.mean(counts) - 9900.0) <= 5 * sigma / np.sqrt(m)


def test_sample_is_deterministic_per_seed():
    a = sample_config(30, 0.6, np.random.default_rng(1234))
    b = sample_config(30, 0.6, np.random.default_rng(1234))
    assert a == b
    c = sample_config(30, 0.6, np.random.default_rng(1235))
    assert a != c


def test_sample_draw_order_is_h_then_v_row_major():
    n, f = 5, 0.37
    cfg = sample_config(n, f, np.random.default_rng(7))
    rng = np.random.default_rng(7)
    h = np.empty((n - 1, n), bool)
    for x in range(n - 1):
        for y in range(n):
            h[x, y] = rng.random() >= f
    v = np.empty((n, n - 1), bool)
    for x in range(n):
        for y in range(n - 1):
            v[x, y] = rng.random() >= f
    assert np.array_equal(cfg.h_edges, h)
    assert np.array_equal(cfg.v_edges, v)


@pytest.mark.parametrize("n,f", [(1, 0.5), (0, 0.5), (4, -0.1), (4, 1.1)])
def test_sample_rejects_bad_inputs(n, f):
    with pytest.raises(ValueError):
        sample_config(n, f, np.random.default_rng(0))


def test_config_arrays_are_frozen():
    cfg = sample_config(4, 0.5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        cfg.h_edges[0, 0] = True


# ---------------------------------------------------------------- arm status

def test_offlattice_arm_absorbs_under_absorb_all():
    n = 6
    cfg = ReflectorConfig.empty(n)
    status = arm_status(cfg, BoundarySpec.absorb_all(), (n, 3), Mode.A)
    assert status.kind is ArmKind.BOUNDARY_ABSORB
    assert status.side == "right"


def test_shared_edge_is_seen_identically_from_both_sides():
    h = np.zeros((5, 6), bool)
    h[1, 4] = True  # edge (2,5)-(3,5)
    cfg = ReflectorConfig(6, h, np.zeros((6, 5), bool))
    b = BoundarySpec.absorb_all()
    assert arm_status(cfg, b, (2, 5), Mode.A).kind is ArmKind.REFLECTOR_INTERIOR
    assert arm_status(cfg, b, (3, 5), Mode.C).kind is ArmKind.REFLECTOR_INTERIOR


def test_injection_side_feedback_spares_only_the_exit_site():
    cfg = ReflectorConfig.empty(8)
    b = BoundarySpec.reflect_injection_sides((1, 1))
    assert arm_status(cfg, b, (1, 7), Mode.C).kind is ArmKind.BOUNDARY_REFLECT
    exit_arm = arm_status(cfg, b, (1, 1), Mode.C)
    assert exit_arm.kind is ArmKind.BOUNDARY_ABSORB
    assert exit_arm.side == "left"
    assert arm_status(cfg, b, (1, 1), Mode.D).kind is ArmKind.BOUNDARY_ABSORB
    assert arm_status(cfg, b, (3, 1), Mode.D).kind is ArmKind.BOUNDARY_REFLECT
    # far sides keep their detectors
    assert arm_status(cfg, b, (8, 2), Mode.A).kind is ArmKind.BOUNDARY_ABSORB
    assert arm_status(cfg, b, (2, 8), Mode.B).kind is ArmKind.BOUNDARY_ABSORB


def test_all_reflect_closes_every_side():
    cfg = ReflectorConfig.empty(3)
    b = BoundarySpec.all_reflect()
    for site, mode in [((3, 2), Mode.A), ((2, 3), Mode.B), ((1, 2), Mode.C), ((2, 1), Mode.D)]:
        assert arm_status(cfg, b, site, mode).kind is ArmKind.BOUNDARY_REFLECT


def test_open_interior_arm_reports_neighbor():
    cfg = ReflectorConfig.empty(4)
    status = arm_status(cfg, BoundarySpec.absorb_all(), (2, 3), Mode.B)
    assert status.kind is ArmKind.OPEN_INTERIOR
    assert status.neighbor == Site(2, 4)


def test_boundary_spec_validation():
    with pytest.raises(ValueError):
        BoundarySpec("absorb-all", Site(1, 1))
    with pytest.raises(ValueError):
        BoundarySpec("reflect-injection-sides")
    with pytest.raises(ValueError):
        BoundarySpec("open-sesame")


@given(
    n=st.integers(2, 6),
    f=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**32 - 1),
    model=st.sampled_from(["absorb-all", "reflect-injection-sides", "all-reflect"]),
)
def test_edge_consistency_exhaustive(n, f, seed, model):
    """Both endpoints of every interior edge must agree on its status."""
    cfg = sample_config(n, f, np.random.default_rng(seed))
    boundary = (
        BoundarySpec.reflect_injection_sides((1, 1))
        if model == "reflect-injection-sides"
        else BoundarySpec(model)
    )
    for x in range(1, n + 1):
        for y in range(1, n + 1):
            for mode in Mode:
                dx, dy = mode.direction
                nx, ny = x + dx, y + dy
                if not (1 <= nx <= n and 1 <= ny <= n):
                    continue
                here = arm_status(cfg, boundary, (x, y), mode)
                there = arm_status(cfg, boundary, (nx, ny), mode.opposite)
                assert here.kind == there.kind
                if here.kind is ArmKind.OPEN_INTERIOR:
                    assert here.neighbor == Site(nx, ny)
                    assert there.neighbor == Site(x, y)


# ---------------------------------------------------------------- file I/O

def test_config_roundtrip(tmp_path):
    cfg = sample_config(10, 0.7, np.random.default_rng(3))
    path = tmp_path / "cfg.txt"
    save_config(cfg, path)
    assert load_config(path) == cfg


def test_load_rejects_too_small_lattice(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("n=1\n")
    with pytest.raises(ValueError, match=">= 2"):
        load_config(p)


def test_load_rejects_out_of_range_edges(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("n=3\nh 3 1 1\n")  # h-edges only go up to x = n-1
    with pytest.raises(ValueError, match="outside"):
        load_config(p)


def test_load_missing_lines_default_to_open(tmp_path):
    p = tmp_path / "sparse.txt"
    p.write_text("n=3\nv 2 1 1\n")
    cfg = load_config(p)
    assert cfg.reflector_count() == 1
    assert cfg.v_edges[1, 0]


def test_load_rejects_malformed_and_duplicate_lines(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("n=3\nh one 1 1\n")
    with pytest.raises(ValueError, match="malformed"):
        load_config(p)
    p.write_text("n=3\nh 1 1 1\nh 1 1 0\n")
    with pytest.raises(ValueError, match="duplicate"):
        load_config(p)
    p.write_text("x=3\n")
    with pytest.raises(ValueError, match="n="):
        load_config(p)


# ---------------------------------------------------------------- clusters

def test_cluster_spans_everything_without_reflectors():
    sites, touches = open_cluster(ReflectorConfig.empty(4), (2, 3))
    assert len(sites) == 16
    assert touches


def test_cluster_is_singleton_when_fully_blocked():
    sites, touches = open_cluster(ReflectorConfig.full(5), (3, 3))
    assert sites == {Site(3, 3)}
    assert not touches
    sites, touches = open_cluster(ReflectorConfig.full(5), (1, 4))
    assert sites == {Site(1, 4)}
    assert touches


def ring_isolated_center() -> ReflectorConfig:
    """4x4 lattice with reflectors cutting the central 2x2 block loose."""
    h = np.zeros((3, 4), bool)
    v = np.zeros((4, 3), bool)
    for y in (2, 3):
        h[0, y - 1] = True   # (1,y)-(2,y)
        h[2, y - 1] = True   # (3,y)-(4,y)
    for x in (2, 3):
        v[x - 1, 0] = True   # (x,1)-(x,2)
        v[x - 1, 2] = True   # (x,3)-(x,4)
    return ReflectorConfig(4, h, v)


def test_ring_isolates_interior_block():
    sites, touches = open_cluster(ring_isolated_center(), (2, 2))
    assert sites == {Site(2, 2), Site(2, 3), Site(3, 2), Site(3, 3)}
    assert not touches


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, s):
        self.parent.setdefault(s, s)
        root = s
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[s] != root:
            self.parent[s], s = root, self.parent[s]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def union_find_cluster(cfg: ReflectorConfig, origin) -> set:
    """Independent cluster oracle: union-find over all open edges."""
    uf = _UnionFind()
    n = cfg.n
    for x in range(1, n + 1):
        for y in range(1, n + 1):
            uf.find((x, y))
            if x < n and not cfg.h_edges[x - 1, y - 1]:
                uf.union((x, y), (x + 1, y))
            if y < n and not cfg.v_edges[x - 1, y - 1]:
                uf.union((x, y), (x, y + 1))
    root = uf.find(tuple(origin))
    return {s for s in uf.parent if uf.find(s) == root}


@given(seed=st.integers(0, 2**32 - 1), f=st.floats(0.1, 0.9),
       ox=st.integers(1, 6), oy=st.integers(1, 6))
def test_cluster_matches_union_find_oracle(seed, f, ox, oy):
    cfg = sample_config(6, f, np.random.default_rng(seed))
    sites, touches = open_cluster(cfg, (ox, oy))
    expected = union_find_cluster(cfg, (ox, oy))
    assert {tuple(s) for s in sites} == expected
    assert touches == any(x in (1, 6) or y in (1, 6) for x, y in expected)
