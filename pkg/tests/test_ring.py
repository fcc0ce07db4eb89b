import pytest
from hypothesis import given
from hypothesis import strategies as st

from opticollect import (
    CCW,
    CW,
    Direction,
    DomainError,
    EmptyPathError,
    FatTreeParams,
    RingTopology,
    Workload,
    arc_path,
    ceil_log,
    get_workload,
    payload_bits,
    ring_distance,
    shortest_direction,
)


def walk(n, src, dst, step):
    """Count hops by literally stepping round the ring."""
    hops, node = 0, src
    while node != dst:
        node = (node + step) % n
        hops += 1
    return hops


@st.composite
def ring_pair(draw, max_n=60):
    n = draw(st.integers(2, max_n))
    src = draw(st.integers(0, n - 1))
    dst = draw(st.integers(0, n - 1).filter(lambda d: d != src))
    return n, src, dst


@given(ring_pair(), st.sampled_from([CW, CCW]))
def test_ring_distance_matches_walk(case, direction):
    n, src, dst = case
    assert ring_distance(n, src, dst, direction) == walk(n, src, dst, int(direction))


@given(ring_pair(), st.sampled_from([CW, CCW]))
def test_arc_path_is_contiguous_and_ends_at_dst(case, direction):
    n, src, dst = case
    path = arc_path(RingTopology(n, 4), src, dst, direction)
    assert len(path) == walk(n, src, dst, int(direction))
    assert path[0].src == src and path[-1].dst == dst
    for a, b in zip(path, path[1:]):
        assert a.dst == b.src
    assert all(seg.direction == direction for seg in path)


def test_arc_path_errors():
    topo = RingTopology(8, 2)
    with pytest.raises(EmptyPathError):
        arc_path(topo, 3, 3, CW)
    with pytest.raises(DomainError):
        arc_path(topo, 0, 8, CW)
    with pytest.raises(DomainError):
        arc_path(topo, 0, 1, CW, fiber=2)


@given(ring_pair())
def test_shortest_direction(case):
    n, src, dst = case
    direction, hops = shortest_direction(RingTopology(n, 1), src, dst)
    cw, ccw = walk(n, src, dst, 1), walk(n, src, dst, -1)
    assert hops == min(cw, ccw)
    if cw == ccw:
        assert direction is CW


def test_shortest_direction_tie_goes_clockwise():
    assert shortest_direction(RingTopology(8, 1), 1, 5) == (CW, 4)
    assert shortest_direction(RingTopology(8, 1), 5, 1) == (CW, 4)


@given(st.integers(1, 10**7), st.integers(2, 300))
def test_ceil_log_against_brute_force(n, base):
    level = ceil_log(n, base)
    assert base**level >= n
    if level:
        assert base ** (level - 1) < n


def test_ceil_log_exact_powers():
    assert ceil_log(129**2, 129) == 2
    assert ceil_log(129**2 + 1, 129) == 3
    assert ceil_log(1, 5) == 0
    with pytest.raises(DomainError):
        ceil_log(0, 3)
    with pytest.raises(DomainError):
        ceil_log(5, 1)


def test_direction_opposite():
    assert CW.opposite is CCW
    assert Direction(-1) is CCW


@pytest.mark.parametrize("kwargs", [
    {"n_nodes": 1, "n_wavelengths": 4},
    {"n_nodes": 4, "n_wavelengths": 0},
    {"n_nodes": 4, "n_wavelengths": 4, "fibers_per_direction": 0},
    {"n_nodes": 4, "n_wavelengths": 4, "bandwidth_per_wavelength": 0},
    {"n_nodes": 4, "n_wavelengths": 4, "reconfig_delay": -1},
])
def test_topology_rejects_bad_parameters(kwargs):
    with pytest.raises(DomainError):
        RingTopology(**kwargs)


def test_fat_tree_defaults():
    ft = FatTreeParams()
    assert ft.hops == 4
    assert ft.link_bandwidth == 25e9 and ft.router_delay == 50e-6
    with pytest.raises(DomainError):
        FatTreeParams(router_delay=0)


def test_workloads():
    assert payload_bits(get_workload("resnet50")) == 25_000_000 * 32
    assert payload_bits(get_workload("VGG16")) == 138_000_000 * 32
    assert get_workload("GoogLeNet").param_count == 6_797_700
    with pytest.raises(DomainError):
        get_workload("bert")
    with pytest.raises(DomainError):
        Workload("empty", 0)
