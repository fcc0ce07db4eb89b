"""Optical ring and electrical fat-tree data model, plus arc routing helpers.

Nodes are numbered 0..N-1 in clockwise order. A clockwise link leaves node
``u`` towards ``u + 1``; a counterclockwise link leaves ``u`` towards ``u - 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DomainError, EmptyPathError


class Direction(enum.IntEnum):
    CLOCKWISE = 1
    COUNTERCLOCKWISE = -1

    @property
    def opposite(self) -> Direction:
        return Direction(-self.value)


CW = Direction.CLOCKWISE
CCW = Direction.COUNTERCLOCKWISE


@dataclass(frozen=True)
class RingTopology:
    """WDM ring of ``n_nodes`` accelerators.

    Each node has one transmitter/receiver set per direction, and every
    direction is served by ``fibers_per_direction`` fibers carrying
    ``n_wavelengths`` channels of ``bandwidth_per_wavelength`` bit/s.
    ``reconfig_delay`` is the fixed per-step overhead in seconds.
    """

    n_nodes: int
    n_wavelengths: int
    fibers_per_direction: int = 2
    bandwidth_per_wavelength: float = 40e9
    reconfig_delay: float = 25e-6

    def __post_init__(self):
        if self.n_nodes < 2:
            raise DomainError(f"ring needs at least 2 nodes, got {self.n_nodes}")
        if self.n_wavelengths < 1:
            raise DomainError(f"need at least one wavelength, got {self.n_wavelengths}")
        if self.fibers_per_direction < 1:
            raise DomainError("fibers_per_direction must be >= 1")
        if not self.bandwidth_per_wavelength > 0:
            raise DomainError("bandwidth_per_wavelength must be positive")
        if self.reconfig_delay < 0:
            raise DomainError("reconfig_delay must be non-negative")

    def check_node(self, node: int) -> None:
        if not 0 <= node < self.n_nodes:
            raise DomainError(f"node {node} outside [0, {self.n_nodes})")


@dataclass(frozen=True)
class LinkSegment:
    src: int
    dst: int
    direction: Direction
    fiber: int = 0


@dataclass(frozen=True)
class FatTreeParams:
    """Electrical baseline: two-level fat-tree of 32-port routers."""

    router_ports: int = 32
    levels: int = 2
    link_bandwidth: float = 25e9
    router_delay: float = 50e-6
    packet_size: int = 64

    def __post_init__(self):
        for name in ("router_ports", "levels", "link_bandwidth", "router_delay", "packet_size"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @property
    def hops(self) -> int:
        # worst-case up-down route through every level
        return 2 * self.levels


@dataclass(frozen=True)
class Workload:
    name: str
    param_count: int
    bytes_per_param: int = 4

    def __post_init__(self):
        if self.param_count <= 0 or self.bytes_per_param <= 0:
            raise DomainError(f"workload {self.name!r} must have a positive payload")


WORKLOADS = {
    "AlexNet": Workload("AlexNet", 62_300_000),
    "VGG16": Workload("VGG16", 138_000_000),
    "ResNet50": Workload("ResNet50", 25_000_000),
    "GoogLeNet": Workload("GoogLeNet", 6_797_700),
}


def get_workload(name: str) -> Workload:
    """Look up a preset by name, case-insensitively."""
    for key, workload in WORKLOADS.items():
        if key.lower() == name.lower():
            return workload
    raise DomainError(f"unknown workload {name!r}; choose from {', '.join(WORKLOADS)}")


def payload_bits(workload: Workload) -> int:
    return workload.param_count * workload.bytes_per_param * 8


def ring_distance(n_nodes: int, src: int, dst: int, direction: Direction) -> int:
    """Hops from ``src`` to ``dst`` travelling in ``direction``."""
    return ((dst - src) * int(direction)) % n_nodes


def arc_path(topology: RingTopology, src: int, dst: int, direction: Direction,
             fiber: int = 0) -> list[LinkSegment]:
    """Link segments traversed from ``src`` to ``dst`` in ``direction``.

    Raises:
        EmptyPathError: if ``src == dst``.
        DomainError: if a node or fiber index is out of range.
    """
    topology.check_node(src)
    topology.check_node(dst)
    if not 0 <= fiber < topology.fibers_per_direction:
        raise DomainError(f"fiber {fiber} outside [0, {topology.fibers_per_direction})")
    if src == dst:
        raise EmptyPathError(f"no path from node {src} to itself")
    direction = Direction(direction)
    n = topology.n_nodes
    step = int(direction)
    segments = []
    node = src
    for _ in range(ring_distance(n, src, dst, direction)):
        nxt = (node + step) % n
        segments.append(LinkSegment(node, nxt, direction, fiber))
        node = nxt
    return segments


def shortest_direction(topology: RingTopology, src: int, dst: int) -> tuple[Direction, int]:
    """Direction with the fewest hops; an exact half-ring tie goes clockwise."""
    topology.check_node(src)
    topology.check_node(dst)
    if src == dst:
        raise DomainError(f"no route from node {src} to itself")
    cw = ring_distance(topology.n_nodes, src, dst, CW)
    ccw = topology.n_nodes - cw
    if cw <= ccw:
        return CW, cw
    return CCW, ccw


def ceil_log(n: int, base: int) -> int:
    """Smallest ``L >= 0`` with ``base**L >= n``, in exact integer arithmetic."""
    if base < 2:
        raise DomainError(f"log base must be >= 2, got {base}")
    if n < 1:
        raise DomainError(f"ceil_log needs n >= 1, got {n}")
    level, reach = 0, 1
    while reach < n:
        reach *= base
        level += 1
    return level
