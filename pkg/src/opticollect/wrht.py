"""Wavelength-reused hierarchical tree (WRHT) all-reduce.

Reduce stage: the active nodes are cut into contiguous groups of ``m``
along the ring and every member sends its partial sum to the group's middle
node. Group middles become the active set of the next level. The recursion
stops when one node is left, or when the surviving representatives can all
exchange their data in a single all-to-all step with the available
wavelengths. The broadcast stage replays the reduce levels backwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .ring import CCW, CW, ceil_log
from .rwa import a2a_wavelength_bound
from .schedule import AlgorithmId, Schedule, Stage, Step


@dataclass(frozen=True)
class Group:
    members: tuple[int, ...]
    representative: int

    def __post_init__(self):
        if self.representative not in self.members:
            raise DomainError("representative must be a group member")


@dataclass(frozen=True)
class WrhtPlan:
    levels: tuple[tuple[Group, ...], ...]
    terminal_all2all: bool
    m: int
    step_count: int

    @property
    def representatives(self) -> tuple[int, ...]:
        """Nodes left active after the last grouping level."""
        if not self.levels:
            return ()
        return tuple(g.representative for g in self.levels[-1])

    @property
    def reduce_levels(self) -> int:
        return len(self.levels) + int(self.terminal_all2all)


def choose_group_size(w: int) -> int:
    """Largest group one step can drain with ``w`` wavelengths per direction."""
    if w < 1:
        raise DomainError(f"need at least one wavelength, got {w}")
    return 2 * w + 1


def partition_level(active, m: int) -> list[Group]:
    """Split ``active`` (ring order) into consecutive groups of at most ``m``.

    Only the last group may be short. The representative of a ``k``-member
    group is the member at position ``(k - 1) // 2``.
    """
    if m < 2:
        raise DomainError(f"group size must be >= 2, got {m}")
    active = list(active)
    if not active:
        raise DomainError("cannot partition an empty node list")
    groups = []
    for start in range(0, len(active), m):
        members = tuple(active[start:start + m])
        groups.append(Group(members, members[(len(members) - 1) // 2]))
    return groups


def all2all_feasible(r: int, w: int) -> bool:
    if r < 1:
        raise DomainError(f"representative count must be >= 1, got {r}")
    return r >= 2 and a2a_wavelength_bound(r) <= w


def wrht_step_count(n_nodes: int, w: int, allow_all2all: bool = True) -> int:
    """Closed-form step count, equal to the length of :func:`build_wrht`'s schedule."""
    if n_nodes < 2:
        raise DomainError(f"need at least 2 nodes, got {n_nodes}")
    m = choose_group_size(w)
    levels = ceil_log(n_nodes, m)
    survivors = -(-n_nodes // m ** (levels - 1))
    if allow_all2all and all2all_feasible(survivors, w):
        return 2 * levels - 1
    return 2 * levels


def _collect_step(index: int, n_nodes: int, groups: list[Group]) -> Step:
    src, dst, direction = [], [], []
    for group in groups:
        rep = group.representative
        ahead = False
        for node in group.members:
            if node == rep:
                ahead = True
                continue
            src.append(node)
            dst.append(rep)
            direction.append(int(CCW if ahead else CW))
    return Step.from_arrays(index, Stage.REDUCE, n_nodes, src, dst, direction)


def all_to_all_step(index: int, n_nodes: int, nodes) -> Step:
    """Every node in ``nodes`` (ring order) sends to every other one.

    Targets less than half-way round go clockwise, the rest counterclockwise.
    For an even count the two transfers between antipodal nodes travel the
    same way round, so together they cover the ring once; pairs alternate
    between clockwise and counterclockwise. The busiest link then carries
    ``ceil(r**2 / 8)`` transfers.
    """
    nodes = list(nodes)
    r = len(nodes)
    half = r // 2
    src, dst, direction = [], [], []
    for i, node in enumerate(nodes):
        for offset in range(1, r):
            src.append(node)
            dst.append(nodes[(i + offset) % r])
            if 2 * offset < r or (2 * offset == r and (i % half) % 2 == 0):
                direction.append(int(CW))
            else:
                direction.append(int(CCW))
    return Step.from_arrays(index, Stage.ALL2ALL, n_nodes, src, dst, direction)


def plan_wrht(n_nodes: int, w: int, allow_all2all: bool = True) -> WrhtPlan:
    if n_nodes < 2:
        raise DomainError(f"need at least 2 nodes, got {n_nodes}")
    m = choose_group_size(w)
    active = list(range(n_nodes))
    levels = []
    terminal = False
    while len(active) > 1:
        if allow_all2all and all2all_feasible(len(active), w):
            terminal = True
            break
        groups = partition_level(active, m)
        levels.append(tuple(groups))
        active = [g.representative for g in groups]
    steps = 2 * (len(levels) + int(terminal)) - int(terminal)
    return WrhtPlan(tuple(levels), terminal, m, steps)


def build_wrht(n_nodes: int, w: int, allow_all2all: bool = True, *,
               payload_unit: float = 1.0) -> tuple[Schedule, WrhtPlan]:
    """Construct the WRHT schedule; every transfer carries the full vector."""
    plan = plan_wrht(n_nodes, w, allow_all2all)
    reduce_steps = [_collect_step(i, n_nodes, list(groups)) for i, groups in enumerate(plan.levels)]
    steps = list(reduce_steps)
    if plan.terminal_all2all:
        survivors = plan.representatives or tuple(range(n_nodes))
        steps.append(all_to_all_step(len(steps), n_nodes, survivors))
    for step in reversed(reduce_steps):
        steps.append(step.reversed(len(steps)))
    schedule = Schedule(
        AlgorithmId.WRHT, n_nodes, steps, payload_unit=payload_unit,
        meta={"m": plan.m, "w": w, "allow_all2all": allow_all2all},
    )
    return schedule, plan


def group_rows(step: Step, groups) -> list[np.ndarray]:
    """Row indices of ``step`` belonging to each group of a collect/scatter step."""
    rows = []
    for group in groups:
        members = np.fromiter(group.members, dtype=np.int64)
        rows.append(np.flatnonzero(np.isin(step.src, members) & np.isin(step.dst, members)))
    return rows
