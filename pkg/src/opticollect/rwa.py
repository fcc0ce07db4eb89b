"""Routing and wavelength assignment on the WDM ring.

Routes are fixed by the schedule generators (each transfer names its arc);
this module picks wavelengths with first-fit and checks steps for
conflicts. A conflict is two transfers on the same wavelength sharing a
link segment of the same fiber and direction. Opposite directions run on
separate fibers, so a wavelength index can be reused across them freely.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import reduce
from operator import or_

import numpy as np

from .errors import DomainError, IncompleteAssignment, WavelengthExhausted
from .ring import Direction, LinkSegment, RingTopology
from .schedule import Schedule, Step, Transfer


def group_wavelength_demand(k: int) -> int:
    """Wavelengths needed for ``k`` contiguous members to reach a middle representative.

    The representative splits the group into ``floor((k-1)/2)`` senders behind
    it and ``ceil((k-1)/2)`` ahead; every sender on one side crosses the link
    next to the representative, and the two sides use different fibers.
    """
    if k < 1:
        raise DomainError(f"group size must be >= 1, got {k}")
    return -(-(k - 1) // 2)


def a2a_wavelength_bound(r: int) -> int:
    """Wavelengths for all-to-all among ``r`` nodes on a bidirectional ring."""
    if r < 2:
        raise DomainError(f"all-to-all needs at least 2 nodes, got {r}")
    return -(-r * r // 8)


def _link_range(n: int, src: int, hops: int, direction: int) -> tuple[int, int]:
    # clockwise links are indexed by their tail node; counterclockwise ones too,
    # so a ccw arc src -> src-hops covers tails src-hops+1 .. src
    start = src if direction > 0 else (src - hops + 1) % n
    return start, hops


def _slices(masks: list[int], start: int, length: int) -> list[list[int]]:
    end = start + length
    if end <= len(masks):
        return [masks[start:end]]
    return [masks[start:], masks[: end - len(masks)]]


def first_fit_order(step: Step) -> np.ndarray:
    """Processing order for first-fit.

    Arcs through the ring origin (the link leaving node N-1 clockwise) come
    first since they all overlap there; the rest follow by first link, longer
    arcs before shorter, then by (src, dst).
    """
    hops = step.hops
    start = np.where(step.direction > 0, step.src, (step.src - hops + 1) % step.n_nodes)
    wraps = start + hops > step.n_nodes
    return np.lexsort((step.dst, step.src, -hops, start, ~wraps))


def _first_fit(step: Step, topology: RingTopology, use_spare_fibers: bool) -> tuple[np.ndarray, np.ndarray]:
    n = step.n_nodes
    w = topology.n_wavelengths
    n_fibers = topology.fibers_per_direction
    masks: dict[tuple[int, int], list[int]] = {}
    wavelength = np.full(len(step), -1, dtype=np.int64)
    fiber_out = step.fiber.astype(np.int64).copy()
    hops = step.hops
    for i in first_fit_order(step):
        direction = int(step.direction[i])
        start, length = _link_range(n, int(step.src[i]), int(hops[i]), direction)
        first_fiber = int(step.fiber[i])
        fibers = range(first_fiber, n_fibers) if use_spare_fibers else (first_fiber,)
        for fiber in fibers:
            lane = masks.setdefault((direction, fiber), [0] * n)
            used = 0
            for part in _slices(lane, start, length):
                used = reduce(or_, part, used)
            free = (~used & (used + 1)).bit_length() - 1
            if free < w:
                break
        else:
            lane = masks[(direction, first_fiber)]
            load = max(m.bit_count() for part in _slices(lane, start, length) for m in part)
            raise WavelengthExhausted(step.transfers[i], load, w, step.index)
        bit = 1 << free
        for j in range(start, start + length):
            lane[j % n] |= bit
        wavelength[i] = free
        fiber_out[i] = fiber
    return wavelength, fiber_out


def assign_first_fit(step: Step, topology: RingTopology, *, use_spare_fibers: bool = False) -> Step:
    """Give every transfer the lowest wavelength free along its whole arc.

    Transfers are taken in :func:`first_fit_order`. With ``use_spare_fibers`` a
    transfer that finds no wavelength on its fiber moves to the next fiber
    of the same direction instead of failing.

    Raises:
        WavelengthExhausted: the required index would be ``>= w``.
    """
    if step.n_nodes != topology.n_nodes:
        raise DomainError(f"step spans {step.n_nodes} nodes, topology {topology.n_nodes}")
    if len(step) and int(step.fiber.max()) >= topology.fibers_per_direction:
        raise DomainError("transfer fiber index exceeds topology fibers")
    wavelength, fiber = _first_fit(step, topology, use_spare_fibers)
    if np.array_equal(fiber, step.fiber):
        return step.with_wavelengths(wavelength)
    return replace(step, fiber=fiber.astype(np.int8), wavelength=wavelength)


def assign_schedule(schedule: Schedule, topology: RingTopology, *,
                    use_spare_fibers: bool = False) -> Schedule:
    """First-fit every step; steps with identical routing share one assignment."""
    cache: dict[tuple, Step] = {}
    steps = []
    for step in schedule.steps:
        key = step.geometry_key()
        if key not in cache:
            cache[key] = assign_first_fit(step, topology, use_spare_fibers=use_spare_fibers)
        done = cache[key]
        steps.append(replace(step, fiber=done.fiber, wavelength=done.wavelength))
    return schedule.with_steps(steps, n_wavelengths=topology.n_wavelengths)


@dataclass(frozen=True)
class Conflict:
    first: Transfer
    second: Transfer
    segment: LinkSegment
    wavelength: int


def _expand_links(step: Step) -> tuple[np.ndarray, np.ndarray]:
    """(transfer index, link tail node) for every link segment of every arc."""
    hops = step.hops
    owner = np.repeat(np.arange(len(step)), hops)
    offset = np.arange(int(hops.sum())) - np.repeat(np.cumsum(hops) - hops, hops)
    tail = (step.src[owner] + offset * step.direction[owner].astype(np.int64)) % step.n_nodes
    return owner, tail


def conflict_check(step: Step) -> list[Conflict]:
    """All (transfer pair, shared segment) clashes on a common wavelength.

    Raises:
        IncompleteAssignment: some transfer has no wavelength yet.
    """
    if not step.is_assigned:
        raise IncompleteAssignment(f"step {step.index} has unassigned transfers")
    if len(step) < 2:
        return []
    owner, tail = _expand_links(step)
    n = step.n_nodes
    n_fibers = int(step.fiber.max()) + 1
    n_wl = int(step.wavelength.max()) + 1
    channel = (step.direction[owner] > 0).astype(np.int64) * n_fibers + step.fiber[owner]
    key = (channel * n + tail) * n_wl + step.wavelength[owner]
    order = np.argsort(key, kind="stable")
    ordered = key[order]
    clash = np.flatnonzero(ordered[1:] == ordered[:-1])
    if not len(clash):
        return []
    transfers = step.transfers
    conflicts = []
    for p in clash:
        a, b = owner[order[p]], owner[order[p + 1]]
        t = transfers[a]
        u = int(tail[order[p]])
        segment = LinkSegment(u, (u + int(t.direction)) % n, t.direction, t.fiber)
        conflicts.append(Conflict(t, transfers[b], segment, int(t.wavelength)))
    return conflicts


def schedule_conflicts(schedule: Schedule) -> dict[int, list[Conflict]]:
    """Conflicts per step index, omitting clean steps."""
    seen: dict[tuple, list[Conflict]] = {}
    found = {}
    for step in schedule.steps:
        if not step.is_assigned:
            raise IncompleteAssignment(f"step {step.index} has unassigned transfers")
        key = step.geometry_key() + (step.wavelength.tobytes(),)
        if key not in seen:
            seen[key] = conflict_check(step)
        if seen[key]:
            found[step.index] = seen[key]
    return found


def wavelength_usage(step: Step, members=None) -> int:
    """Distinct wavelength indices used by the step (or a subset of its rows)."""
    if not step.is_assigned:
        raise IncompleteAssignment(f"step {step.index} has unassigned transfers")
    wl = step.wavelength if members is None else step.wavelength[members]
    return int(len(np.unique(wl)))


def direction_usage(step: Step, direction: Direction) -> int:
    if not step.is_assigned:
        raise IncompleteAssignment(f"step {step.index} has unassigned transfers")
    return int(len(np.unique(step.wavelength[step.direction == int(direction)])))
