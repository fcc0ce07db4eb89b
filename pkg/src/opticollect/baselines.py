"""Baseline all-reduce schedules and closed-form step counts.

Ring
    Chunked reduce-scatter then all-gather, ``N - 1`` steps each; every
    node forwards one ``d/N`` chunk clockwise per step.
BT
    Binary tree: ``ceil(log2 N)`` reduce steps toward node 0, mirrored.
HRing
    Hierarchical ring over groups of ``g`` consecutive nodes: intra-group
    reduce-scatter, a ring all-reduce per chunk lane across group leaders,
    intra-group all-gather.
RD
    Recursive doubling with full-vector exchanges; extra nodes beyond the
    largest power of two are folded in before and served after.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .ring import CCW, CW, ceil_log
from .schedule import AlgorithmId, Schedule, Stage, Step
from .wrht import build_wrht, wrht_step_count


@dataclass(frozen=True)
class HRingParams:
    g: int

    def validate(self, n_nodes: int) -> None:
        if self.g < 2:
            raise DomainError(f"H-Ring group size must be >= 2, got {self.g}")
        if n_nodes % self.g:
            raise DomainError(f"H-Ring group size {self.g} does not divide N={n_nodes}")
        if n_nodes // self.g < 2:
            raise DomainError(f"H-Ring needs at least two groups (N={n_nodes}, g={self.g})")


def _check_nodes(n_nodes: int) -> None:
    if n_nodes < 2:
        raise DomainError(f"need at least 2 nodes, got {n_nodes}")


def hring_formula(n_nodes: int, g: int, w: int) -> Fraction:
    """Closed-form H-Ring step count ``2(g^2 + N)/g + ceil(g/w) - 4``, exactly."""
    return Fraction(2 * (g * g + n_nodes), g) + (-(-g // w)) - 4


def analytic_steps(alg: AlgorithmId | str, n_nodes: int, w: int = 64, g: int | None = None,
                   allow_all2all: bool = True) -> int:
    """Step count predicted by each algorithm's formula.

    A fractional H-Ring value (``g`` not dividing ``N``) is rounded up with a
    warning.
    """
    alg = AlgorithmId(alg)
    _check_nodes(n_nodes)
    if w < 1:
        raise DomainError(f"need at least one wavelength, got {w}")
    log2 = ceil_log(n_nodes, 2)
    if alg is AlgorithmId.RING:
        return 2 * (n_nodes - 1)
    if alg is AlgorithmId.BT:
        return 2 * log2
    if alg is AlgorithmId.RD:
        if n_nodes & (n_nodes - 1) == 0:
            return log2
        return (n_nodes.bit_length() - 1) + 2
    if alg is AlgorithmId.WRHT:
        return wrht_step_count(n_nodes, w, allow_all2all)
    if g is None or g < 2:
        raise DomainError("H-Ring needs a group size g >= 2")
    if g > n_nodes:
        raise DomainError(f"H-Ring group size {g} exceeds N={n_nodes}")
    value = hring_formula(n_nodes, g, w)
    if value.denominator != 1:
        warnings.warn(f"H-Ring formula gives {value} for N={n_nodes}, g={g}; rounding up",
                      stacklevel=2)
    return -(-value.numerator // value.denominator)


def build_ring(n_nodes: int, *, payload_unit: float = 1.0) -> Schedule:
    _check_nodes(n_nodes)
    src = np.arange(n_nodes)
    dst = (src + 1) % n_nodes
    share = 1.0 / n_nodes
    steps = []
    for s in range(n_nodes - 1):
        chunk = (src - s) % n_nodes
        steps.append(Step.from_arrays(s, Stage.REDUCE, n_nodes, src, dst, CW,
                                      payload=share, lane_lo=chunk, lane_hi=chunk + 1))
    for s in range(n_nodes - 1):
        chunk = (src + 1 - s) % n_nodes
        steps.append(Step.from_arrays(len(steps), Stage.BROADCAST, n_nodes, src, dst, CW,
                                      payload=share, lane_lo=chunk, lane_hi=chunk + 1))
    return Schedule(AlgorithmId.RING, n_nodes, steps, payload_unit=payload_unit,
                    n_lanes=n_nodes)


def build_bt(n_nodes: int, *, payload_unit: float = 1.0) -> Schedule:
    """Binary tree; at level ``i`` node ``head + 2**(i-1)`` sends to ``head``."""
    _check_nodes(n_nodes)
    reduce_steps = []
    span = 2
    while span // 2 < n_nodes:
        heads = np.arange(0, n_nodes, span)
        senders = heads + span // 2
        keep = senders < n_nodes
        reduce_steps.append(Step.from_arrays(len(reduce_steps), Stage.REDUCE, n_nodes,
                                             senders[keep], heads[keep], CCW))
        span *= 2
    steps = list(reduce_steps)
    for step in reversed(reduce_steps):
        steps.append(step.reversed(len(steps)))
    return Schedule(AlgorithmId.BT, n_nodes, steps, payload_unit=payload_unit)


def build_hring(n_nodes: int, g: int, w: int, *, payload_unit: float = 1.0) -> Schedule:
    """Hierarchical ring all-reduce over ``N/g`` groups of ``g`` nodes.

    Lanes: chunk ``c`` of the intra-group split is lane range
    ``[c*G, (c+1)*G)`` with ``G = N/g``; the inter-group ring moves single
    lanes of size ``d/N``. When ``g > w`` the ``g`` concurrent inter-group
    rings are split into ``ceil(g/w)`` sub-steps.
    """
    _check_nodes(n_nodes)
    HRingParams(g).validate(n_nodes)
    if w < 1:
        raise DomainError(f"need at least one wavelength, got {w}")
    n_groups = n_nodes // g
    member = np.arange(n_nodes) % g
    head = np.arange(n_nodes) - member
    nxt = head + (member + 1) % g
    # the wrap-around hop of each group ring runs back through the group
    ring_dir = np.where(member == g - 1, int(CCW), int(CW))
    chunk_share = 1.0 / g
    steps = []

    def intra(stage, chunk):
        return Step.from_arrays(len(steps), stage, n_nodes, np.arange(n_nodes), nxt, ring_dir,
                                payload=chunk_share, lane_lo=chunk * n_groups,
                                lane_hi=(chunk + 1) * n_groups)

    for s in range(g - 1):
        steps.append(intra(Stage.REDUCE, (member - s) % g))

    # member j now owns chunk (j+1) % g of its group; ring it across groups
    position = np.arange(n_nodes) // g
    owned = (member + 1) % g
    inter_dst = (np.arange(n_nodes) + g) % n_nodes
    batches = [np.flatnonzero((member // w) == b) for b in range(-(-g // w))]
    for stage, base in ((Stage.REDUCE, 0), (Stage.BROADCAST, 1)):
        for s in range(n_groups - 1):
            sub = (position + base - s) % n_groups
            for rows in batches:
                steps.append(Step.from_arrays(
                    len(steps), stage, n_nodes, rows, inter_dst[rows], CW,
                    payload=1.0 / n_nodes,
                    lane_lo=owned[rows] * n_groups + sub[rows],
                    lane_hi=owned[rows] * n_groups + sub[rows] + 1,
                ))

    for s in range(g - 1):
        steps.append(intra(Stage.BROADCAST, (member + 1 - s) % g))
    return Schedule(AlgorithmId.HRING, n_nodes, steps, payload_unit=payload_unit,
                    n_lanes=n_nodes, meta={"g": g, "w": w})


def _pair_step(index: int, stage: Stage, n_nodes: int, src, dst) -> Step:
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    cw_hops = (dst - src) % n_nodes
    direction = np.where(2 * cw_hops <= n_nodes, int(CW), int(CCW))
    return Step.from_arrays(index, stage, n_nodes, src, dst, direction)


def rd_partner(node: int, distance: int) -> int:
    return node ^ distance


def build_rd(n_nodes: int, *, payload_unit: float = 1.0) -> Schedule:
    """Recursive doubling; transfers take the shorter way round the ring."""
    _check_nodes(n_nodes)
    core = 1 << (n_nodes.bit_length() - 1)
    extra = np.arange(core, n_nodes)
    steps = []
    if len(extra):
        steps.append(_pair_step(0, Stage.REDUCE, n_nodes, extra, extra - core))
    nodes = np.arange(core)
    distance = 1
    while distance < core:
        steps.append(_pair_step(len(steps), Stage.REDUCE, n_nodes, nodes, nodes ^ distance))
        distance *= 2
    if len(extra):
        steps.append(_pair_step(len(steps), Stage.BROADCAST, n_nodes, extra - core, extra))
    return Schedule(AlgorithmId.RD, n_nodes, steps, payload_unit=payload_unit)


def build_schedule(alg: AlgorithmId | str, n_nodes: int, w: int = 64, g: int | None = None,
                   allow_all2all: bool = True, *, payload_unit: float = 1.0) -> Schedule:
    """Dispatch to the generator for ``alg``."""
    alg = AlgorithmId(alg)
    if alg is AlgorithmId.WRHT:
        return build_wrht(n_nodes, w, allow_all2all, payload_unit=payload_unit)[0]
    if alg is AlgorithmId.RING:
        return build_ring(n_nodes, payload_unit=payload_unit)
    if alg is AlgorithmId.BT:
        return build_bt(n_nodes, payload_unit=payload_unit)
    if alg is AlgorithmId.RD:
        return build_rd(n_nodes, payload_unit=payload_unit)
    if g is None:
        raise DomainError("H-Ring needs a group size g")
    return build_hring(n_nodes, g, w, payload_unit=payload_unit)
