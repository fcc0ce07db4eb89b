"""Cost models, lower bounds and the symbolic all-reduce verifier."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IncompleteAssignment
from .ring import FatTreeParams, ceil_log
from .schedule import Schedule, Stage
from .wrht import choose_group_size


@dataclass(frozen=True)
class CostModel:
    """Per-wavelength bandwidth ``B`` (bit/s), per-step overhead ``a`` (s), payload ``d`` (bits)."""

    bandwidth_per_wavelength: float = 40e9
    step_overhead: float = 25e-6
    payload: float = 1.0

    def __post_init__(self):
        if not self.bandwidth_per_wavelength > 0:
            raise DomainError("bandwidth must be positive")
        if self.step_overhead < 0:
            raise DomainError("step overhead must be non-negative")
        if not self.payload > 0:
            raise DomainError("payload must be positive")


@dataclass(frozen=True)
class TimingReport:
    algorithm: str
    n_nodes: int
    w: int | None
    steps: int
    total_time: float
    per_step_times: list[float] = field(repr=False)
    lower_bound_steps: int | None = None
    lower_bound_time: float | None = None


def comm_time(steps: int, model: CostModel) -> float:
    """``d*steps/B + a*steps``: every step moves one full payload plus overhead."""
    if steps < 1:
        raise DomainError(f"step count must be >= 1, got {steps}")
    d, b, a = model.payload, model.bandwidth_per_wavelength, model.step_overhead
    return d * steps / b + a * steps


def lower_bound_steps(n_nodes: int, w: int) -> int:
    """``2 * ceil(log_{2w+1} N)`` computed without floating-point logs."""
    if n_nodes < 2:
        raise DomainError(f"need at least 2 nodes, got {n_nodes}")
    return 2 * ceil_log(n_nodes, choose_group_size(w))


def lower_bound_time(n_nodes: int, w: int, model: CostModel) -> float:
    levels = lower_bound_steps(n_nodes, w) // 2
    d, b, a = model.payload, model.bandwidth_per_wavelength, model.step_overhead
    return 2 * d * levels / b + 2 * a * levels


def _report(schedule: Schedule, per_step: list[float], w: int | None,
            model: CostModel | None) -> TimingReport:
    lb_steps = lb_time = None
    if w is not None:
        lb_steps = lower_bound_steps(schedule.n_nodes, w)
        if model is not None:
            lb_time = lower_bound_time(schedule.n_nodes, w, model)
    return TimingReport(schedule.algorithm.value, schedule.n_nodes, w, schedule.n_steps,
                        float(sum(per_step)), per_step, lb_steps, lb_time)


def simulate_time(schedule: Schedule, model: CostModel) -> TimingReport:
    """Optical time: each step costs its largest transfer at ``B`` plus ``a``.

    Conflict freedom is the caller's responsibility; only the presence of
    wavelengths is checked.
    """
    if not schedule.is_assigned:
        raise IncompleteAssignment("schedule needs wavelengths before timing")
    d, b, a = model.payload, model.bandwidth_per_wavelength, model.step_overhead
    per_step = [float(step.payload.max()) * d / b + a for step in schedule.steps]
    w = schedule.n_wavelengths or schedule.meta.get("w")
    return _report(schedule, per_step, w, model)


def electrical_time(schedule: Schedule, params: FatTreeParams, payload: float) -> TimingReport:
    """Fat-tree time: per step ``2*levels`` router delays plus the largest message at link rate."""
    if not payload > 0:
        raise DomainError("payload must be positive")
    if any(step.wavelength is not None for step in schedule.steps):
        warnings.warn("wavelength assignments are ignored on the fat-tree", stacklevel=2)
    latency = params.hops * params.router_delay
    per_step = [latency + float(step.payload.max()) * payload / params.link_bandwidth
                for step in schedule.steps]
    return _report(schedule, per_step, None, None)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    node: int | None = None
    lane: int | None = None
    missing: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        if self.passed:
            return "PASS"
        shown = ", ".join(map(str, self.missing[:8]))
        more = "..." if len(self.missing) > 8 else ""
        return f"FAIL: node {self.node} lane {self.lane} lacks contributions from {shown}{more}"


def _unpack(row: np.ndarray, n_nodes: int) -> np.ndarray:
    bits = np.unpackbits(row.view(np.uint8), bitorder="little")[:n_nodes]
    return np.flatnonzero(bits == 0)


def verify_allreduce(schedule: Schedule, memory_budget: int = 256 * 2**20) -> Verdict:
    """Symbolically execute ``schedule`` and check every node ends with everything.

    Each node starts with the contributor set ``{i}`` on every data lane. A
    transfer merges the sender's sets (as they were at the start of the step)
    into the receiver's for the lanes it carries. The schedule passes when
    every node holds all ``N`` contributors on every lane. Sets are bit-packed
    and lanes are processed in batches that fit ``memory_budget`` bytes.

    Raises:
        DomainError: a transfer names a node outside ``[0, N)``.
    """
    n = schedule.n_nodes
    for step in schedule.steps:
        if len(step) and (min(step.src.min(), step.dst.min()) < 0
                          or max(step.src.max(), step.dst.max()) >= n):
            raise DomainError(f"step {step.index} references a node outside [0, {n})")
    words = (n + 63) // 64
    full = np.full(words, np.uint64(2**64 - 1))
    if n % 64:
        full[-1] = np.uint64((1 << (n % 64)) - 1)
    n_lanes = schedule.n_lanes
    batch = int(max(1, min(n_lanes, memory_budget // (n * words * 8))))
    nodes = np.arange(n)
    seed = np.zeros((n, words), dtype=np.uint64)
    seed[nodes, nodes // 64] = np.left_shift(np.uint64(1), (nodes % 64).astype(np.uint64))

    starts = np.append(np.arange(0, n_lanes, batch), n_lanes)
    # steps whose transfers carry one lane each are pre-sorted by lane so a
    # batch is a contiguous slice of rows
    prepared = []
    for step in schedule.steps:
        order = None
        if len(step) and np.all(step.lane_hi - step.lane_lo == 1):
            order = np.argsort(step.lane_lo, kind="stable").astype(np.int32)
            order = (order, np.searchsorted(step.lane_lo[order], starts))
        distinct = len(np.unique(step.dst)) == len(step)
        prepared.append((order, distinct))

    for k, b0 in enumerate(starts[:-1]):
        b1 = starts[k + 1]
        state = np.broadcast_to(seed, (b1 - b0, n, words)).copy()
        flat = state.reshape(-1, words)
        for step, (order, distinct) in zip(schedule.steps, prepared):
            if order is not None:
                row_of = order[0][order[1][k]:order[1][k + 1]]
                if not len(row_of):
                    continue
                lane = step.lane_lo[row_of] - b0
            else:
                lo = np.maximum(step.lane_lo, b0)
                count = np.minimum(step.lane_hi, b1) - lo
                rows = np.flatnonzero(count > 0)
                if not len(rows):
                    continue
                count = count[rows]
                row_of = np.repeat(rows, count)
                offset = np.arange(len(row_of)) - np.repeat(np.cumsum(count) - count, count)
                lane = np.repeat(lo[rows] - b0, count) + offset
            lane = lane.astype(np.int64) * n
            source = lane + step.src[row_of]
            target = lane + step.dst[row_of]
            carried = flat.take(source, axis=0)
            if distinct:
                carried |= flat.take(target, axis=0)
                flat[target] = carried
            else:
                np.bitwise_or.at(flat, target, carried)
        done = np.all(state == full, axis=2)
        if not done.all():
            lane, node = np.argwhere(~done)[0]
            missing = _unpack(state[lane, node], n)
            return Verdict(False, int(node), int(lane + b0), tuple(int(x) for x in missing))
    return Verdict(True)


def reduce_stage_only(schedule: Schedule) -> Schedule:
    """The schedule without its broadcast steps; the terminal all-to-all is kept."""
    return schedule.with_steps([s for s in schedule.steps if s.stage is not Stage.BROADCAST])
