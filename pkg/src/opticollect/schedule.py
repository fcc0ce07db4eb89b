"""Communication plans: transfers grouped into steps grouped into schedules.

A :class:`Step` stores its transfers column-wise in numpy arrays so that
schedules with millions of transfers (ring all-reduce on thousands of nodes)
stay cheap to build, assign and verify. :attr:`Step.transfers` materializes
them as :class:`Transfer` records on demand.

Payloads are expressed as a fraction of the per-node vector size ``d``; a
transfer carrying ``d/N`` has ``payload == 1/N``.

Data lanes: the reduced vector is split into ``Schedule.n_lanes`` equal lanes
so chunked algorithms can be verified per lane. A transfer carries the
contiguous lane range ``[lane_lo, lane_hi)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .ring import Direction


class Stage(str, enum.Enum):
    REDUCE = "reduce"
    ALL2ALL = "all2all"
    BROADCAST = "broadcast"


class AlgorithmId(str, enum.Enum):
    WRHT = "wrht"
    RING = "ring"
    HRING = "hring"
    BT = "bt"
    RD = "rd"


@dataclass(frozen=True)
class Transfer:
    src: int
    dst: int
    direction: Direction
    fiber: int = 0
    wavelength: int | None = None
    payload: float = 1.0
    lanes: tuple[int, int] | None = None  # None: every lane

    def __post_init__(self):
        if self.src == self.dst:
            raise DomainError(f"transfer from node {self.src} to itself")
        if not self.payload > 0:
            raise DomainError("transfer payload must be positive")


_INT_COLUMNS = ("src", "dst", "direction", "fiber", "lane_lo", "lane_hi")


@dataclass(frozen=True, eq=False)
class Step:
    """One communication round: all transfers run concurrently."""

    index: int
    stage: Stage
    n_nodes: int
    src: np.ndarray
    dst: np.ndarray
    direction: np.ndarray
    fiber: np.ndarray
    payload: np.ndarray
    lane_lo: np.ndarray
    lane_hi: np.ndarray
    wavelength: np.ndarray | None = None

    def __post_init__(self):
        sizes = {len(getattr(self, c)) for c in _INT_COLUMNS + ("payload",)}
        if self.wavelength is not None:
            sizes.add(len(self.wavelength))
        if len(sizes) != 1:
            raise DomainError("step columns have different lengths")
        if len(self.src) and (np.any(self.src == self.dst)):
            raise DomainError("step contains a transfer from a node to itself")
        if len(self.src) and not np.all(self.payload > 0):
            raise DomainError("transfer payload must be positive")
        for name in _INT_COLUMNS + ("payload",):
            getattr(self, name).flags.writeable = False
        if self.wavelength is not None:
            self.wavelength.flags.writeable = False

    @classmethod
    def from_arrays(cls, index: int, stage: Stage, n_nodes: int, src, dst, direction,
                    *, fiber=0, payload=1.0, lane_lo=0, lane_hi=1, wavelength=None) -> Step:
        """Build a step from columns; scalars broadcast to the column length."""
        src = np.asarray(src, dtype=np.int64)
        size = len(src)

        def column(value, dtype):
            arr = np.asarray(value, dtype=dtype)
            if arr.ndim == 0:
                arr = np.full(size, arr, dtype=dtype)
            return arr

        return cls(
            index=index,
            stage=Stage(stage),
            n_nodes=n_nodes,
            src=src,
            dst=column(dst, np.int64),
            direction=column(direction, np.int8),
            fiber=column(fiber, np.int8),
            payload=column(payload, np.float64),
            lane_lo=column(lane_lo, np.int32),
            lane_hi=column(lane_hi, np.int32),
            wavelength=None if wavelength is None else column(wavelength, np.int64),
        )

    @classmethod
    def from_transfers(cls, index: int, stage: Stage, n_nodes: int,
                       transfers: Iterable[Transfer], n_lanes: int = 1) -> Step:
        transfers = list(transfers)
        lanes = [t.lanes or (0, n_lanes) for t in transfers]
        assigned = [t.wavelength for t in transfers]
        if all(wl is not None for wl in assigned) and transfers:
            wavelength = assigned
        elif any(wl is not None for wl in assigned):
            wavelength = [-1 if wl is None else wl for wl in assigned]
        else:
            wavelength = None
        return cls.from_arrays(
            index, stage, n_nodes,
            [t.src for t in transfers],
            [t.dst for t in transfers],
            [int(t.direction) for t in transfers],
            fiber=[t.fiber for t in transfers],
            payload=[t.payload for t in transfers],
            lane_lo=[lo for lo, _ in lanes],
            lane_hi=[hi for _, hi in lanes],
            wavelength=wavelength,
        )

    def __len__(self) -> int:
        return len(self.src)

    @property
    def hops(self) -> np.ndarray:
        return ((self.dst - self.src) * self.direction.astype(np.int64)) % self.n_nodes

    @property
    def is_assigned(self) -> bool:
        return self.wavelength is not None and not np.any(self.wavelength < 0)

    @property
    def transfers(self) -> list[Transfer]:
        wl = self.wavelength
        return [
            Transfer(
                int(self.src[i]), int(self.dst[i]), Direction(int(self.direction[i])),
                int(self.fiber[i]),
                None if wl is None or wl[i] < 0 else int(wl[i]),
                float(self.payload[i]),
                (int(self.lane_lo[i]), int(self.lane_hi[i])),
            )
            for i in range(len(self))
        ]

    def geometry_key(self) -> tuple:
        """Hashable summary of routing, identical for steps with identical arcs."""
        return (self.n_nodes, self.src.tobytes(), self.dst.tobytes(),
                self.direction.tobytes(), self.fiber.tobytes())

    def with_wavelengths(self, wavelength) -> Step:
        return replace(self, wavelength=np.asarray(wavelength, dtype=np.int64))

    def with_index(self, index: int) -> Step:
        return replace(self, index=index)

    def reversed(self, index: int, stage: Stage = Stage.BROADCAST) -> Step:
        """The mirror step: every transfer runs backwards along the same arc."""
        return replace(self, index=index, stage=Stage(stage), src=self.dst, dst=self.src,
                       direction=(-self.direction).astype(np.int8), wavelength=None)


@dataclass(frozen=True, eq=False)
class Schedule:
    algorithm: AlgorithmId
    n_nodes: int
    steps: Sequence[Step]
    payload_unit: float = 1.0
    n_lanes: int = 1
    n_wavelengths: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.steps:
            raise DomainError("schedule has no steps")
        for i, step in enumerate(self.steps):
            if step.index != i:
                raise DomainError(f"step {i} carries index {step.index}")
            if step.n_nodes != self.n_nodes:
                raise DomainError(f"step {i} is sized for {step.n_nodes} nodes")

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def is_assigned(self) -> bool:
        return all(step.is_assigned for step in self.steps)

    def stage_steps(self, stage: Stage) -> list[Step]:
        return [s for s in self.steps if s.stage == stage]

    def with_steps(self, steps: Sequence[Step], **changes) -> Schedule:
        """Copy with new steps, renumbered from zero."""
        steps = [s if s.index == i else s.with_index(i) for i, s in enumerate(steps)]
        return replace(self, steps=steps, **changes)

    def without_step(self, index: int) -> Schedule:
        if not 0 <= index < self.n_steps:
            raise DomainError(f"no step {index} in a {self.n_steps}-step schedule")
        return self.with_steps([s for s in self.steps if s.index != index])

    def to_dict(self) -> dict:
        """JSON-ready form with payloads converted to bits."""
        return {
            "algorithm": self.algorithm.value,
            "n_nodes": self.n_nodes,
            "payload_unit_bits": self.payload_unit,
            "steps": [
                {
                    "index": step.index,
                    "stage": step.stage.value,
                    "transfers": [
                        {
                            "src": t.src,
                            "dst": t.dst,
                            "direction": "cw" if t.direction == Direction.CLOCKWISE else "ccw",
                            "fiber": t.fiber,
                            "wavelength": t.wavelength,
                            "payload_bits": t.payload * self.payload_unit,
                        }
                        for t in step.transfers
                    ],
                }
                for step in self.steps
            ],
        }

