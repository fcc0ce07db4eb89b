"""All-reduce schedules on a WDM optical ring: construction, wavelength assignment and timing."""

from .analysis import (
    CostModel,
    TimingReport,
    Verdict,
    comm_time,
    electrical_time,
    lower_bound_steps,
    lower_bound_time,
    reduce_stage_only,
    simulate_time,
    verify_allreduce,
)
from .baselines import (
    HRingParams,
    analytic_steps,
    build_bt,
    build_hring,
    build_rd,
    build_ring,
    build_schedule,
    hring_formula,
)
from .errors import DomainError, EmptyPathError, IncompleteAssignment, WavelengthExhausted
from .ring import (
    CCW,
    CW,
    WORKLOADS,
    Direction,
    FatTreeParams,
    LinkSegment,
    RingTopology,
    Workload,
    arc_path,
    ceil_log,
    get_workload,
    payload_bits,
    ring_distance,
    shortest_direction,
)
from .rwa import (
    Conflict,
    a2a_wavelength_bound,
    assign_first_fit,
    assign_schedule,
    conflict_check,
    group_wavelength_demand,
    schedule_conflicts,
    wavelength_usage,
)
from .schedule import AlgorithmId, Schedule, Stage, Step, Transfer
from .wrht import (
    Group,
    WrhtPlan,
    all_to_all_step,
    build_wrht,
    choose_group_size,
    partition_level,
    plan_wrht,
    wrht_step_count,
)
