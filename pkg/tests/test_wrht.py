import pytest
from hypothesis import given
from hypothesis import strategies as st

from opticollect import (
    CCW,
    CW,
    DomainError,
    Stage,
    build_wrht,
    choose_group_size,
    partition_level,
    plan_wrht,
    verify_allreduce,
    wrht_step_count,
)
from oracles import naive_allreduce_holds


def test_fifteen_nodes_two_wavelengths():
    schedule, plan = build_wrht(15, 2, True)
    assert schedule.n_steps == 3
    assert plan.representatives == (2, 7, 12)
    assert [s.stage for s in schedule.steps] == [Stage.REDUCE, Stage.ALL2ALL, Stage.BROADCAST]
    first = schedule.steps[0]
    assert sorted(zip(first.src.tolist(), first.dst.tolist())) == sorted(
        (node, 5 * (node // 5) + 2) for node in range(15) if node % 5 != 2
    )
    all2all = schedule.steps[1]
    assert len(all2all) == 6


def test_two_nodes_is_a_single_exchange():
    schedule, plan = build_wrht(2, 1, True)
    assert schedule.n_steps == 1 and plan.terminal_all2all
    assert sorted(zip(schedule.steps[0].src.tolist(), schedule.steps[0].dst.tolist())) == [(0, 1), (1, 0)]


def test_degenerate_single_group_without_all2all():
    # N <= m but an all-to-all among 3 nodes needs 2 wavelengths
    schedule, plan = build_wrht(3, 1, True)
    assert not plan.terminal_all2all
    assert [s.stage for s in schedule.steps] == [Stage.REDUCE, Stage.BROADCAST]


def test_thousand_nodes_both_branches():
    assert wrht_step_count(1000, 64, False) == 4
    assert wrht_step_count(1000, 64, True) == 3
    assert build_wrht(1000, 64, False)[0].n_steps == 4
    assert build_wrht(1000, 64, True)[0].n_steps == 3


@given(st.integers(2, 3000), st.integers(1, 64), st.booleans())
def test_closed_form_matches_construction(n, w, allow):
    schedule, plan = build_wrht(n, w, allow)
    assert schedule.n_steps == wrht_step_count(n, w, allow) == plan.step_count


@given(st.integers(2, 2000), st.integers(1, 8))
def test_level_sizes(n, w):
    m = choose_group_size(w)
    plan = plan_wrht(n, w, False)
    for i, level in enumerate(plan.levels, start=1):
        assert len(level) == -(-n // m**i)


@given(st.integers(2, 400), st.integers(1, 6))
def test_mirror_property(n, w):
    schedule, plan = build_wrht(n, w, False)
    reduce = schedule.stage_steps(Stage.REDUCE)
    broadcast = schedule.stage_steps(Stage.BROADCAST)
    assert len(reduce) == len(broadcast) == len(plan.levels)
    for r, b in zip(reduce, reversed(broadcast)):
        assert sorted(zip(r.src.tolist(), r.dst.tolist())) == sorted(zip(b.dst.tolist(), b.src.tolist()))
        assert (b.direction == -r.direction).all()


@given(st.integers(2, 300), st.integers(1, 5))
def test_collect_directions_point_at_representative(n, w):
    schedule, plan = build_wrht(n, w, False)
    for step, level in zip(schedule.steps, plan.levels):
        for group in level:
            rep_pos = group.members.index(group.representative)
            for pos, node in enumerate(group.members):
                if node == group.representative:
                    continue
                row = step.src.tolist().index(node)
                assert step.dst[row] == group.representative
                assert step.direction[row] == (CW if pos < rep_pos else CCW)


def test_every_transfer_carries_full_payload():
    schedule, _ = build_wrht(500, 3, True)
    assert all((s.payload == 1.0).all() for s in schedule.steps)


def test_partition_level():
    groups = partition_level(range(12), 5)
    assert [g.members for g in groups] == [(0, 1, 2, 3, 4), (5, 6, 7, 8, 9), (10, 11)]
    assert [g.representative for g in groups] == [2, 7, 10]
    with pytest.raises(DomainError):
        partition_level([], 3)


@given(st.integers(2, 70), st.integers(1, 4), st.booleans())
def test_wrht_matches_reference_verifier(n, w, allow):
    schedule, _ = build_wrht(n, w, allow)
    assert naive_allreduce_holds(schedule)
    assert verify_allreduce(schedule)


def test_rejects_bad_arguments():
    with pytest.raises(DomainError):
        build_wrht(1, 4)
    with pytest.raises(DomainError):
        wrht_step_count(10, 0)
