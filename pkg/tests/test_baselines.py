import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opticollect import (
    AlgorithmId,
    DomainError,
    Stage,
    analytic_steps,
    build_bt,
    build_hring,
    build_rd,
    build_ring,
    hring_formula,
    verify_allreduce,
)
from opticollect.baselines import rd_partner
from oracles import naive_allreduce_holds


def test_thousand_node_counts():
    assert analytic_steps("ring", 1000) == 1998
    assert analytic_steps("bt", 1000) == 20
    assert hring_formula(1000, 5, 64) == 407
    assert analytic_steps("hring", 1000, 64, 5) == 407


@given(st.integers(2, 5000))
def test_formulas_against_math(n):
    assert analytic_steps("ring", n) == 2 * (n - 1)
    assert analytic_steps("bt", n) == 2 * math.ceil(math.log2(n) - 1e-12)
    expected_rd = int(math.log2(n)) if n & (n - 1) == 0 else n.bit_length() + 1
    assert analytic_steps("rd", n) == expected_rd


def test_fractional_hring_rounds_up_with_warning():
    with pytest.warns(UserWarning):
        assert analytic_steps("hring", 1001, 64, 5) == math.ceil(hring_formula(1001, 5, 64))
    with pytest.raises(DomainError):
        analytic_steps("hring", 4, 64, 8)
    with pytest.raises(DomainError):
        analytic_steps("hring", 16)


@given(st.integers(2, 300))
def test_constructed_lengths_match_formulas(n):
    assert build_ring(n).n_steps == analytic_steps("ring", n)
    assert build_bt(n).n_steps == analytic_steps("bt", n)
    assert build_rd(n).n_steps == analytic_steps("rd", n)


@given(st.sampled_from([2, 4, 5, 8]), st.integers(2, 12), st.integers(1, 10))
def test_hring_construction_against_formula(g, groups, w):
    n = g * groups
    schedule = build_hring(n, g, w)
    batches = -(-g // w)
    assert schedule.n_steps == 2 * (g - 1) + 2 * (groups - 1) * batches
    if g <= w:
        # the closed form counts one step more than the construction needs
        assert hring_formula(n, g, w) == schedule.n_steps + 1


def test_hring_thousand_nodes():
    assert build_hring(1000, 5, 64).n_steps == 406


def test_hring_validation():
    with pytest.raises(DomainError):
        build_hring(10, 3, 4)
    with pytest.raises(DomainError):
        build_hring(4, 4, 4)
    with pytest.raises(DomainError):
        build_hring(8, 1, 4)


def test_ring_payload_and_lanes():
    schedule = build_ring(5)
    assert schedule.n_lanes == 5
    assert all(np.allclose(s.payload, 0.2) for s in schedule.steps)
    assert schedule.stage_steps(Stage.BROADCAST)[0].index == 4


def test_bt_tree_shape():
    schedule = build_bt(15)
    first = schedule.steps[0]
    assert first.src.tolist() == list(range(1, 15, 2))
    assert first.dst.tolist() == list(range(0, 14, 2))
    assert schedule.steps[3].src.tolist() == [8] and schedule.steps[3].dst.tolist() == [0]


def test_rd_partners_and_folding():
    assert rd_partner(5, 2) == 7
    schedule = build_rd(6)
    assert schedule.n_steps == 4
    assert sorted(zip(schedule.steps[0].src.tolist(), schedule.steps[0].dst.tolist())) == [(4, 0), (5, 1)]
    assert sorted(zip(schedule.steps[-1].src.tolist(), schedule.steps[-1].dst.tolist())) == [(0, 4), (1, 5)]


@given(st.integers(2, 40), st.sampled_from(["ring", "bt", "rd"]))
def test_baselines_match_reference_verifier(n, alg):
    schedule = {"ring": build_ring, "bt": build_bt, "rd": build_rd}[alg](n)
    assert naive_allreduce_holds(schedule)
    assert verify_allreduce(schedule)


@given(st.sampled_from([2, 3, 4]), st.integers(2, 6), st.integers(1, 4))
def test_hring_matches_reference_verifier(g, groups, w):
    schedule = build_hring(g * groups, g, w)
    assert naive_allreduce_holds(schedule)
    assert verify_allreduce(schedule)


def test_algorithm_ids_accept_strings():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert analytic_steps(AlgorithmId.WRHT, 1000, 64, allow_all2all=False) == 4
