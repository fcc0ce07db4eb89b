import numpy as np
import pytest

from opticollect import CCW, CW, AlgorithmId, DomainError, Schedule, Stage, Step, Transfer


def small_step(index=0):
    return Step.from_arrays(index, Stage.REDUCE, 6, [0, 1, 4], [2, 2, 2], [CW, CW, CCW])


def test_from_arrays_broadcasts_scalars():
    step = small_step()
    assert len(step) == 3
    assert step.fiber.tolist() == [0, 0, 0]
    assert step.payload.tolist() == [1.0, 1.0, 1.0]
    assert step.hops.tolist() == [2, 1, 2]
    assert not step.is_assigned


def test_columns_are_read_only():
    step = small_step()
    with pytest.raises(ValueError):
        step.src[0] = 5


def test_round_trip_through_transfers():
    step = small_step().with_wavelengths([0, 1, 0])
    again = Step.from_transfers(0, Stage.REDUCE, 6, step.transfers)
    assert again.geometry_key() == step.geometry_key()
    assert again.wavelength.tolist() == [0, 1, 0]
    assert step.transfers[2] == Transfer(4, 2, CCW, 0, 0, 1.0, (0, 1))


def test_self_transfer_rejected():
    with pytest.raises(DomainError):
        Step.from_arrays(0, Stage.REDUCE, 4, [1], [1], [CW])
    with pytest.raises(DomainError):
        Transfer(2, 2, CW)


def test_reversed_swaps_endpoints_and_keeps_arc():
    step = small_step().with_wavelengths([0, 1, 0])
    back = step.reversed(3)
    assert back.index == 3 and back.stage is Stage.BROADCAST
    assert back.src.tolist() == [2, 2, 2] and back.dst.tolist() == [0, 1, 4]
    assert back.hops.tolist() == step.hops.tolist()
    assert back.wavelength is None


def test_schedule_requires_consecutive_indices():
    with pytest.raises(DomainError):
        Schedule(AlgorithmId.BT, 6, [small_step(1)])
    with pytest.raises(DomainError):
        Schedule(AlgorithmId.BT, 6, [])


def test_with_steps_renumbers():
    sched = Schedule(AlgorithmId.BT, 6, [small_step(0), small_step(1), small_step(2)])
    shorter = sched.without_step(1)
    assert [s.index for s in shorter.steps] == [0, 1]
    assert shorter.n_steps == 2


def test_to_dict_scales_payload():
    step = Step.from_arrays(0, Stage.REDUCE, 4, [0], [1], [CW], payload=0.25, wavelength=[3])
    out = Schedule(AlgorithmId.RING, 4, [step], payload_unit=800.0).to_dict()
    (t,) = out["steps"][0]["transfers"]
    assert t == {"src": 0, "dst": 1, "direction": "cw", "fiber": 0, "wavelength": 3,
                 "payload_bits": 200.0}
    assert out["steps"][0]["stage"] == "reduce"


def test_mismatched_columns_rejected():
    with pytest.raises(DomainError):
        Step(0, Stage.REDUCE, 4, np.array([0, 1]), np.array([1]), np.array([1], np.int8),
             np.zeros(1, np.int8), np.ones(1), np.zeros(1, np.int32), np.ones(1, np.int32))


def test_without_missing_step_is_an_error():
    sched = Schedule(AlgorithmId.BT, 6, [small_step(0)])
    with pytest.raises(DomainError):
        sched.without_step(1)
