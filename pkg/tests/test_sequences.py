import numpy as np
import pytest

from ddsim import quantum as q
from ddsim.sequences import (
    LABELS_PER_REPETITION,
    PROFILES,
    DeviceTimingProfile,
    PulseLabel,
    PulseSchedule,
    SequenceDef,
    SequenceError,
    Slot,
    build_sequence,
    compile_schedule,
    get_profile,
    label_product,
)

EXPECTED_CYCLE = {
    "FREE": 1, "XY4": 4, "XI": 2, "YI": 2, "ZI": 2,
    "GA8A": 8, "GA16A": 16, "GA32A": 32,
}


def matrix_product(labels):
    out = np.eye(2, dtype=complex)
    for lab in labels:
        out = q.PAULIS[lab.pauli] @ out
    return out


class TestPulseLabel:
    def test_multiplication_table(self):
        assert PulseLabel("X") * PulseLabel("Y") == PulseLabel("Z", 1)
        assert PulseLabel("Y") * PulseLabel("X") == PulseLabel("Z", 3)
        assert PulseLabel("Z") * PulseLabel("Z") == PulseLabel("I", 0)
        assert PulseLabel("I") * PulseLabel("Y") == PulseLabel("Y", 0)

    def test_phase_matches_matrices(self):
        # i**phase * pauli must equal the matrix product
        rng = np.random.default_rng(0)
        names = ["I", "X", "Y", "Z"]
        for _ in range(50):
            a, b = rng.choice(names, 2)
            prod = PulseLabel(a) * PulseLabel(b)
            expected = q.PAULIS[a] @ q.PAULIS[b]
            assert np.allclose((1j**prod.phase) * q.PAULIS[prod.pauli], expected)

    def test_rejects_bad_name(self):
        with pytest.raises(SequenceError):
            PulseLabel("Q")


class TestBuildSequence:
    def test_label_counts(self):
        for family, per_rep in EXPECTED_CYCLE.items():
            for reps in (1, 3):
                labels = build_sequence(SequenceDef(family, repetitions=reps))
                assert len(labels) == reps * per_rep
        assert LABELS_PER_REPETITION == EXPECTED_CYCLE

    def test_xy4_ten_repetitions_is_forty_pulses(self):
        labels = build_sequence(SequenceDef("XY4", repetitions=10))
        assert len(labels) == 40
        assert all(not lab.is_identity for lab in labels)

    def test_ga8a_default_pattern(self):
        labels = build_sequence(SequenceDef("GA8A"))
        assert [lab.pauli for lab in labels] == ["I", "X", "Z", "X", "I", "X", "Z", "X"]

    def test_ga16a_replaces_leading_identity(self):
        labels = build_sequence(SequenceDef("GA16A"))
        names = [lab.pauli for lab in labels]
        assert names == ["Y", "X", "Z", "X", "I", "X", "Z", "X"] * 2

    def test_ga32a_has_32_labels(self):
        labels = build_sequence(SequenceDef("GA32A"))
        assert len(labels) == 32
        # outer X,Y,X,Y merged into each block's leading identity
        assert [labels[k].pauli for k in (0, 8, 16, 24)] == ["X", "Y", "X", "Y"]

    def test_interleaved_families(self):
        assert [lab.pauli for lab in build_sequence(SequenceDef("XI", repetitions=2))] == [
            "X", "I", "X", "I",
        ]
        assert [lab.pauli for lab in build_sequence(SequenceDef("ZI"))] == ["Z", "I"]

    def test_product_is_ray_identity_per_repetition(self):
        for family in ("XY4", "GA8A", "GA16A", "GA32A"):
            labels = build_sequence(SequenceDef(family))
            assert q.ray_equal(matrix_product(labels), np.eye(2)), family

    def test_label_product_tracks_phase(self):
        for family in ("XY4", "GA8A", "GA16A", "GA32A"):
            labels = build_sequence(SequenceDef(family))
            prod = label_product(labels)
            assert prod.pauli == "I"
            assert np.allclose(
                (1j**prod.phase) * np.eye(2), matrix_product(labels)
            ), family

    def test_ga_validation(self):
        with pytest.raises(SequenceError):
            SequenceDef("GA8A", p1="X", p2="X")
        with pytest.raises(SequenceError):
            SequenceDef("GA8A", p1="I", p2="Z")
        with pytest.raises(SequenceError):
            SequenceDef("MYST")
        with pytest.raises(SequenceError):
            SequenceDef("XY4", repetitions=0)

    def test_ga8a_custom_pulses(self):
        labels = build_sequence(SequenceDef("GA8A", p1="Y", p2="X"))
        assert [lab.pauli for lab in labels] == ["I", "Y", "X", "Y", "I", "Y", "X", "Y"]


class TestProfiles:
    def test_builtin_slot_lengths(self):
        assert PROFILES["IBMQX5"].identity_slot_ns == 90
        assert PROFILES["ACORN"].identity_slot_ns == 50
        assert PROFILES["IBMQX4"].identity_slot_ns == 60

    def test_shot_defaults(self):
        assert PROFILES["IBMQX5"].shots_per_experiment == 8192
        assert PROFILES["ACORN"].shots_per_experiment == 1000

    def test_lookup(self):
        assert get_profile("ibmqx5").name == "IBMQX5"
        with pytest.raises(SequenceError):
            get_profile("QX99")

    def test_durations_positive(self):
        with pytest.raises(SequenceError):
            DeviceTimingProfile("bad", 0.0, 10.0, 100)


class TestCompileSchedule:
    def test_xy4_base_spacing_ibmqx5(self):
        labels = build_sequence(SequenceDef("XY4"))
        sched = compile_schedule(labels, PROFILES["IBMQX5"], 1)
        assert len(sched.slots) == 4
        assert sched.total_ns == 360
        assert sched.n_pulse_slots == 4

    def test_xy4_base_spacing_acorn(self):
        labels = build_sequence(SequenceDef("XY4"))
        sched = compile_schedule(labels, PROFILES["ACORN"], 1)
        assert sched.total_ns == 200

    def test_stretched_spacing_inserts_idles(self):
        labels = build_sequence(SequenceDef("XY4"))
        sched = compile_schedule(labels, PROFILES["IBMQX5"], 3)
        kinds = [s.kind for s in sched.slots]
        assert kinds.count("PULSE") == 4
        assert kinds.count("FREE") == 8
        assert sched.total_ns == 1080
        # pulse-to-pulse spacing is 3 slots
        pulse_starts = [s.start_ns for s in sched.slots if s.kind == "PULSE"]
        assert np.allclose(np.diff(pulse_starts), 270.0)

    def test_identity_labels_become_free_slots(self):
        labels = build_sequence(SequenceDef("FREE", repetitions=7))
        sched = compile_schedule(labels, PROFILES["IBMQX5"], 1)
        assert all(s.kind == "FREE" for s in sched.slots)
        assert sched.total_ns == 7 * 90

    def test_contiguity(self):
        labels = build_sequence(SequenceDef("GA8A", repetitions=2))
        sched = compile_schedule(labels, PROFILES["ACORN"], 2)
        t = 0.0
        for slot in sched.slots:
            assert abs(slot.start_ns - t) < 1e-9
            t += slot.duration_ns
        assert abs(sched.total_ns - t) < 1e-9

    def test_rejects_bad_multiplier(self):
        labels = build_sequence(SequenceDef("XY4"))
        with pytest.raises(SequenceError):
            compile_schedule(labels, PROFILES["IBMQX5"], 0)
        with pytest.raises(SequenceError):
            compile_schedule(labels, PROFILES["IBMQX5"], 1.5)

    def test_schedule_invariants_enforced(self):
        with pytest.raises(SequenceError):
            PulseSchedule(
                slots=(Slot("FREE", 90.0, 0.0), Slot("FREE", 90.0, 100.0)),
                total_ns=180.0,
                tau_multiplier=1,
            )
