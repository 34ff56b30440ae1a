"""Decoupling pulse sequences and their compilation into timed schedules.

Pulse lists are in circuit order (leftmost acts first). A pulse label is a
Pauli name plus a quarter-turn global-phase tag (powers of i) so products of
labels stay closed under Pauli multiplication.

Sequence families and labels per repetition:

* ``FREE``   -> [I]                 (idle slots only)
* ``XY4``    -> [X, Y, X, Y]
* ``XI``     -> [X, I]   (``YI``, ``ZI`` analogous)
* ``GA8A``   -> [I, P1, P2, P1, I, P1, P2, P1], default P1=X, P2=Z
* ``GA16A``  -> two GA8A copies with each leading I replaced by P3,
                the Pauli not in {P1, P2}
* ``GA32A``  -> four GA8A blocks with the outer pattern [X, Y, X, Y]
                Pauli-multiplied into each block's first label (32 labels)
"""

from __future__ import annotations

from dataclasses import dataclass

SEQUENCE_FAMILIES = ("FREE", "XY4", "XI", "YI", "ZI", "GA8A", "GA16A", "GA32A")

LABELS_PER_REPETITION = {
    "FREE": 1,
    "XY4": 4,
    "XI": 2,
    "YI": 2,
    "ZI": 2,
    "GA8A": 8,
    "GA16A": 16,
    "GA32A": 32,
}

_PAULI_NAMES = ("I", "X", "Y", "Z")

# (a, b) -> (product name, power of i), for a @ b
_PAULI_MUL = {
    ("I", "I"): ("I", 0), ("I", "X"): ("X", 0), ("I", "Y"): ("Y", 0), ("I", "Z"): ("Z", 0),
    ("X", "I"): ("X", 0), ("Y", "I"): ("Y", 0), ("Z", "I"): ("Z", 0),
    ("X", "X"): ("I", 0), ("Y", "Y"): ("I", 0), ("Z", "Z"): ("I", 0),
    ("X", "Y"): ("Z", 1), ("Y", "X"): ("Z", 3),
    ("Y", "Z"): ("X", 1), ("Z", "Y"): ("X", 3),
    ("Z", "X"): ("Y", 1), ("X", "Z"): ("Y", 3),
}


class SequenceError(ValueError):
    """Invalid sequence family, pulse labels, or timing parameters."""


@dataclass(frozen=True)
class PulseLabel:
    """A Pauli pulse with a bookkeeping global-phase tag (i**phase)."""

    pauli: str
    phase: int = 0

    def __post_init__(self):
        if self.pauli not in _PAULI_NAMES:
            raise SequenceError(f"not a Pauli name: {self.pauli!r}")
        object.__setattr__(self, "phase", self.phase % 4)

    def __mul__(self, other: "PulseLabel") -> "PulseLabel":
        name, k = _PAULI_MUL[(self.pauli, other.pauli)]
        return PulseLabel(name, self.phase + other.phase + k)

    @property
    def is_identity(self) -> bool:
        return self.pauli == "I"


@dataclass(frozen=True)
class SequenceDef:
    """A named sequence with a repetition count and optional GA pulse pair."""

    family: str
    repetitions: int = 1
    p1: str = "X"
    p2: str = "Z"

    def __post_init__(self):
        if self.family not in SEQUENCE_FAMILIES:
            raise SequenceError(f"unknown sequence family: {self.family!r}")
        if self.repetitions < 1:
            raise SequenceError("repetitions must be >= 1")
        if self.family.startswith("GA"):
            if self.p1 == self.p2 or "I" in (self.p1, self.p2):
                raise SequenceError("GA sequences need distinct non-identity P1, P2")
            if self.p1 not in _PAULI_NAMES or self.p2 not in _PAULI_NAMES:
                raise SequenceError(f"bad GA pulses: {self.p1!r}, {self.p2!r}")

    @property
    def n_labels(self) -> int:
        return self.repetitions * LABELS_PER_REPETITION[self.family]

    def to_dict(self) -> dict:
        d = {"family": self.family, "repetitions": self.repetitions}
        if self.family.startswith("GA"):
            d["p1"] = self.p1
            d["p2"] = self.p2
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SequenceDef":
        return cls(
            family=d["family"],
            repetitions=int(d.get("repetitions", 1)),
            p1=d.get("p1", "X"),
            p2=d.get("p2", "Z"),
        )


def _ga8a_labels(p1: str, p2: str) -> list[PulseLabel]:
    order = ["I", p1, p2, p1, "I", p1, p2, p1]
    return [PulseLabel(p) for p in order]


def _third_pauli(p1: str, p2: str) -> str:
    return next(p for p in ("X", "Y", "Z") if p not in (p1, p2))


def build_sequence(seq: SequenceDef) -> list[PulseLabel]:
    """Expand a sequence definition into its time-ordered pulse labels."""
    family = seq.family
    if family == "FREE":
        base = [PulseLabel("I")]
    elif family == "XY4":
        base = [PulseLabel("X"), PulseLabel("Y"), PulseLabel("X"), PulseLabel("Y")]
    elif family in ("XI", "YI", "ZI"):
        base = [PulseLabel(family[0]), PulseLabel("I")]
    elif family == "GA8A":
        base = _ga8a_labels(seq.p1, seq.p2)
    elif family == "GA16A":
        p3 = _third_pauli(seq.p1, seq.p2)
        half = _ga8a_labels(seq.p1, seq.p2)
        half[0] = PulseLabel(p3)
        base = half + list(half)
    elif family == "GA32A":
        base = []
        inner = _ga8a_labels(seq.p1, seq.p2)
        for outer_name in ("X", "Y", "X", "Y"):
            block = list(inner)
            block[0] = PulseLabel(outer_name) * block[0]
            base.extend(block)
    else:  # pragma: no cover - guarded by SequenceDef
        raise SequenceError(f"unknown sequence family: {family!r}")
    return base * seq.repetitions


def label_product(labels: list[PulseLabel]) -> PulseLabel:
    """Operator product of a time-ordered label list (last label leftmost)."""
    out = PulseLabel("I")
    for lab in labels:
        out = lab * out
    return out


@dataclass(frozen=True)
class DeviceTimingProfile:
    """Per-device pulse timing and shot defaults."""

    name: str
    pulse_width_ns: float
    buffer_ns: float
    shots_per_experiment: int

    def __post_init__(self):
        if self.pulse_width_ns <= 0 or self.buffer_ns <= 0:
            raise SequenceError("pulse and buffer durations must be positive")

    @property
    def identity_slot_ns(self) -> float:
        return self.pulse_width_ns + self.buffer_ns


PROFILES = {
    "IBMQX5": DeviceTimingProfile("IBMQX5", 80.0, 10.0, 8192),
    "ACORN": DeviceTimingProfile("ACORN", 40.0, 10.0, 1000),
    "IBMQX4": DeviceTimingProfile("IBMQX4", 50.0, 10.0, 8192),
}


def get_profile(name: str) -> DeviceTimingProfile:
    try:
        return PROFILES[name.upper()]
    except KeyError:
        raise SequenceError(f"unknown timing profile: {name!r}") from None


@dataclass(frozen=True)
class Slot:
    """One contiguous schedule interval: a pulse slot or free evolution."""

    kind: str  # "PULSE" or "FREE"
    duration_ns: float
    start_ns: float
    label: PulseLabel | None = None


@dataclass(frozen=True)
class PulseSchedule:
    slots: tuple[Slot, ...]
    total_ns: float
    tau_multiplier: int
    profile_name: str = ""

    def __post_init__(self):
        t = 0.0
        for slot in self.slots:
            if abs(slot.start_ns - t) > 1e-9:
                raise SequenceError("schedule slots are not contiguous")
            t += slot.duration_ns
        if abs(t - self.total_ns) > 1e-9:
            raise SequenceError("total_ns does not match slot durations")

    @property
    def n_pulse_slots(self) -> int:
        return sum(1 for s in self.slots if s.kind == "PULSE")


def compile_schedule(
    labels: list[PulseLabel],
    profile: DeviceTimingProfile,
    tau_multiplier: int = 1,
) -> PulseSchedule:
    """Compile time-ordered labels into contiguous slots.

    Each label occupies one slot of identity_slot_ns. Identity labels become
    FREE slots. For tau_multiplier k > 1, (k-1) extra FREE slots follow every
    PULSE slot, stretching the pulse-to-pulse spacing to k slots; idle-only
    stretches are realized by the caller through the label list itself.
    """
    if int(tau_multiplier) != tau_multiplier or tau_multiplier < 1:
        raise SequenceError(f"tau_multiplier must be an integer >= 1, got {tau_multiplier}")
    k = int(tau_multiplier)
    dt = profile.identity_slot_ns
    slots: list[Slot] = []
    t = 0.0
    for lab in labels:
        if lab.is_identity:
            slots.append(Slot("FREE", dt, t))
            t += dt
        else:
            slots.append(Slot("PULSE", dt, t, label=lab))
            t += dt
            for _ in range(k - 1):
                slots.append(Slot("FREE", dt, t))
                t += dt
    return PulseSchedule(tuple(slots), t, k, profile.name)
