"""Experiment sweeps: state-angle scans, pulse-count and pulse-interval
sweeps, Bell-state protection, and noise-source diagnostics.

A sweep cell is one (sequence, tau, qubit, initial state, pulse count).
Pulse count N counts schedule labels at base spacing, idle labels included,
so different sequence families at equal N occupy equal wall-clock time. The
time-matched baseline for a sequence at (N, tau=k) is free evolution over
N*k idle slots.

Per-cell randomness derives from content-addressed seed tuples
(master seed, family, tau, qubit, state, N), so results do not depend on
sweep ordering or qubit-list permutations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quantum
from .engine import (
    EngineError,
    ScheduledRun,
    exact_measurement,
    measure_shots,
    run_schedule,
)
from .noise import NO_NOISE, NoiseConfiguration
from .quantum import EulerAngles
from .results import Record, ResultSet, build_manifest
from .sequences import (
    LABELS_PER_REPETITION,
    SEQUENCE_FAMILIES,
    PulseLabel,
    SequenceDef,
    build_sequence,
    compile_schedule,
    get_profile,
)

EXPERIMENT_KINDS = (
    "TYPE1_SWEEP",
    "TYPE2_ENSEMBLE",
    "PULSE_NUMBER_SWEEP",
    "PULSE_INTERVAL_SWEEP",
    "BELL",
    "DEPHASING_VS_SE",
)

BELL_KINDS = ("phi+", "psi+")

SCHEMA_ID = "ddsim/experiment/v1"


class SchemaError(ValueError):
    """Spec validation failure carrying a JSON-pointer location."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
        self.reason = message


def type1_states() -> list[EulerAngles]:
    """Sixteen equidistant polar angles from 0 to pi (phi = lambda = 0)."""
    return [EulerAngles(theta=k * math.pi / 15) for k in range(16)]


def type1_state_ids() -> list[str]:
    return [f"theta{k:02d}" for k in range(16)]


_EIGENSTATE_ANGLES = [
    ("z+", EulerAngles(0.0)),
    ("z-", EulerAngles(math.pi)),
    ("x+", EulerAngles(math.pi / 2, math.pi)),
    ("x-", EulerAngles(math.pi / 2, 0.0)),
    ("y+", EulerAngles(math.pi / 2, math.pi / 2)),
    ("y-", EulerAngles(math.pi / 2, 3 * math.pi / 2)),
]


def state_to_angles(psi: np.ndarray) -> EulerAngles:
    """Angles (theta, phi, 0) whose prepared state matches psi as a ray."""
    a0, a1 = complex(psi[0]), complex(psi[1])
    if abs(a0) > 1e-12:
        phase = a0 / abs(a0)
        a0, a1 = a0 / phase, a1 / phase
    theta = 2.0 * math.atan2(abs(a1), a0.real)
    if abs(a1) < 1e-12 or abs(a0) < 1e-12:
        return EulerAngles(theta)
    gamma = math.atan2(a1.imag, a1.real)
    return EulerAngles(theta, (-gamma - math.pi) % (2 * math.pi))


def type2_states(seed: int) -> list[tuple[str, EulerAngles]]:
    """Thirty Bloch-uniform random states followed by the six Pauli
    eigenstates, deterministic in the seed."""
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0x7E2)))
    states = []
    for i in range(30):
        psi = quantum.haar_random_state(rng)
        states.append((f"haar{i:02d}", state_to_angles(psi)))
    states.extend(_EIGENSTATE_ANGLES)
    return states


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one reproducible experiment sweep."""

    kind: str
    pulse_counts: tuple[int, ...]
    sequences: tuple[SequenceDef, ...] = (SequenceDef("FREE"), SequenceDef("XY4"))
    tau_multipliers: tuple[int, ...] = (1,)
    profile: str = "IBMQX5"
    noise: NoiseConfiguration = NO_NOISE
    qubits: tuple[int, ...] = (0,)
    shots: int | None = None
    exact_probabilities: bool = False
    seed: int = 0
    bell_kinds: tuple[str, ...] = BELL_KINDS

    def __post_init__(self):
        _validate_spec_fields(self)

    @property
    def effective_shots(self) -> int:
        if self.shots is not None:
            return self.shots
        return get_profile(self.profile).shots_per_experiment

    def effective_sequences(self) -> tuple[SequenceDef, ...]:
        if self.kind == "DEPHASING_VS_SE":
            return tuple(SequenceDef(f) for f in ("FREE", "XY4", "XI", "YI", "ZI"))
        return self.sequences

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_ID,
            "kind": self.kind,
            "sequences": [s.to_dict() for s in self.sequences],
            "pulse_counts": list(self.pulse_counts),
            "tau_multipliers": list(self.tau_multipliers),
            "profile": self.profile,
            "noise": self.noise.to_dict(),
            "qubits": list(self.qubits),
            "shots": self.shots,
            "exact_probabilities": self.exact_probabilities,
            "seed": self.seed,
            "bell_kinds": list(self.bell_kinds),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        return spec_from_dict(d)


_SPEC_KEYS = {
    "schema",
    "kind",
    "sequences",
    "pulse_counts",
    "tau_multipliers",
    "profile",
    "noise",
    "qubits",
    "shots",
    "exact_probabilities",
    "seed",
    "bell_kinds",
}


def _validate_spec_fields(spec: "ExperimentSpec") -> None:
    if spec.kind not in EXPERIMENT_KINDS:
        raise SchemaError("/kind", f"must be one of {EXPERIMENT_KINDS}")
    if not spec.sequences:
        raise SchemaError("/sequences", "at least one sequence is required")
    if not spec.pulse_counts:
        raise SchemaError("/pulse_counts", "at least one pulse count is required")
    last = -1
    for i, n in enumerate(spec.pulse_counts):
        if int(n) != n or n < 0:
            raise SchemaError(f"/pulse_counts/{i}", "must be a nonnegative integer")
        if n <= last:
            raise SchemaError(f"/pulse_counts/{i}", "must be strictly increasing")
        last = n
        for seq in spec.effective_sequences():
            cycle = LABELS_PER_REPETITION[seq.family]
            if n % cycle != 0:
                raise SchemaError(
                    f"/pulse_counts/{i}",
                    f"{n} is not a multiple of the {seq.family} cycle ({cycle})",
                )
    for i, k in enumerate(spec.tau_multipliers):
        if int(k) != k or k < 1:
            raise SchemaError(f"/tau_multipliers/{i}", "must be an integer >= 1")
    if len(set(spec.qubits)) != len(spec.qubits) or any(q < 0 for q in spec.qubits):
        raise SchemaError("/qubits", "must be distinct nonnegative indices")
    if spec.kind == "BELL":
        if len(spec.qubits) % 2 != 0:
            raise SchemaError("/qubits", "BELL experiments pair consecutive qubits")
        for i, b in enumerate(spec.bell_kinds):
            if b not in BELL_KINDS:
                raise SchemaError(f"/bell_kinds/{i}", f"must be one of {BELL_KINDS}")
    if spec.shots is not None and spec.shots < 1:
        raise SchemaError("/shots", "must be >= 1")
    if spec.seed < 0:
        raise SchemaError("/seed", "must be >= 0")
    try:
        get_profile(spec.profile)
    except Exception:
        raise SchemaError("/profile", f"unknown timing profile {spec.profile!r}") from None


def spec_from_dict(d: dict) -> ExperimentSpec:
    """Build and validate a spec from JSON data, raising SchemaError with a
    JSON-pointer diagnostic on the first problem found."""
    if not isinstance(d, dict):
        raise SchemaError("", "experiment spec must be a JSON object")
    for key in d:
        if key not in _SPEC_KEYS:
            raise SchemaError(f"/{key}", "unknown field")
    schema = d.get("schema", SCHEMA_ID)
    if schema != SCHEMA_ID:
        raise SchemaError("/schema", f"expected {SCHEMA_ID!r}")
    if "kind" not in d:
        raise SchemaError("/kind", "required field missing")
    if "pulse_counts" not in d:
        raise SchemaError("/pulse_counts", "required field missing")
    sequences = []
    for i, s in enumerate(d.get("sequences", [{"family": "FREE"}, {"family": "XY4"}])):
        try:
            sequences.append(SequenceDef.from_dict(s))
        except Exception as exc:
            raise SchemaError(f"/sequences/{i}", str(exc)) from None
    noise = NO_NOISE
    if d.get("noise") is not None:
        try:
            noise = NoiseConfiguration.from_dict(d["noise"])
        except Exception as exc:
            raise SchemaError("/noise", str(exc)) from None
    try:
        return ExperimentSpec(
            kind=d["kind"],
            pulse_counts=tuple(int(n) for n in d["pulse_counts"]),
            sequences=tuple(sequences),
            tau_multipliers=tuple(int(k) for k in d.get("tau_multipliers", [1])),
            profile=d.get("profile", "IBMQX5"),
            noise=noise,
            qubits=tuple(int(q) for q in d.get("qubits", [0])),
            shots=d.get("shots"),
            exact_probabilities=bool(d.get("exact_probabilities", False)),
            seed=int(d.get("seed", 0)),
            bell_kinds=tuple(d.get("bell_kinds", list(BELL_KINDS))),
        )
    except SchemaError:
        raise
    except (TypeError, ValueError) as exc:
        raise SchemaError("", str(exc)) from None


# --------------------------------------------------------------------------
# Sweep execution
# --------------------------------------------------------------------------

def _cell_rng(spec: ExperimentSpec, family: str, tau: int, qubit: int, state_idx: int, n: int):
    code = SEQUENCE_FAMILIES.index(family)
    return np.random.default_rng(
        np.random.SeedSequence((spec.seed, code, tau, qubit, state_idx, n))
    )


def _run_seed(spec: ExperimentSpec, family: str, tau: int, qubit: int, state_idx: int) -> int:
    code = SEQUENCE_FAMILIES.index(family)
    mix = np.random.SeedSequence((spec.seed, code, tau, qubit, state_idx))
    return int(mix.generate_state(1, np.uint64)[0] >> 1)


def _labels_for(seq: SequenceDef, family_reps: int) -> list[PulseLabel]:
    return build_sequence(
        SequenceDef(seq.family, repetitions=family_reps, p1=seq.p1, p2=seq.p2)
    )


def _snapshot_indices(labels: list[PulseLabel], tau: int, counts: list[int]) -> dict[int, int]:
    """Map each pulse count to its slot boundary in the compiled schedule."""
    sizes = [1 if lab.is_identity else tau for lab in labels]
    boundaries = np.concatenate([[0], np.cumsum(sizes)])
    return {n: int(boundaries[n]) for n in counts}


def _states_for(spec: ExperimentSpec) -> list[tuple[str, EulerAngles | str]]:
    if spec.kind == "TYPE1_SWEEP":
        return list(zip(type1_state_ids(), type1_states()))
    if spec.kind == "BELL":
        return [(k, k) for k in spec.bell_kinds]
    return list(type2_states(spec.seed))


def _qubit_groups(spec: ExperimentSpec) -> list[tuple[int, ...]]:
    if spec.kind == "BELL":
        q = spec.qubits
        return [tuple(q[i : i + 2]) for i in range(0, len(q), 2)]
    return [(q,) for q in spec.qubits]


def run_experiment(spec: ExperimentSpec) -> ResultSet:
    """Execute every sweep cell and assemble a reproducible result set."""
    profile = get_profile(spec.profile)
    states = _states_for(spec)
    groups = _qubit_groups(spec)
    counts = list(spec.pulse_counts)
    records: list[Record] = []
    want_bound = spec.kind == "PULSE_INTERVAL_SWEEP"

    for seq in spec.effective_sequences():
        cycle = LABELS_PER_REPETITION[seq.family]
        for tau in spec.tau_multipliers:
            for group in groups:
                for state_idx, (state_id, init) in enumerate(states):
                    records.extend(
                        _run_curve(
                            spec, profile, seq, cycle, tau, group, state_idx,
                            state_id, init, counts, want_bound,
                        )
                    )
    records.sort(key=lambda r: (r.sequence, r.tau, r.qubit, r.state, r.n_pulses))
    result = ResultSet(records=records, manifest=build_manifest(spec.to_dict(), spec.seed))
    result.validate()
    return result


def _run_curve(
    spec, profile, seq, cycle, tau, group, state_idx, state_id, init, counts, want_bound
) -> list[Record]:
    max_n = counts[-1]
    is_free = seq.family == "FREE"
    label_count = max_n * tau if is_free else max_n
    reps = max(label_count // (cycle if not is_free else 1), 1) if label_count else 1
    labels = _labels_for(seq, reps)[:label_count] if label_count else []
    snap_tau = 1 if is_free else tau
    snapshot_map = _snapshot_indices(
        labels, snap_tau, [n * tau if is_free else n for n in counts]
    )
    schedule = compile_schedule(labels, profile, snap_tau)
    qubit = group[0]
    run = ScheduledRun(
        initial=init,
        schedule=schedule,
        noise=spec.noise,
        qubits=group,
        shots=spec.effective_shots,
        seed=_run_seed(spec, seq.family, tau, qubit, state_idx),
    )
    snapshots = sorted(set(snapshot_map.values()))
    rhos = run_schedule(run, snapshots=snapshots)

    free_refs: dict[int, np.ndarray] = {}
    if want_bound and not is_free:
        free_refs = _free_references(spec, profile, tau, group, state_idx, init, counts)

    readout = spec.noise.readout_for(list(group))
    records = []
    qubit_label = "+".join(str(q) for q in group)
    for n in counts:
        idx = snapshot_map[n * tau if is_free else n]
        rho = rhos[idx]
        if spec.exact_probabilities:
            meas = exact_measurement(rho, readout)
            shots_used = 0
        else:
            rng = _cell_rng(spec, seq.family, tau, qubit, state_idx, n)
            meas = measure_shots(rho, readout, spec.effective_shots, rng)
            shots_used = spec.effective_shots
        if spec.kind == "BELL":
            p = meas.probabilities if spec.exact_probabilities else tuple(
                c / spec.effective_shots for c in meas.counts
            )
            rec = Record(
                sequence=seq.family, tau=tau, qubit=qubit_label, state=state_id,
                n_pulses=n, shots=shots_used, fidelity=None,
                p00=p[0], p01=p[1], p10=p[2], p11=p[3],
            )
        else:
            bound_f = None
            if want_bound and not is_free and n > 0:
                bound_f = quantum.uhlmann_fidelity(rho, free_refs[n])
            rec = Record(
                sequence=seq.family, tau=tau, qubit=qubit_label, state=state_id,
                n_pulses=n, shots=shots_used, fidelity=meas.fidelity,
                uhlmann_vs_free=bound_f,
            )
        records.append(rec)
    return records


def _free_references(spec, profile, tau, group, state_idx, init, counts):
    """Free evolution time-matched to each DD pulse count at this tau."""
    labels = [PulseLabel("I")] * (counts[-1] * tau)
    schedule = compile_schedule(labels, profile, 1)
    run = ScheduledRun(
        initial=init,
        schedule=schedule,
        noise=spec.noise,
        qubits=group,
        shots=spec.effective_shots,
        seed=_run_seed(spec, "FREE", tau, group[0], state_idx),
    )
    snapshots = sorted({n * tau for n in counts})
    rhos = run_schedule(run, snapshots=snapshots)
    return {n: rhos[n * tau] for n in counts}


# --------------------------------------------------------------------------
# First-order decoupling verification
# --------------------------------------------------------------------------

def _random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2.0


def random_coupling(
    coupling: str, n_bath: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw a system-bath coupling sum_a sigma_a (x) B_a on qubit x bath.

    ``coupling`` is "random" (independent random Hermitian B_a for all three
    axes) or one of "x", "y", "z" (a single axis with a random bath factor).
    """
    if coupling not in ("random", "x", "y", "z"):
        raise EngineError(f"unknown coupling kind {coupling!r}")
    bath_dim = 2**n_bath
    dim = 2 * bath_dim
    h = np.zeros((dim, dim), dtype=complex)
    axes = ("X", "Y", "Z") if coupling == "random" else (coupling.upper(),)
    for name in axes:
        h += np.kron(quantum.PAULIS[name], _random_hermitian(bath_dim, rng))
    return h


def verify_decoupling(
    sequence: SequenceDef,
    coupling: str = "random",
    trials: int = 100,
    seed: int = 0,
    n_bath: int = 2,
) -> dict:
    """First-order average-coupling norms over random coupling draws.

    Returns absolute and coupling-normalized norms; a sequence that cancels
    the coupling at first order yields relative norms at numerical zero.
    """
    from .engine import toggling_frame_first_order

    labels = build_sequence(sequence)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xDD)))
    norms, relative = [], []
    for _ in range(max(trials, 1)):
        h_sb = random_coupling(coupling, n_bath, rng)
        h_norm = float(np.linalg.norm(h_sb, ord=2))
        value = toggling_frame_first_order(labels, h_sb)
        norms.append(value)
        relative.append(value / h_norm if h_norm > 0 else 0.0)
    return {
        "sequence": sequence.family,
        "repetitions": sequence.repetitions,
        "coupling": coupling,
        "trials": int(trials),
        "n_labels": len(labels),
        "max_norm": max(norms),
        "max_relative": max(relative),
        "mean_relative": float(np.mean(relative)),
    }


# --------------------------------------------------------------------------
# Dedicated grids for the leakage-bound analysis
# --------------------------------------------------------------------------

def bound_fidelity_grid(
    noise: NoiseConfiguration,
    profile_name: str,
    sequence: SequenceDef,
    pulse_counts: list[int],
    tau_multipliers: list[int],
    initial: EulerAngles | None = None,
    seed: int = 0,
) -> list[dict]:
    """Uhlmann fidelity between DD-evolved and time-matched free-evolved
    states over a (tau, N) grid, using exact densities (no shot noise).

    Returns rows {"tau": k, "tau_ns": ..., "n_pulses": n, "fidelity": F}.
    """
    if initial is None:
        initial = EulerAngles(math.pi / 2, math.pi)  # |+>
    profile = get_profile(profile_name)
    spec = ExperimentSpec(
        kind="PULSE_INTERVAL_SWEEP",
        pulse_counts=tuple(pulse_counts),
        sequences=(SequenceDef("FREE"), sequence),
        tau_multipliers=tuple(tau_multipliers),
        profile=profile_name,
        noise=noise,
        exact_probabilities=True,
        seed=seed,
    )
    rows = []
    cycle = LABELS_PER_REPETITION[sequence.family]
    for tau in tau_multipliers:
        free_refs = _free_references(spec, profile, tau, (0,), 0, initial, pulse_counts)
        labels = _labels_for(sequence, max(pulse_counts) // cycle)
        snapshot_map = _snapshot_indices(labels, tau, pulse_counts)
        schedule = compile_schedule(labels, profile, tau)
        run = ScheduledRun(
            initial=initial, schedule=schedule, noise=noise, qubits=(0,), seed=seed
        )
        rhos = run_schedule(run, snapshots=sorted(set(snapshot_map.values())))
        for n in pulse_counts:
            if n == 0:
                continue
            f = quantum.uhlmann_fidelity(rhos[snapshot_map[n]], free_refs[n])
            rows.append(
                {
                    "tau": tau,
                    "tau_ns": tau * profile.identity_slot_ns,
                    "n_pulses": n,
                    "fidelity": f,
                }
            )
    return rows
