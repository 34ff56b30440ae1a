"""Piecewise-constant propagation of pulse schedules under noise.

Every schedule slot has a constant generator, so propagation uses exact
matrix exponentials: unitary conjugation when the slot is purely coherent,
a vectorized Liouvillian exponential when dissipators or depolarizing are
active. Density matrices are stored row-major vectorized for superoperator
application.

Random streams are derived from ``(seed, trajectory_index)`` through
``numpy.random.SeedSequence`` so ensemble members are independent of
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import quantum
from .noise import NoiseConfiguration, ReadoutModel, apply_readout
from .quantum import EulerAngles
from .sequences import PulseLabel, PulseSchedule, Slot

TRACE_GUARD = 1e-9
_MAX_SUBDIVIDE = 12


class EngineError(RuntimeError):
    """Propagation failed or the run is outside supported dimensions."""


# --------------------------------------------------------------------------
# Superoperator primitives (row-major vec convention)
# --------------------------------------------------------------------------

def unitary_superop(u: np.ndarray) -> np.ndarray:
    return np.kron(u, u.conj())


def hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    d = h.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def dissipator_superop(rate: float, op: np.ndarray) -> np.ndarray:
    d = op.shape[0]
    eye = np.eye(d)
    anti = op.conj().T @ op
    return rate * (
        np.kron(op, op.conj())
        - 0.5 * np.kron(anti, eye)
        - 0.5 * np.kron(eye, anti.T)
    )


def depolarizing_superop(p: float, n_qubits: int, target: int, extra_dim: int = 1) -> np.ndarray:
    """rho -> (1-p) rho + p * (I/2 (x) tr_target rho) on one system qubit.

    The Bloch vector of the target qubit shrinks by (1-p); the average gate
    error of this channel is p/2. ``extra_dim`` appends an untouched factor
    (the bath) after the system qubits.
    """
    dim = 2**n_qubits * extra_dim
    twirl = np.zeros((dim * dim, dim * dim), dtype=complex)
    for name in ("I", "X", "Y", "Z"):
        ops = [quantum.PAULIS[name] if q == target else np.eye(2) for q in range(n_qubits)]
        if extra_dim > 1:
            ops.append(np.eye(extra_dim))
        full = quantum.tensor(*[op.astype(complex) for op in ops])
        twirl += 0.25 * unitary_superop(full)
    return (1.0 - p) * np.eye(dim * dim, dtype=complex) + p * twirl


def _apply_map(kind: str, mat: np.ndarray, rho: np.ndarray) -> np.ndarray:
    if kind == "u":
        return mat @ rho @ mat.conj().T
    d = rho.shape[0]
    return (mat @ rho.reshape(-1)).reshape(d, d)


# --------------------------------------------------------------------------
# Slot map construction
# --------------------------------------------------------------------------

_AXES = {"X": "X", "Y": "Y", "Z": "Z"}


def _pulse_axis(label: PulseLabel, tilt: float) -> np.ndarray:
    nominal = quantum.PAULIS[_AXES[label.pauli]]
    if tilt == 0.0:
        return nominal
    toward = quantum.PAULIS["Z"] if label.pauli != "Z" else quantum.PAULIS["X"]
    return math.cos(tilt) * nominal + math.sin(tilt) * toward


@dataclass
class _RunContext:
    """Dimension bookkeeping plus one classical-noise realization."""

    n_sys: int
    bath_dim: int
    noise: NoiseConfiguration
    qubits: tuple[int, ...]
    profile_pulse_width: float
    deltas: tuple  # per system qubit: (starts, values) piecewise trajectories
    h_static: np.ndarray | None  # bath + coupling + detuning terms, or None
    dissipators: list[tuple[float, np.ndarray]]
    _cache: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return 2**self.n_sys * self.bath_dim

    @property
    def dissipative(self) -> bool:
        return bool(self.dissipators)

    def _embed_sys(self, op: np.ndarray, q: int) -> np.ndarray:
        ops = [op if k == q else np.eye(2, dtype=complex) for k in range(self.n_sys)]
        if self.bath_dim > 1:
            ops.append(np.eye(self.bath_dim, dtype=complex))
        return quantum.tensor(*ops)

    def delta_at(self, q: int, t: float) -> float:
        starts, values = self.deltas[q]
        idx = int(np.searchsorted(starts, t + 1e-12) - 1)
        return float(values[max(idx, 0)])

    def delta_segments(self, q: int, t0: float, t1: float) -> list[tuple[float, float]]:
        """(duration, value) pieces of the detuning trajectory over [t0, t1)."""
        starts, values = self.deltas[q]
        if len(values) == 1:
            return [(t1 - t0, float(values[0]))]
        pieces = []
        t = t0
        while t < t1 - 1e-12:
            idx = int(np.searchsorted(starts, t + 1e-12) - 1)
            idx = max(idx, 0)
            seg_end = starts[idx + 1] if idx + 1 < len(starts) else t1
            end = min(seg_end, t1)
            pieces.append((end - t, float(values[idx])))
            t = end
        return pieces

    def _hamiltonian(self, delta_values: tuple[float, ...], drive: np.ndarray | None) -> np.ndarray:
        dim = self.dim
        h = np.zeros((dim, dim), dtype=complex)
        if self.h_static is not None:
            h += self.h_static
        for q, dv in enumerate(delta_values):
            if dv != 0.0:
                h += 0.5 * dv * self._embed_sys(quantum.PAULIS["Z"], q)
        if drive is not None:
            h += drive
        return h

    def evolution_map(
        self,
        duration: float,
        delta_values: tuple[float, ...],
        drive_key: str | None = None,
        drive: np.ndarray | None = None,
    ) -> tuple[str, np.ndarray]:
        key = ("evo", round(duration, 9), delta_values, drive_key)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        h = self._hamiltonian(delta_values, drive)
        if self.dissipative:
            gen = hamiltonian_superop(h)
            for rate, op in self.dissipators:
                gen += dissipator_superop(rate, op)
            out = ("s", scipy.linalg.expm(gen * duration))
        else:
            out = ("u", scipy.linalg.expm(-1j * h * duration))
        self._cache[key] = out
        return out

    def pulse_unitary(self, label: PulseLabel) -> tuple[str, np.ndarray]:
        key = ("pulse-u", label.pauli)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        err = self.noise.pulse_error
        angle = math.pi * (1.0 + err.over_rotation)
        axis = _pulse_axis(label, err.axis_tilt_rad)
        u1 = scipy.linalg.expm(-1j * (angle / 2.0) * axis)
        full = np.array([[1.0 + 0j]])
        for _ in range(self.n_sys):
            full = np.kron(full, u1)
        if self.bath_dim > 1:
            full = np.kron(full, np.eye(self.bath_dim, dtype=complex))
        out = ("u", full)
        self._cache[key] = out
        return out

    def drive_hamiltonian(self, label: PulseLabel) -> np.ndarray:
        err = self.noise.pulse_error
        omega = math.pi * (1.0 + err.over_rotation) / self.profile_pulse_width
        axis = _pulse_axis(label, err.axis_tilt_rad)
        dim = self.dim
        h = np.zeros((dim, dim), dtype=complex)
        for q in range(self.n_sys):
            h += 0.5 * omega * self._embed_sys(axis, q)
        return h

    def depolarizing_maps(self) -> list[tuple[str, np.ndarray]]:
        key = ("depol",)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        maps = []
        for q, qubit_index in enumerate(self.qubits):
            p = self.noise.depolarizing_for(qubit_index)
            if p > 0:
                maps.append(("s", depolarizing_superop(p, self.n_sys, q, self.bath_dim)))
        self._cache[key] = maps
        return maps


def build_context(
    noise: NoiseConfiguration,
    qubits: tuple[int, ...],
    n_sys: int,
    pulse_width_ns: float,
    deltas: tuple | None = None,
) -> _RunContext:
    bath = noise.spin_bath
    bath_dim = 1
    h_static = None
    if bath is not None:
        if n_sys != 1:
            raise EngineError("spin-bath evolution supports single-qubit runs only")
        bath_dim = bath.bath_dim
        h_static = bath.total_hamiltonian()
    dissipators: list[tuple[float, np.ndarray]] = []
    if noise.lindblad:
        for q, qubit_index in enumerate(qubits):
            model = noise.lindblad_for(qubit_index)
            for rate, op in model.jump_operators():
                ops = [op if k == q else np.eye(2, dtype=complex) for k in range(n_sys)]
                if bath_dim > 1:
                    ops.append(np.eye(bath_dim, dtype=complex))
                dissipators.append((rate, quantum.tensor(*ops)))
    if deltas is None:
        deltas = tuple((np.array([0.0]), np.array([0.0])) for _ in range(n_sys))
    return _RunContext(
        n_sys=n_sys,
        bath_dim=bath_dim,
        noise=noise,
        qubits=qubits,
        profile_pulse_width=pulse_width_ns,
        deltas=deltas,
        h_static=h_static,
        dissipators=dissipators,
    )


def _checked(rho: np.ndarray, depth: int, redo) -> np.ndarray:
    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > TRACE_GUARD:
        if depth >= _MAX_SUBDIVIDE:
            raise EngineError(f"trace drifted to {trace} despite subdivision")
        return redo()
    return rho


def propagate_slot(rho: np.ndarray, slot: Slot, ctx: _RunContext, depth: int = 0) -> np.ndarray:
    """Advance a density matrix through one schedule slot.

    FREE slots integrate the free generator (classical detuning segments are
    honored piecewise). PULSE slots apply the pulse per the configured error
    model, then free evolution for the remaining slot time. A trace drift
    beyond 1e-9 triggers automatic time subdivision before failing.
    """
    t0, t1 = slot.start_ns, slot.start_ns + slot.duration_ns

    if slot.kind == "FREE":
        result = rho
        for dur, values in _merged_segments(ctx, t0, t1):
            kind, mat = ctx.evolution_map(dur, values)
            result = _apply_map(kind, mat, result)
        return _checked(result, depth, lambda: _subdivided_free(rho, slot, ctx, depth))

    if slot.kind != "PULSE" or slot.label is None:
        raise EngineError(f"cannot propagate slot kind {slot.kind!r}")

    err = ctx.noise.pulse_error
    result = rho
    if err.mode == "INSTANTANEOUS":
        kind, mat = ctx.pulse_unitary(slot.label)
        result = _apply_map(kind, mat, result)
        for kind, mat in ctx.depolarizing_maps():
            result = _apply_map(kind, mat, result)
        for dur, values in _merged_segments(ctx, t0, t1):
            kind, mat = ctx.evolution_map(dur, values)
            result = _apply_map(kind, mat, result)
    else:
        width = min(ctx.profile_pulse_width, slot.duration_ns)
        drive = ctx.drive_hamiltonian(slot.label)
        for dur, values in _merged_segments(ctx, t0, t0 + width):
            kind, mat = ctx.evolution_map(
                dur, values, drive_key=f"drive-{slot.label.pauli}", drive=drive
            )
            result = _apply_map(kind, mat, result)
        for kind, mat in ctx.depolarizing_maps():
            result = _apply_map(kind, mat, result)
        for dur, values in _merged_segments(ctx, t0 + width, t1):
            kind, mat = ctx.evolution_map(dur, values)
            result = _apply_map(kind, mat, result)
    return _checked(result, depth, lambda: propagate_slot(rho, slot, ctx, depth + 1))


def _merged_segments(ctx: _RunContext, t0: float, t1: float):
    """Common refinement of all system qubits' detuning segments in [t0, t1)."""
    if t1 <= t0 + 1e-12:
        return []
    per_qubit = [ctx.delta_segments(q, t0, t1) for q in range(ctx.n_sys)]
    if all(len(segs) == 1 for segs in per_qubit):
        return [(t1 - t0, tuple(segs[0][1] for segs in per_qubit))]
    cuts = {t0, t1}
    for segs in per_qubit:
        t = t0
        for dur, _ in segs:
            t += dur
            cuts.add(min(t, t1))
    out = []
    points = sorted(cuts)
    for a, b in zip(points[:-1], points[1:]):
        if b - a < 1e-12:
            continue
        mid = (a + b) / 2
        out.append((b - a, tuple(ctx.delta_at(q, mid) for q in range(ctx.n_sys))))
    return out


def _subdivided_free(rho: np.ndarray, slot: Slot, ctx: _RunContext, depth: int) -> np.ndarray:
    half = slot.duration_ns / 2
    first = Slot("FREE", half, slot.start_ns)
    second = Slot("FREE", half, slot.start_ns + half)
    out = propagate_slot(rho, first, ctx, depth + 1)
    return propagate_slot(out, second, ctx, depth + 1)


# --------------------------------------------------------------------------
# Whole-schedule runs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScheduledRun:
    """A complete prepare / evolve / unprepare / measure description."""

    initial: EulerAngles | str  # Euler angles, or a Bell kind ("phi+", "psi+")
    schedule: PulseSchedule
    noise: NoiseConfiguration
    qubits: tuple[int, ...] = (0,)
    shots: int = 8192
    seed: int = 0

    @property
    def is_bell(self) -> bool:
        return isinstance(self.initial, str)

    @property
    def n_sys(self) -> int:
        return 2 if self.is_bell else 1


def _prep_unitary(run: ScheduledRun) -> np.ndarray:
    if run.is_bell:
        return quantum.circuit_unitary(quantum.bell_prep(run.initial), 2)
    return quantum.euler_unitary(run.initial)


def trajectory_rng(seed: int, trajectory_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, trajectory_index)))


def _sample_deltas(run: ScheduledRun, trajectory_index: int) -> tuple:
    from .noise import sample_classical_trajectory

    classical = run.noise.classical
    n_sys = run.n_sys
    if classical is None:
        return tuple((np.array([0.0]), np.array([0.0])) for _ in range(n_sys))
    rng = trajectory_rng(run.seed, trajectory_index)
    duration = max(run.schedule.total_ns, 1.0)
    dt = _trajectory_dt(run)
    return tuple(
        sample_classical_trajectory(classical, duration, dt, rng) for _ in range(n_sys)
    )


def _trajectory_dt(run: ScheduledRun) -> float:
    durations = [s.duration_ns for s in run.schedule.slots]
    return min(durations) if durations else 1.0


def run_schedule(run: ScheduledRun, snapshots: list[int] | None = None):
    """Evolve the prepared state through the schedule and return the system
    density matrix (ensemble averaged, bath traced out, preparation undone
    for single-qubit runs; Bell runs are returned unrotated).

    With ``snapshots`` (sorted slot indices; index i means "after slot i
    slots"), returns a dict {index: rho} instead, evaluated in one pass.
    """
    n_sys = run.n_sys
    prep = _prep_unitary(run)
    classical = run.noise.classical
    n_traj = classical.realizations if classical is not None else 1
    width = _infer_pulse_width(run.schedule)
    bath = run.noise.spin_bath

    snap_points = sorted(snapshots) if snapshots is not None else [len(run.schedule.slots)]
    accum: dict[int, np.ndarray] = {}
    for m in range(n_traj):
        deltas = _sample_deltas(run, m)
        ctx = build_context(run.noise, run.qubits, n_sys, width, deltas)
        psi = prep @ quantum.basis_state(2**n_sys, 0)
        rho = quantum.density(psi)
        if bath is not None:
            rho = np.kron(rho, quantum.density(bath.bath_ground_state()))
        pos = 0
        for point in snap_points:
            while pos < point:
                rho = propagate_slot(rho, run.schedule.slots[pos], ctx)
                pos += 1
            accum[point] = accum.get(point, 0) + rho
    out: dict[int, np.ndarray] = {}
    for point, total in accum.items():
        rho = total / n_traj
        if bath is not None:
            rho = quantum.partial_trace(rho, (2**n_sys, bath.bath_dim), keep=0)
        if not run.is_bell:
            rho = prep.conj().T @ rho @ prep
        out[point] = rho
    if snapshots is None:
        return out[len(run.schedule.slots)]
    return out


def _infer_pulse_width(schedule: PulseSchedule) -> float:
    from .sequences import get_profile

    if schedule.profile_name:
        return get_profile(schedule.profile_name).pulse_width_ns
    durations = [s.duration_ns for s in schedule.slots if s.kind == "PULSE"]
    return durations[0] * 8.0 / 9.0 if durations else 80.0


@dataclass(frozen=True)
class MeasurementResult:
    counts: tuple[int, ...]
    probabilities: tuple[float, ...]
    fidelity: float  # fraction of all-zeros outcomes


def outcome_probabilities(rho: np.ndarray, readout: ReadoutModel | None) -> np.ndarray:
    p = np.clip(np.diag(rho).real, 0.0, None)
    p = p / p.sum()
    if readout is not None:
        p = apply_readout(readout, p)
    return p


def measure_shots(
    rho: np.ndarray,
    readout: ReadoutModel | None,
    shots: int,
    rng: np.random.Generator,
) -> MeasurementResult:
    """Sample computational-basis counts through the readout confusion."""
    if shots < 1:
        raise EngineError("shots must be >= 1")
    p = outcome_probabilities(rho, readout)
    counts = rng.multinomial(shots, p)
    return MeasurementResult(
        counts=tuple(int(c) for c in counts),
        probabilities=tuple(float(x) for x in p),
        fidelity=float(counts[0]) / shots,
    )


def exact_measurement(rho: np.ndarray, readout: ReadoutModel | None) -> MeasurementResult:
    """Shot-free limit: report the exact outcome distribution."""
    p = outcome_probabilities(rho, readout)
    return MeasurementResult(
        counts=(),
        probabilities=tuple(float(x) for x in p),
        fidelity=float(p[0]),
    )


# --------------------------------------------------------------------------
# First-order average-coupling verifier
# --------------------------------------------------------------------------

def toggling_frame_first_order(labels: list[PulseLabel], h_sb: np.ndarray) -> float:
    """Spectral norm of the first-order average of the toggled coupling.

    The coupling ``h_sb`` acts on (system qubit) x (bath); the k-th free
    interval sees the coupling conjugated by the product of all pulses up to
    and including pulse k (ideal, instantaneous pulses). Returns
    ``|| (1/N) sum_k U_k^dag h_sb U_k ||_2``.
    """
    dim = h_sb.shape[0]
    if dim % 2 != 0:
        raise EngineError("coupling must act on a qubit tensor bath space")
    bath_dim = dim // 2
    eye_b = np.eye(bath_dim, dtype=complex)
    frame = np.eye(2, dtype=complex)
    total = np.zeros_like(h_sb)
    for lab in labels:
        if not lab.is_identity:
            frame = quantum.PAULIS[lab.pauli] @ frame
        u = np.kron(frame, eye_b)
        total += u.conj().T @ h_sb @ u
    total /= len(labels)
    return float(np.linalg.norm(total, ord=2))
