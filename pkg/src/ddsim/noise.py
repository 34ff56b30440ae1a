"""Physical noise descriptions and device calibration data.

Rates and angular frequencies are in rad/ns (or 1/ns for decay rates),
durations in ns, and device table times in microseconds. Device tables are
plain CSV with one header row; bracketed unit tags in the header ([us],
[1e-3], [1e-2]) declare the column scaling.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import quantum

BUILTIN_TABLES = {"IBMQX5": "ibmqx5.csv", "ACORN": "acorn.csv", "IBMQX4": "ibmqx4.csv"}

CLASSICAL_NOISE_KINDS = ("STATIC_GAUSSIAN", "RTN", "OU")
PULSE_MODES = ("INSTANTANEOUS", "FINITE_WIDTH")


class NoiseModelError(ValueError):
    """Invalid noise parameters or malformed device tables."""


@dataclass(frozen=True)
class QubitNoiseParams:
    """Calibration numbers for one qubit, as probabilities and microseconds."""

    qubit_index: int
    t1_us: float
    t2_us: float
    gate_error: float
    readout_error: float

    def __post_init__(self):
        if self.t1_us <= 0 or self.t2_us <= 0:
            raise NoiseModelError(f"qubit {self.qubit_index}: T1 and T2 must be positive")
        if not (0 <= self.gate_error <= 1 and 0 <= self.readout_error <= 1):
            raise NoiseModelError(f"qubit {self.qubit_index}: errors must be probabilities")
        if self.t2_us > 2 * self.t1_us + 1e-12:
            raise NoiseModelError(
                f"qubit {self.qubit_index}: T2={self.t2_us} exceeds 2*T1={2 * self.t1_us}"
            )

    def to_dict(self) -> dict:
        return {
            "qubit_index": self.qubit_index,
            "t1_us": self.t1_us,
            "t2_us": self.t2_us,
            "gate_error": self.gate_error,
            "readout_error": self.readout_error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QubitNoiseParams":
        return cls(
            qubit_index=int(d["qubit_index"]),
            t1_us=float(d["t1_us"]),
            t2_us=float(d["t2_us"]),
            gate_error=float(d["gate_error"]),
            readout_error=float(d["readout_error"]),
        )


@dataclass(frozen=True)
class LindbladModel:
    """Markovian relaxation rates, in 1/ns.

    ``damping_rate`` multiplies the sigma_minus dissipator (1/T1) and
    ``dephasing_rate`` the sigma_z dissipator (1/(2*Tphi), with
    1/Tphi = 1/T2 - 1/(2*T1)).
    """

    damping_rate: float
    dephasing_rate: float

    def __post_init__(self):
        if self.damping_rate < 0 or self.dephasing_rate < 0:
            raise NoiseModelError("Lindblad rates must be nonnegative")

    def jump_operators(self) -> list[tuple[float, np.ndarray]]:
        ops = []
        if self.damping_rate > 0:
            ops.append((self.damping_rate, quantum.SIGMA_MINUS.copy()))
        if self.dephasing_rate > 0:
            ops.append((self.dephasing_rate, quantum.standard_gate("Z")))
        return ops


def lindblad_from_params(params: QubitNoiseParams) -> LindbladModel:
    """Split measured T1/T2 into damping and pure-dephasing rates."""
    t1_ns = params.t1_us * 1e3
    t2_ns = params.t2_us * 1e3
    inv_tphi = 1.0 / t2_ns - 1.0 / (2.0 * t1_ns)
    if inv_tphi < -1e-15:
        raise NoiseModelError("T2 > 2*T1: no valid pure-dephasing rate")
    return LindbladModel(damping_rate=1.0 / t1_ns, dephasing_rate=max(inv_tphi, 0.0) / 2.0)


@dataclass(frozen=True)
class SpinBathModel:
    """A small coherent bath of up to three qubits coupled to one system qubit.

    The joint Hamiltonian is H_S + H_B + H_SB with

    * H_S  = (detuning/2) Z on the system,
    * H_B  = -sum_j (splittings[j]/2) Z_j, so the bath ground state is |0...0>,
    * H_SB = sum_j sum_a couplings[j][a] sigma_a (x) X_j
             + exchange * sum_j (sigma- (x) raise_j + sigma+ (x) lower_j).

    All energies are angular frequencies in rad/ns.
    """

    splittings: tuple[float, ...]
    couplings: tuple[tuple[float, float, float], ...]
    detuning: float = 0.0
    exchange: float = 0.0

    def __post_init__(self):
        if len(self.splittings) != len(self.couplings):
            raise NoiseModelError("one coupling triple per bath qubit required")
        if not 1 <= len(self.splittings) <= 3:
            raise NoiseModelError("bath must have 1 to 3 qubits")
        values = list(self.splittings) + [g for trip in self.couplings for g in trip]
        if not all(math.isfinite(v) for v in values + [self.detuning, self.exchange]):
            raise NoiseModelError("bath parameters must be finite")
        object.__setattr__(self, "splittings", tuple(float(w) for w in self.splittings))
        object.__setattr__(
            self, "couplings", tuple(tuple(float(g) for g in t) for t in self.couplings)
        )

    @property
    def n_bath(self) -> int:
        return len(self.splittings)

    @property
    def bath_dim(self) -> int:
        return 2**self.n_bath

    def _bath_op(self, op: np.ndarray, j: int) -> np.ndarray:
        ops = [op if k == j else np.eye(2, dtype=complex) for k in range(self.n_bath)]
        return quantum.tensor(*ops)

    def system_hamiltonian(self) -> np.ndarray:
        hs = 0.5 * self.detuning * quantum.standard_gate("Z")
        return quantum.tensor(hs, np.eye(self.bath_dim, dtype=complex))

    def _bath_only_hamiltonian(self) -> np.ndarray:
        hb = np.zeros((self.bath_dim, self.bath_dim), dtype=complex)
        z = quantum.standard_gate("Z")
        for j, w in enumerate(self.splittings):
            hb += -0.5 * w * self._bath_op(z, j)
        return hb

    def bath_hamiltonian(self) -> np.ndarray:
        return quantum.tensor(np.eye(2, dtype=complex), self._bath_only_hamiltonian())

    def coupling_hamiltonian(self) -> np.ndarray:
        dim = 2 * self.bath_dim
        hsb = np.zeros((dim, dim), dtype=complex)
        x = quantum.standard_gate("X")
        for j, (gx, gy, gz) in enumerate(self.couplings):
            bath_x = self._bath_op(x, j)
            for g, name in ((gx, "X"), (gy, "Y"), (gz, "Z")):
                if g != 0.0:
                    hsb += g * quantum.tensor(quantum.standard_gate(name), bath_x)
        if self.exchange != 0.0:
            for j in range(self.n_bath):
                raise_j = self._bath_op(quantum.SIGMA_PLUS, j)
                lower_j = self._bath_op(quantum.SIGMA_MINUS, j)
                hsb += self.exchange * (
                    quantum.tensor(quantum.SIGMA_MINUS, raise_j)
                    + quantum.tensor(quantum.SIGMA_PLUS, lower_j)
                )
        return hsb

    def total_hamiltonian(self) -> np.ndarray:
        return self.system_hamiltonian() + self.bath_hamiltonian() + self.coupling_hamiltonian()

    def bath_ground_state(self) -> np.ndarray:
        """Ground state of H_B (|0...0> for positive splittings)."""
        evals, vecs = np.linalg.eigh(self._bath_only_hamiltonian())
        return vecs[:, int(np.argmin(evals))]

    def norms(self) -> tuple[float, float]:
        """Spectral norms (||H_B||, ||H_SB||)."""
        hb = np.linalg.norm(self.bath_hamiltonian(), ord=2)
        hsb = np.linalg.norm(self.coupling_hamiltonian(), ord=2)
        return float(hb), float(hsb)

    def bound_constant(self) -> float:
        """Coupling constant J*(B+J) entering the quadratic leakage bound,
        with J = ||H_SB|| and B = ||H_B||."""
        b, j = self.norms()
        return j * (b + j)

    def to_dict(self) -> dict:
        return {
            "splittings": list(self.splittings),
            "couplings": [list(t) for t in self.couplings],
            "detuning": self.detuning,
            "exchange": self.exchange,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpinBathModel":
        return cls(
            splittings=tuple(d["splittings"]),
            couplings=tuple(tuple(t) for t in d["couplings"]),
            detuning=float(d.get("detuning", 0.0)),
            exchange=float(d.get("exchange", 0.0)),
        )


@dataclass(frozen=True)
class ClassicalDephasingNoise:
    """Stochastic detuning of the system qubit, sampled per run realization.

    kind selects the process:

    * ``STATIC_GAUSSIAN``: constant detuning drawn from N(0, sigma^2)
    * ``RTN``: random telegraph, +-amplitude with the given flip rate
    * ``OU``: Ornstein-Uhlenbeck with stationary std ``amplitude`` and the
      given correlation time

    ``realizations`` is the ensemble size averaged over by the engine.
    """

    kind: str
    sigma: float = 0.0  # rad/ns, STATIC_GAUSSIAN
    amplitude: float = 0.0  # rad/ns, RTN and OU
    flip_rate: float = 0.0  # 1/ns, RTN
    correlation_ns: float = 0.0  # OU
    realizations: int = 200

    def __post_init__(self):
        if self.kind not in CLASSICAL_NOISE_KINDS:
            raise NoiseModelError(f"unknown classical noise kind: {self.kind!r}")
        if self.realizations < 1:
            raise NoiseModelError("realizations must be >= 1")
        if min(self.sigma, self.amplitude, self.flip_rate, self.correlation_ns) < 0:
            raise NoiseModelError("noise parameters must be nonnegative")
        if self.kind == "RTN" and self.flip_rate <= 0 and self.amplitude > 0:
            raise NoiseModelError("RTN needs a positive flip rate")
        if self.kind == "OU" and self.correlation_ns <= 0 and self.amplitude > 0:
            raise NoiseModelError("OU needs a positive correlation time")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sigma": self.sigma,
            "amplitude": self.amplitude,
            "flip_rate": self.flip_rate,
            "correlation_ns": self.correlation_ns,
            "realizations": self.realizations,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassicalDephasingNoise":
        return cls(
            kind=d["kind"],
            sigma=float(d.get("sigma", 0.0)),
            amplitude=float(d.get("amplitude", 0.0)),
            flip_rate=float(d.get("flip_rate", 0.0)),
            correlation_ns=float(d.get("correlation_ns", 0.0)),
            realizations=int(d.get("realizations", 200)),
        )


def sample_classical_trajectory(
    noise: ClassicalDephasingNoise,
    duration_ns: float,
    dt_ns: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-constant detuning over [0, duration): (segment starts, values).

    Deterministic given the generator state. Segments have length dt_ns
    (the last one may be shorter); STATIC_GAUSSIAN always yields a single
    segment covering the full duration.
    """
    if dt_ns <= 0:
        raise NoiseModelError("dt_ns must be positive")
    if noise.kind == "STATIC_GAUSSIAN":
        value = rng.normal(0.0, noise.sigma) if noise.sigma > 0 else 0.0
        return np.array([0.0]), np.array([value])
    n_seg = max(1, int(math.ceil(duration_ns / dt_ns - 1e-12)))
    starts = np.arange(n_seg) * dt_ns
    values = np.zeros(n_seg)
    if noise.kind == "RTN":
        if noise.amplitude > 0:
            sign = 1.0 if rng.random() < 0.5 else -1.0
            p_flip = 1.0 - math.exp(-noise.flip_rate * dt_ns)
            flips = rng.random(n_seg) < p_flip
            for i in range(n_seg):
                if i > 0 and flips[i]:
                    sign = -sign
                values[i] = sign * noise.amplitude
    elif noise.kind == "OU":
        if noise.amplitude > 0:
            decay = math.exp(-dt_ns / noise.correlation_ns)
            kick = noise.amplitude * math.sqrt(1.0 - decay * decay)
            x = rng.normal(0.0, noise.amplitude)
            for i in range(n_seg):
                values[i] = x
                x = x * decay + kick * rng.normal()
    return starts, values


@dataclass(frozen=True)
class PulseErrorModel:
    """Imperfections applied to every non-identity pulse.

    ``mode`` is INSTANTANEOUS (ideal-duration unitary at the slot start) or
    FINITE_WIDTH (constant resonant drive over the profile's pulse width with
    the noise generator active). ``over_rotation`` scales the pi rotation to
    pi*(1+over_rotation); ``axis_tilt_rad`` tips the rotation axis toward z
    (toward x for z-axis pulses); ``depolarizing_prob`` applies a single-qubit
    depolarizing channel after each pulse.
    """

    mode: str = "INSTANTANEOUS"
    over_rotation: float = 0.0
    axis_tilt_rad: float = 0.0
    depolarizing_prob: float = 0.0

    def __post_init__(self):
        if self.mode not in PULSE_MODES:
            raise NoiseModelError(f"unknown pulse mode: {self.mode!r}")
        if self.over_rotation < 0 or self.axis_tilt_rad < 0:
            raise NoiseModelError("over_rotation and axis_tilt_rad must be >= 0")
        if not 0 <= self.depolarizing_prob <= 1:
            raise NoiseModelError("depolarizing_prob must be a probability")

    @property
    def is_ideal_instantaneous(self) -> bool:
        return (
            self.mode == "INSTANTANEOUS"
            and self.over_rotation == 0.0
            and self.axis_tilt_rad == 0.0
            and self.depolarizing_prob == 0.0
        )

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "over_rotation": self.over_rotation,
            "axis_tilt_rad": self.axis_tilt_rad,
            "depolarizing_prob": self.depolarizing_prob,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PulseErrorModel":
        return cls(
            mode=d.get("mode", "INSTANTANEOUS"),
            over_rotation=float(d.get("over_rotation", 0.0)),
            axis_tilt_rad=float(d.get("axis_tilt_rad", 0.0)),
            depolarizing_prob=float(d.get("depolarizing_prob", 0.0)),
        )


@dataclass(frozen=True)
class ReadoutModel:
    """Per-qubit 2x2 confusion matrices, columns summing to one.

    ``confusions[q][a][b]`` is Pr(report a | true b) for qubit q.
    """

    confusions: tuple[tuple[tuple[float, float], tuple[float, float]], ...]

    def __post_init__(self):
        for q, c in enumerate(self.confusions):
            m = np.asarray(c, dtype=float)
            if m.shape != (2, 2) or (m < -1e-12).any() or (m > 1 + 1e-12).any():
                raise NoiseModelError(f"qubit {q}: confusion entries must be in [0, 1]")
            if np.max(np.abs(m.sum(axis=0) - 1.0)) > 1e-9:
                raise NoiseModelError(f"qubit {q}: confusion columns must sum to 1")

    @classmethod
    def symmetric(cls, readout_errors: list[float]) -> "ReadoutModel":
        """Equal 0->1 and 1->0 flip probability per qubit."""
        mats = []
        for e in readout_errors:
            mats.append(((1.0 - e, e), (e, 1.0 - e)))
        return cls(tuple(mats))

    @classmethod
    def ideal(cls, n_qubits: int) -> "ReadoutModel":
        return cls.symmetric([0.0] * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.confusions)

    def matrix(self) -> np.ndarray:
        """Joint confusion matrix on the full register (tensor product)."""
        m = np.array([[1.0]])
        for c in self.confusions:
            m = np.kron(m, np.asarray(c, dtype=float))
        return m

    def to_dict(self) -> dict:
        return {"confusions": [[list(row) for row in c] for c in self.confusions]}

    @classmethod
    def from_dict(cls, d: dict) -> "ReadoutModel":
        return cls(tuple(tuple(tuple(row) for row in c) for c in d["confusions"]))


def apply_readout(model: ReadoutModel, true_probs: np.ndarray) -> np.ndarray:
    """Map true outcome probabilities through the confusion matrices."""
    p = np.asarray(true_probs, dtype=float)
    if p.ndim != 1 or p.size != 2**model.n_qubits:
        raise NoiseModelError("probability vector has the wrong length")
    if (p < -1e-9).any() or abs(p.sum() - 1.0) > 1e-6:
        raise NoiseModelError("probabilities must be nonnegative and sum to 1")
    out = model.matrix() @ p
    return out / out.sum()


# --------------------------------------------------------------------------
# Device tables
# --------------------------------------------------------------------------

@dataclass
class DeviceTable:
    """Parsed calibration table plus computed/stored column summaries."""

    name: str
    params: list[QubitNoiseParams]
    computed_mean: dict[str, float]
    computed_sd: dict[str, float]
    stored_mean: dict[str, float] = field(default_factory=dict)
    stored_sd: dict[str, float] = field(default_factory=dict)
    mismatches: list[str] = field(default_factory=list)

    def param_for(self, qubit_index: int) -> QubitNoiseParams:
        for p in self.params:
            if p.qubit_index == qubit_index:
                return p
        raise NoiseModelError(f"no qubit {qubit_index} in table {self.name!r}")


_COLUMN_KEYS = {
    "t1": "t1_us",
    "t2": "t2_us",
    "t2*": "t2_us",
    "gate error": "gate_error",
    "readout error": "readout_error",
    "gate fidelity": "gate_fidelity",
    "readout fidelity": "readout_fidelity",
}


def _classify_header(name: str) -> tuple[str | None, float]:
    """Map a header cell to a canonical key and unit scale."""
    text = name.strip()
    scale = 1.0
    if "[" in text:
        text, bracket = text.split("[", 1)
        bracket = bracket.strip("] ").lower()
        if bracket in ("1e-3", "10^-3"):
            scale = 1e-3
        elif bracket in ("1e-2", "10^-2"):
            scale = 1e-2
        elif bracket in ("us", "µs", "mus"):
            scale = 1.0
    text = text.strip().lower()
    for prefix, key in _COLUMN_KEYS.items():
        if text == prefix or text.startswith(prefix):
            return key, scale
    if text == "qubit":
        return "qubit", 1.0
    return None, 1.0


def load_device_table(csv_text: str, name: str = "") -> DeviceTable:
    """Parse a calibration CSV into per-qubit parameters with summaries.

    Requires Qubit, T1, T2, Gate error and Readout Error columns. Fidelity
    columns, when present, are cross-checked as one minus the matching error,
    and Mean/SD rows are compared against computed summaries. Inconsistencies
    beyond display rounding are reported in ``mismatches`` without failing the
    load, so tables can be shipped exactly as published.
    """
    reader = csv.reader(io.StringIO(csv_text))
    rows = [r for r in reader if any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise NoiseModelError("device table needs a header row and at least one qubit row")
    header = rows[0]
    columns: dict[int, tuple[str, float]] = {}
    for i, cell in enumerate(header):
        key, scale = _classify_header(cell)
        if key is not None:
            columns[i] = (key, scale)
    present = {key for key, _ in columns.values()}
    for required in ("qubit", "t1_us", "t2_us", "gate_error", "readout_error"):
        if required not in present:
            raise NoiseModelError(f"device table missing column {required!r}")

    params: list[QubitNoiseParams] = []
    stored: dict[str, dict[str, float]] = {}
    values: dict[str, list[float]] = {}
    mismatches: list[str] = []
    for row in rows[1:]:
        cells = {key: row[i].strip() for i, (key, _) in columns.items()}
        scales = {key: s for _, (key, s) in columns.items()}
        label = cells["qubit"].lower()
        if label in ("mean", "sd"):
            stored[label] = {
                key: float(cells[key]) * scales[key]
                for key in cells
                if key != "qubit" and cells[key]
            }
            continue
        try:
            parsed = {
                key: float(cells[key]) * scales[key] for key in cells if key != "qubit"
            }
            qubit_index = int(cells["qubit"])
        except ValueError as exc:
            raise NoiseModelError(f"malformed device table row {row!r}") from exc
        p = QubitNoiseParams(
            qubit_index=qubit_index,
            t1_us=parsed["t1_us"],
            t2_us=parsed["t2_us"],
            gate_error=parsed["gate_error"],
            readout_error=parsed["readout_error"],
        )
        for fid_key, err_key in (
            ("gate_fidelity", "gate_error"),
            ("readout_fidelity", "readout_error"),
        ):
            if fid_key in parsed and abs(parsed[fid_key] - (1.0 - parsed[err_key])) > 5e-4:
                mismatches.append(
                    f"qubit {qubit_index}: {fid_key} {parsed[fid_key]:g} "
                    f"vs 1 - {err_key} = {1.0 - parsed[err_key]:g}"
                )
        params.append(p)
        for key, value in parsed.items():
            values.setdefault(key, []).append(value)
    if not params:
        raise NoiseModelError("device table has no qubit rows")

    computed_mean = {k: float(np.mean(v)) for k, v in values.items()}
    computed_sd = {k: float(np.std(v, ddof=1)) for k, v in values.items()}
    for key, stated in stored.get("mean", {}).items():
        tol = {"t1_us": 0.05, "t2_us": 0.05}.get(key, abs(stated) * 0.01 + 5e-4)
        if abs(computed_mean.get(key, stated) - stated) > tol:
            mismatches.append(
                f"mean[{key}] stored {stated:g} vs computed {computed_mean[key]:g}"
            )
    return DeviceTable(
        name=name,
        params=params,
        computed_mean=computed_mean,
        computed_sd=computed_sd,
        stored_mean=stored.get("mean", {}),
        stored_sd=stored.get("sd", {}),
        mismatches=mismatches,
    )


def load_builtin_table(device: str) -> DeviceTable:
    """Load one of the shipped calibration tables (IBMQX5, ACORN, IBMQX4)."""
    from importlib import resources

    key = device.upper()
    try:
        filename = BUILTIN_TABLES[key]
    except KeyError:
        raise NoiseModelError(f"no built-in table for device {device!r}") from None
    text = resources.files("ddsim.data").joinpath(filename).read_text(encoding="utf-8")
    return load_device_table(text, name=key)


# --------------------------------------------------------------------------
# Run-level configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseConfiguration:
    """Which noise mechanisms are active for a run, and their parameters.

    ``qubit_params`` feeds Lindblad relaxation, depolarizing strength derived
    from the tabulated gate error (depolarizing_prob = 2 * gate_error, the
    average-gate-error conversion for a qubit), and symmetric readout
    confusion. Any part can also be supplied or disabled explicitly.
    """

    name: str = "none"
    qubit_params: tuple[QubitNoiseParams, ...] = ()
    lindblad: bool = False
    spin_bath: SpinBathModel | None = None
    classical: ClassicalDephasingNoise | None = None
    pulse_error: PulseErrorModel = PulseErrorModel()
    readout: bool = False
    gate_depolarizing_from_table: bool = False

    def params_for(self, qubit_index: int) -> QubitNoiseParams | None:
        for p in self.qubit_params:
            if p.qubit_index == qubit_index:
                return p
        return None

    def lindblad_for(self, qubit_index: int) -> LindbladModel | None:
        if not self.lindblad:
            return None
        p = self.params_for(qubit_index)
        if p is None:
            raise NoiseModelError(f"no Lindblad parameters for qubit {qubit_index}")
        return lindblad_from_params(p)

    def depolarizing_for(self, qubit_index: int) -> float:
        prob = self.pulse_error.depolarizing_prob
        if self.gate_depolarizing_from_table:
            p = self.params_for(qubit_index)
            if p is None:
                raise NoiseModelError(f"no gate error for qubit {qubit_index}")
            prob = min(1.0, prob + 2.0 * p.gate_error)
        return prob

    def readout_for(self, qubit_indices: list[int]) -> ReadoutModel | None:
        if not self.readout:
            return None
        errors = []
        for q in qubit_indices:
            p = self.params_for(q)
            if p is None:
                raise NoiseModelError(f"no readout error for qubit {q}")
            errors.append(p.readout_error)
        return ReadoutModel.symmetric(errors)

    def pulse_error_for(self, qubit_index: int) -> PulseErrorModel:
        prob = self.depolarizing_for(qubit_index)
        if prob == self.pulse_error.depolarizing_prob:
            return self.pulse_error
        return replace(self.pulse_error, depolarizing_prob=prob)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "qubit_params": [p.to_dict() for p in self.qubit_params],
            "lindblad": self.lindblad,
            "spin_bath": self.spin_bath.to_dict() if self.spin_bath else None,
            "classical": self.classical.to_dict() if self.classical else None,
            "pulse_error": self.pulse_error.to_dict(),
            "readout": self.readout,
            "gate_depolarizing_from_table": self.gate_depolarizing_from_table,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseConfiguration":
        return cls(
            name=d.get("name", "none"),
            qubit_params=tuple(
                QubitNoiseParams.from_dict(p) for p in d.get("qubit_params", [])
            ),
            lindblad=bool(d.get("lindblad", False)),
            spin_bath=SpinBathModel.from_dict(d["spin_bath"]) if d.get("spin_bath") else None,
            classical=(
                ClassicalDephasingNoise.from_dict(d["classical"])
                if d.get("classical")
                else None
            ),
            pulse_error=PulseErrorModel.from_dict(d.get("pulse_error", {})),
            readout=bool(d.get("readout", False)),
            gate_depolarizing_from_table=bool(d.get("gate_depolarizing_from_table", False)),
        )


NO_NOISE = NoiseConfiguration()
