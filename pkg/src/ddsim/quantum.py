"""Dense linear-algebra kernel: gates, states, density matrices, distances.

Conventions used throughout the package:

* Tensor factor 0 is the leftmost label in a ket string, so ``|10>`` means
  qubit 0 in state 1 and qubit 1 in state 0, and ``CNOT`` controls on the
  first factor.
* Rotations follow ``rotation(angle) = exp(+i * angle/2 * pauli)``; the
  Euler-form preparation unitary is ``i * Rz(phi) Ry(theta) Rz(lam)``.
  Up to a global phase this equals the common ``u3`` gate with all three
  angles negated.
* Gates and states are compared as rays (phase aligned) wherever a global
  phase is physically irrelevant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNITARITY_TOL = 1e-12
TRACE_TOL = 1e-9
PSD_TOL = 1e-9

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
SIGMA_PLUS = SIGMA_MINUS.conj().T

PAULIS = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}

_GATES = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z, "H": _H, "CNOT": _CNOT}


class QuantumValueError(ValueError):
    """Raised for invalid gate names, malformed states, or bad inputs."""


def standard_gate(name: str) -> np.ndarray:
    """Return a copy of a textbook gate matrix (I, X, Y, Z, H, CNOT)."""
    try:
        return _GATES[name].copy()
    except KeyError:
        raise QuantumValueError(f"unknown gate name: {name!r}") from None


def rotation_y(angle: float) -> np.ndarray:
    """exp(+i * angle/2 * sigma_y)."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, s], [-s, c]], dtype=complex)


def rotation_z(angle: float) -> np.ndarray:
    """exp(+i * angle/2 * sigma_z)."""
    return np.array(
        [[np.exp(1j * angle / 2), 0], [0, np.exp(-1j * angle / 2)]], dtype=complex
    )


@dataclass(frozen=True)
class EulerAngles:
    """Preparation angles (radians), reduced mod 2*pi at construction."""

    theta: float
    phi: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        for name in ("theta", "phi", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise QuantumValueError(f"non-finite Euler angle {name}={value!r}")
            object.__setattr__(self, name, float(value) % (2 * math.pi))

    def to_dict(self) -> dict:
        return {"theta": self.theta, "phi": self.phi, "lambda": self.lam}

    @classmethod
    def from_dict(cls, d: dict) -> "EulerAngles":
        return cls(theta=d["theta"], phi=d.get("phi", 0.0), lam=d.get("lambda", 0.0))


def euler_unitary(angles: EulerAngles) -> np.ndarray:
    """Single-qubit preparation unitary ``i * Rz(phi) Ry(theta) Rz(lam)``.

    ``euler_unitary(EulerAngles(pi, 0, pi))`` is exactly X and
    ``euler_unitary(EulerAngles(pi, 2*pi, 0))`` is exactly Y.
    """
    return 1j * (rotation_z(angles.phi) @ rotation_y(angles.theta) @ rotation_z(angles.lam))


def bell_prep(kind: str) -> list[tuple[str, tuple[int, ...]]]:
    """Ordered two-qubit gate list preparing a Bell state from ``|00>``.

    ``phi+`` gives (|00>+|11>)/sqrt(2); ``psi+`` gives (|01>+|10>)/sqrt(2).
    Gates are (name, qubit indices) pairs in circuit order.
    """
    key = kind.lower().replace("_", "").replace("-", "")
    if key in ("phi+", "phiplus"):
        return [("H", (0,)), ("CNOT", (0, 1))]
    if key in ("psi+", "psiplus"):
        return [("H", (0,)), ("CNOT", (0, 1)), ("X", (1,))]
    raise QuantumValueError(f"unknown Bell state kind: {kind!r}")


def circuit_unitary(gates: list[tuple[str, tuple[int, ...]]], n_qubits: int) -> np.ndarray:
    """Compose a gate list (circuit order) into one unitary on n_qubits."""
    u = np.eye(2**n_qubits, dtype=complex)
    for name, qubits in gates:
        u = embed_gate(standard_gate(name), qubits, n_qubits) @ u
    return u


def embed_gate(gate: np.ndarray, qubits: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Lift a 1- or 2-qubit gate onto the given wires of an n-qubit register."""
    if len(qubits) == 1 and gate.shape == (2, 2):
        ops = [gate if q == qubits[0] else _I2 for q in range(n_qubits)]
        return tensor(*ops)
    if len(qubits) == 2 and gate.shape == (4, 4):
        if qubits != (qubits[0], qubits[0] + 1):
            raise QuantumValueError("two-qubit gates only on adjacent ascending wires")
        ops = []
        q = 0
        while q < n_qubits:
            if q == qubits[0]:
                ops.append(gate)
                q += 2
            else:
                ops.append(_I2)
                q += 1
        return tensor(*ops)
    raise QuantumValueError(f"cannot embed gate of shape {gate.shape} on {qubits}")


def tensor(*ops: np.ndarray) -> np.ndarray:
    out = np.array([[1.0 + 0j]]) if ops[0].ndim == 2 else np.array([1.0 + 0j])
    for op in ops:
        out = np.kron(out, op)
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def basis_state(dim: int, index: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def ket(label: str) -> np.ndarray:
    """Computational basis ket from a bit string, qubit 0 leftmost."""
    index = int(label, 2)
    return basis_state(2 ** len(label), index)


def density(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def pauli_eigenstates() -> list[np.ndarray]:
    """The six single-qubit Pauli eigenstates, in the fixed order
    [|0>, |1>, |+>, |->, |+i>, |-i>]."""
    s = 1 / math.sqrt(2)
    return [
        np.array([1, 0], dtype=complex),
        np.array([0, 1], dtype=complex),
        np.array([s, s], dtype=complex),
        np.array([s, -s], dtype=complex),
        np.array([s, 1j * s], dtype=complex),
        np.array([s, -1j * s], dtype=complex),
    ]


def haar_random_state(rng: np.random.Generator) -> np.ndarray:
    """Single-qubit state drawn uniformly on the Bloch sphere.

    Uses cos(theta) uniform in [-1, 1] and an azimuthal angle uniform in
    [0, 2*pi); deterministic given the generator state.
    """
    u = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2 * math.pi)
    theta = math.acos(u)
    return np.array(
        [math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], dtype=complex
    )


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one factor of a bipartite density matrix.

    dims is (dim_A, dim_B); keep=0 returns the A factor, keep=1 the B factor.
    """
    da, db = dims
    if rho.shape != (da * db, da * db):
        raise QuantumValueError(f"shape {rho.shape} does not match dims {dims}")
    r = rho.reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    if keep == 1:
        return np.einsum("ijik->jk", r)
    raise QuantumValueError("keep must be 0 or 1")


def is_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    d = u.shape[0]
    return bool(np.max(np.abs(dagger(u) @ u - np.eye(d))) < tol)


def validate_density_matrix(
    rho: np.ndarray,
    herm_tol: float = UNITARITY_TOL,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = PSD_TOL,
) -> None:
    """Raise QuantumValueError unless rho is Hermitian, unit trace, PSD."""
    if np.max(np.abs(rho - dagger(rho))) > herm_tol:
        raise QuantumValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol or abs(np.trace(rho).imag) > trace_tol:
        raise QuantumValueError(f"density matrix trace {np.trace(rho)} != 1")
    evals = np.linalg.eigvalsh((rho + dagger(rho)) / 2)
    if evals.min() < -psd_tol:
        raise QuantumValueError(f"density matrix has eigenvalue {evals.min():.3e} < 0")


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of rho - sigma."""
    if rho.shape != sigma.shape:
        raise QuantumValueError("trace_distance: dimension mismatch")
    diff = (rho - sigma + dagger(rho - sigma)) / 2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def _psd_sqrt(rho: np.ndarray, psd_tol: float) -> np.ndarray:
    evals, vecs = np.linalg.eigh((rho + dagger(rho)) / 2)
    if evals.min() < -psd_tol:
        raise QuantumValueError(f"matrix not PSD: min eigenvalue {evals.min():.3e}")
    return (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ dagger(vecs)


def uhlmann_fidelity(rho1: np.ndarray, rho2: np.ndarray, psd_tol: float = 1e-8) -> float:
    """Squared trace norm of sqrt(rho1) sqrt(rho2); symmetric, in [0, 1]."""
    if rho1.shape != rho2.shape:
        raise QuantumValueError("uhlmann_fidelity: dimension mismatch")
    a = _psd_sqrt(rho1, psd_tol) @ _psd_sqrt(rho2, psd_tol)
    f = float(np.sum(np.linalg.svd(a, compute_uv=False)) ** 2)
    return min(max(f, 0.0), 1.0)


def ray_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """True when a and b agree up to a single global phase."""
    if a.shape != b.shape:
        return False
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(a[idx]) < tol:
        return bool(np.max(np.abs(b)) < tol)
    if abs(b[idx]) < tol:
        return False
    phase = b[idx] / a[idx]
    phase /= abs(phase)
    return bool(np.max(np.abs(a * phase - b)) < tol)
