"""QASM 2.0 emission for single sweep cells, plus a validator for the
emitted subset.

Programs use the gate set {u3, x, y, z, h, id, cx} and measure. Idle slots
(identity labels and stretched pulse spacing) become explicit ``id`` gates.
State preparation emits ``u3(-theta, -phi, -lambda)``, which matches the
internal Euler-form preparation unitary up to global phase; the inverse
preparation closes single-qubit circuits before measurement. Bell cells
start from h / cx (plus x for the odd-parity pair) and measure both qubits
without unpreparation.
"""

from __future__ import annotations

import math
from .quantum import EulerAngles, bell_prep
from .sequences import (
    LABELS_PER_REPETITION,
    SequenceDef,
    build_sequence,
)


class QasmError(ValueError):
    """Emitted text failed validation."""


def _num(x: float) -> str:
    if x == int(x):
        return str(int(x))
    return repr(float(x))


def _prep_params(angles: EulerAngles) -> tuple[float, float, float]:
    def signed(v: float) -> float:
        return -v if v != 0.0 else 0.0

    return signed(angles.theta), signed(angles.phi), signed(angles.lam)


def _u3(params: tuple[float, float, float], qubit: int) -> str:
    a, b, c = params
    return f"u3({_num(a)},{_num(b)},{_num(c)}) q[{qubit}];"


def _inverse_u3(params: tuple[float, float, float]) -> tuple[float, float, float]:
    a, b, c = params
    return (-a, -c, -b)


def export_qasm(
    sequence: SequenceDef,
    n_pulses: int,
    initial: EulerAngles | str,
    tau_multiplier: int = 1,
    creg_name: str = "c",
) -> str:
    """Emit one experiment cell as a deterministic QASM 2.0 program."""
    cycle = LABELS_PER_REPETITION[sequence.family]
    if n_pulses < 0 or n_pulses % cycle != 0:
        raise QasmError(f"{n_pulses} is not a multiple of the {sequence.family} cycle")
    if tau_multiplier < 1 or int(tau_multiplier) != tau_multiplier:
        raise QasmError("tau_multiplier must be an integer >= 1")
    reps = n_pulses // cycle
    labels = build_sequence(
        SequenceDef(sequence.family, repetitions=max(reps, 1), p1=sequence.p1, p2=sequence.p2)
    )[:n_pulses]

    bell = isinstance(initial, str)
    n_qubits = 2 if bell else 1
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{n_qubits}];",
        f"creg {creg_name}[{n_qubits}];",
    ]
    if bell:
        for name, qubits in bell_prep(initial):
            if name == "CNOT":
                lines.append(f"cx q[{qubits[0]}],q[{qubits[1]}];")
            else:
                lines.append(f"{name.lower()} q[{qubits[0]}];")
    else:
        params = _prep_params(initial)
        lines.append(_u3(params, 0))

    for lab in labels:
        if lab.is_identity:
            for q in range(n_qubits):
                lines.append(f"id q[{q}];")
        else:
            gate = lab.pauli.lower()
            for q in range(n_qubits):
                lines.append(f"{gate} q[{q}];")
            for _ in range(int(tau_multiplier) - 1):
                for q in range(n_qubits):
                    lines.append(f"id q[{q}];")

    if not bell:
        lines.append(_u3(_inverse_u3(params), 0))
    for q in range(n_qubits):
        lines.append(f"measure q[{q}] -> {creg_name}[{q}];")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Validator for the emitted subset
# --------------------------------------------------------------------------

_GATE_ARITY = {"u3": (3, 1), "x": (0, 1), "y": (0, 1), "z": (0, 1),
               "h": (0, 1), "id": (0, 1), "cx": (0, 2)}

_PUNCT = ("->", "(", ")", "[", "]", ",", ";")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise QasmError("unterminated string literal")
            tokens.append(("str", text[i + 1 : j]))
            i = j + 1
            continue
        if text.startswith("->", i):
            tokens.append(("punct", "->"))
            i += 2
            continue
        if ch in "()[],;":
            tokens.append(("punct", ch))
            i += 1
            continue
        if ch.isdigit() or ch == "." or (ch == "-" and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] == ".")):
            j = i + 1 if ch == "-" else i
            while j < n and (text[j].isdigit() or text[j] in ".eE" or (text[j] in "+-" and text[j - 1] in "eE")):
                j += 1
            tokens.append(("num", text[i:j]))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("id", text[i:j]))
            i = j
            continue
        raise QasmError(f"unexpected character {ch!r} at offset {i}")
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else ("eof", "")

    def take(self, kind=None, value=None):
        tk, tv = self.peek()
        if (kind is not None and tk != kind) or (value is not None and tv != value):
            raise QasmError(f"expected {value or kind}, got {tv!r} (token {self.pos})")
        self.pos += 1
        return tv

    def number(self) -> float:
        tv = self.take("num")
        try:
            return float(tv)
        except ValueError:
            raise QasmError(f"bad numeric literal {tv!r}") from None


def validate_qasm(text: str) -> None:
    """Parse the emitted QASM subset; raise QasmError on any deviation."""
    p = _Parser(_tokenize(text))
    p.take("id", "OPENQASM")
    if p.number() != 2.0:
        raise QasmError("only version 2.0 is supported")
    p.take("punct", ";")
    if p.peek() == ("id", "include"):
        p.take("id", "include")
        if p.take("str") != "qelib1.inc":
            raise QasmError("unexpected include file")
        p.take("punct", ";")

    registers: dict[str, tuple[str, int]] = {}

    def argument(expect_kind: str) -> None:
        name = p.take("id")
        if name not in registers:
            raise QasmError(f"use of undeclared register {name!r}")
        rkind, size = registers[name]
        if rkind != expect_kind:
            raise QasmError(f"register {name!r} is a {rkind}, expected {expect_kind}")
        p.take("punct", "[")
        idx = p.number()
        if idx != int(idx) or not 0 <= int(idx) < size:
            raise QasmError(f"index {idx} out of range for {name!r}[{size}]")
        p.take("punct", "]")

    while p.peek() != ("eof", ""):
        tk, tv = p.peek()
        if tk != "id":
            raise QasmError(f"expected statement, got {tv!r}")
        if tv in ("qreg", "creg"):
            p.take("id")
            name = p.take("id")
            p.take("punct", "[")
            size = p.number()
            if size != int(size) or size < 1:
                raise QasmError(f"bad register size {size}")
            p.take("punct", "]")
            p.take("punct", ";")
            if name in registers:
                raise QasmError(f"register {name!r} declared twice")
            registers[name] = ("qreg" if tv == "qreg" else "creg", int(size))
        elif tv == "measure":
            p.take("id")
            argument("qreg")
            p.take("punct", "->")
            argument("creg")
            p.take("punct", ";")
        elif tv in _GATE_ARITY:
            p.take("id")
            n_params, n_args = _GATE_ARITY[tv]
            if n_params:
                p.take("punct", "(")
                for i in range(n_params):
                    if i:
                        p.take("punct", ",")
                    value = p.number()
                    if not math.isfinite(value):
                        raise QasmError("non-finite gate parameter")
                p.take("punct", ")")
            for i in range(n_args):
                if i:
                    p.take("punct", ",")
                argument("qreg")
            p.take("punct", ";")
        else:
            raise QasmError(f"unsupported statement {tv!r}")
