"""Dynamical-decoupling simulator and analysis toolkit.

Simulates pulse-sequence experiments on noisy superconducting qubits
(Markovian relaxation, coherent spin baths, stochastic dephasing, imperfect
pulses, readout confusion) and runs the matching statistical pipeline:
decay-model fits, curve-crossing times, infidelity-bound scaling, and
bootstrap error bars.
"""

__version__ = "0.1.0"

from .quantum import EulerAngles
from .sequences import DeviceTimingProfile, PulseLabel, PulseSchedule, SequenceDef
from .noise import (
    ClassicalDephasingNoise,
    LindbladModel,
    NoiseConfiguration,
    PulseErrorModel,
    QubitNoiseParams,
    ReadoutModel,
    SpinBathModel,
)
from .engine import ScheduledRun
from .experiments import ExperimentSpec
from .analysis import BoundAnalysis, FidelityCurve, FitResult
from .results import Record, ResultSet

__all__ = [
    "__version__",
    "EulerAngles",
    "DeviceTimingProfile",
    "PulseLabel",
    "PulseSchedule",
    "SequenceDef",
    "ClassicalDephasingNoise",
    "LindbladModel",
    "NoiseConfiguration",
    "PulseErrorModel",
    "QubitNoiseParams",
    "ReadoutModel",
    "SpinBathModel",
    "ScheduledRun",
    "ExperimentSpec",
    "BoundAnalysis",
    "FidelityCurve",
    "FitResult",
    "Record",
    "ResultSet",
]
