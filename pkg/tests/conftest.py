import numpy as np
import pytest

from ddsim.noise import (
    ClassicalDephasingNoise,
    NoiseConfiguration,
    PulseErrorModel,
    QubitNoiseParams,
)

# Lindblad rates from the IBMQX5 table's stored means plus a static-Gaussian
# dephasing ensemble calibrated so the free-evolution decay fit lands at
# lambda = 31 +- 1 per 90 ns slot (sigma frozen after a one-time scan).
CALIBRATED_SIGMA = 1.1e-3  # rad/ns


def calibrated_noise(realizations=200, qubits=(0,)):
    params = tuple(
        QubitNoiseParams(q, t1_us=44.3, t2_us=70.0, gate_error=0.0, readout_error=0.0)
        for q in qubits
    )
    return NoiseConfiguration(
        name="calibrated-ibmqx5",
        qubit_params=params,
        lindblad=True,
        classical=ClassicalDephasingNoise(
            kind="STATIC_GAUSSIAN", sigma=CALIBRATED_SIGMA, realizations=realizations
        ),
        pulse_error=PulseErrorModel(mode="FINITE_WIDTH"),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)
