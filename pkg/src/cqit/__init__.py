"""Counterfactual quantum-information transfer through a nested Michelson
interferometer with a quantum-dot spin in a double-sided microcavity."""

from .analysis import (
    FidelityReport,
    MeasurementOutcome,
    average_fidelity,
    complete_transfer,
    entanglement_probability,
    realistic_success_probability,
)
from .cavity import (
    CavityParams,
    Direction,
    IdealCavity,
    RealisticCavity,
    ScatteringCoeffs,
    coefficients,
    ideal_scatter,
    realistic_scatter,
)
from .interferometer import (
    ProtocolConfig,
    RecursionPoint,
    RunResult,
    exact_recursion_run,
    inner_cycle,
    outer_cycle,
    readout,
    recursion_run,
    recursion_step,
    run_inner,
    run_protocol,
)
from .state import (
    Detector,
    HybridState,
    Polarization,
    Spin,
    SpinState,
    absorb,
    make_initial,
    norm2,
    overlap,
    phase_flip_R,
    spr_rotate,
)

__version__ = "0.1.0"
