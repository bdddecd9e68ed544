"""Phase-sensitive two-channel optical memory in a tripod atomic ensemble."""

from .analytic import (
    BeamPair,
    MagneticEnvironment,
    PolaritonState,
    ProbePulse,
    SpinWaveState,
    compensation_phase,
    compose_spin_wave,
    evolve,
    mixing_angle,
    projected_population,
    read,
    readout_intensity,
    retrieval_efficiency,
    store,
    superposition_populations,
    total_phase,
    wrap_phase,
)

__version__ = "0.1.0"
