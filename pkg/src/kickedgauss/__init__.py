"""Classical and quantum dynamics of a particle kicked by a Gaussian potential.

Modules
-------
classical
    The area-preserving map, its tangent map, periodic orbits, ensembles,
    coarse-grained fidelity and trajectory scattering.
quantum
    Spectral Floquet evolution on a periodic grid with fidelity, Wigner
    function, quasi-energy and probability-flux observables.
analysis
    Predicted revival timescales and the spectral routines that measure them.
config, io, experiments, presets, cli
    Reproducible experiment harness.
"""
from .analysis import (
    PeriodMeasurement,
    PredictionRecord,
    check_quasienergy_ladder,
    measure_chain_periods,
    measure_period,
    predict_center_period,
    predict_chain_periods,
)
from .classical import (
    CoarseDensity,
    Ensemble,
    MapParams,
    PeriodicOrbit,
    PhaseState,
    TangentMatrix,
    classical_fidelity,
    classical_scatter,
    coarse_grain,
    evolve_ensemble,
    find_periodic_orbits,
    involution_j1,
    involution_j2,
    map_step,
    orbit_rotation_angle,
    sample_gaussian_ensemble,
    tangent_map,
)
from .config import ExperimentConfig, PhysicalParams, from_dimensionless, to_dimensionless
from .errors import ConfigError, DomainError, EscapeError, NormDriftError, NumericalError, WraparoundError
from .presets import run_preset
from .quantum import (
    Grid,
    QuasiEnergySpectrum,
    Wavefunction,
    fidelity_trace,
    gaussian_packet,
    kick_step,
    quasienergy_spectrum,
    scatter_trace,
    wigner,
    windowed_fidelity_trace,
)
from .traces import FidelityTrace, ScatterTrace

__version__ = "0.1.0"
