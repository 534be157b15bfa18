"""Adiabatic state transfer in an ac-driven zig-zag tight-binding chain."""

from .drive import (
    CDT_INDEX,
    DriveProtocol,
    EffectiveCouplings,
    GammaTriple,
    bessel_j0,
    effective_couplings,
    envelopes,
    force_components,
    force_integrals,
    gamma_triple,
    pulse_profile,
)
from .dynamics import (
    DriveFrameHamiltonian,
    StepPolicy,
    Trajectory,
    drive_onsite_potential,
    effective_hamiltonian_at,
    full_hamiltonian_at,
    propagate,
    read_trajectory_csv,
)
from .errors import (
    ConfigurationError,
    CTAPError,
    DegenerateInputError,
    DomainError,
    IntegrationError,
    NumericalError,
)
from .experiments import SweepResult, cdt_freeze, disorder_sweep, model_comparison, nnn_sweep
from .lattice import ChainSpec, DisorderRealization, DisorderSpec, build_static_hamiltonian, sample_disorder
from .protocol import (
    RunSummary,
    TransferConfig,
    dark_state,
    instantaneous_spectrum,
    min_transfer_time,
    run_transfer,
)

__version__ = "0.1.0"
