"""Adiabatic transfer along the chain through the zero-energy dark state."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .drive import DriveProtocol, check_drive_regime
from .dynamics import (
    DriveFrameHamiltonian,
    StepPolicy,
    Trajectory,
    drive_onsite_potential,
    effective_hamiltonian_at,
    propagate,
)
from .errors import ConfigurationError, DegenerateInputError, NumericalError
from .lattice import ChainSpec, DisorderRealization, build_static_hamiltonian

MODELS = ("full", "effective")
FRAMES = ("drive", "lab")


@dataclass(frozen=True)
class TransferConfig:
    chain: ChainSpec
    protocol: DriveProtocol
    model: str = "full"
    initial_site: int = 1
    target_site: Optional[int] = None
    realization: Optional[DisorderRealization] = None
    frame: str = "drive"
    step: Optional[StepPolicy] = None

    def __post_init__(self):
        n = self.chain.n_sites
        if self.target_site is None:
            object.__setattr__(self, "target_site", n)
        if self.model not in MODELS:
            raise ConfigurationError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.frame not in FRAMES:
            raise ConfigurationError(f"frame must be one of {FRAMES}, got {self.frame!r}")
        for name in ("initial_site", "target_site"):
            site = getattr(self, name)
            if not 1 <= site <= n:
                raise ConfigurationError(f"{name}={site} is outside [1, {n}]")
        check_drive_regime(self.protocol, self.chain)

    @property
    def transit_time(self) -> float:
        return self.protocol.transit_time

    def step_policy(self) -> StepPolicy:
        if self.step is not None:
            return self.step
        return StepPolicy.default(self.protocol, self.model, self.frame, self.chain)

    def replace(self, **changes) -> "TransferConfig":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return TransferConfig(**values)


@dataclass
class RunSummary:
    final_fidelity: float
    max_even_leakage: float
    norm_drift: float
    speed_ratio: float
    model: str
    seed: Optional[int]
    realization_index: Optional[int]
    n_samples: int
    dt: float
    n_steps: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def min_transfer_time(n_sites: int, j: float) -> float:
    """Fastest sequential-pulse transfer time, ``pi (N-1) / (2|J|)``."""
    if n_sites < 2:
        raise ConfigurationError("n_sites must be >= 2")
    if j == 0:
        raise ConfigurationError("j must be nonzero")
    return math.pi * (n_sites - 1) / (2.0 * abs(j))


def dark_state(omega1: float, omega2: float, n_sites: int) -> np.ndarray:
    """Zero-energy eigenvector of the chain with alternating couplings.

    Odd bonds carry ``omega1``, even bonds ``omega2`` and there is no
    next-nearest coupling. Amplitudes on odd sites go as
    ``(-omega1/omega2)**k``; the vector is normalized numerically, which stays
    finite at ``omega1 == omega2`` and for extreme ratios.
    """
    if n_sites < 1 or n_sites % 2 == 0:
        raise ConfigurationError("dark state requires an odd number of sites")
    if omega1 == 0 and omega2 == 0:
        raise DegenerateInputError("dark state is undefined when both couplings vanish")
    m = (n_sites - 1) // 2
    k = np.arange(m + 1)
    if abs(omega1) <= abs(omega2):
        amp = (-omega1 / omega2) ** k
    else:
        # rescale by (-omega1/omega2)**m so the largest amplitude is the last one
        amp = (-omega2 / omega1) ** (m - k)
        if omega2 != 0 and m % 2 == 1 and (omega1 / omega2) > 0:
            amp = -amp
    psi = np.zeros(n_sites, dtype=complex)
    psi[0::2] = amp
    return psi / np.linalg.norm(psi)


def instantaneous_spectrum(t: float, config: TransferConfig) -> np.ndarray:
    """Sorted eigenvalues of the effective Hamiltonian at time ``t``."""
    if config.model != "effective":
        raise ConfigurationError("instantaneous_spectrum is defined for the effective model")
    h = effective_hamiltonian_at(t, config.chain, config.protocol, config.realization)
    try:
        return np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed at t={t}: {exc}") from exc


def dark_gap(eigenvalues: Sequence[float]) -> float:
    """Distance from the eigenvalue closest to zero to its nearest neighbour."""
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    i = int(np.argmin(np.abs(ev)))
    neighbours = [abs(ev[j] - ev[i]) for j in (i - 1, i + 1) if 0 <= j < len(ev)]
    return min(neighbours) if neighbours else math.inf


def minimum_dark_gap(config: TransferConfig, n_times: int = 401) -> float:
    """Smallest gap around the zero mode over the run; an adiabaticity diagnostic."""
    p = config.protocol
    times = np.linspace(-p.t_half, p.t_half, n_times)
    return min(dark_gap(instantaneous_spectrum(t, config)) for t in times)


def _even_mask(n_sites: int) -> np.ndarray:
    return np.arange(1, n_sites + 1) % 2 == 0


def propagate_batch(config: TransferConfig, statics: Optional[np.ndarray] = None,
                    realizations: Optional[Sequence[DisorderRealization]] = None) -> Trajectory:
    """Propagate a batch of chains sharing one drive from the configured initial site.

    Full model: ``statics`` is a ``(B, N, N)`` stack of static Hamiltonians.
    Effective model: ``realizations`` lists one (possibly ``None``) disorder
    realization per batch member. The returned final states are in the lab frame.
    """
    chain, protocol = config.chain, config.protocol
    n = chain.n_sites
    t0, t1 = -protocol.t_half, protocol.t_half
    policy = config.step_policy()
    mask = _even_mask(n)

    if config.model == "effective":
        reals = list(realizations) if realizations is not None else [config.realization]

        def provider(t):
            return np.stack([effective_hamiltonian_at(t, chain, protocol, r) for r in reals])

        batch = len(reals)
        psi0 = np.zeros((batch, n), dtype=complex)
        psi0[:, config.initial_site - 1] = 1.0
        return propagate(provider, psi0, t0, t1, policy, watch=mask)

    if statics is None:
        statics = build_static_hamiltonian(chain, config.realization)[None]
    statics = np.asarray(statics, dtype=complex)
    batch = statics.shape[0]
    psi0 = np.zeros((batch, n), dtype=complex)
    psi0[:, config.initial_site - 1] = 1.0

    if config.frame == "lab":
        idx = np.arange(n)

        def provider(t):
            v = drive_onsite_potential(t, chain, protocol)
            h = statics.copy()
            h[:, idx, idx] += v - v.mean()
            return h

        return propagate(provider, psi0, t0, t1, policy, watch=mask)

    frame = DriveFrameHamiltonian(chain, protocol, statics)
    traj = propagate(frame, frame.to_frame(psi0, t0), t0, t1, policy, watch=mask)
    traj.final_state = frame.from_frame(traj.final_state, t1)
    return traj


def config_echo(config: TransferConfig) -> dict:
    chain, p = config.chain, config.protocol
    echo = {
        "chain": {
            "n_sites": chain.n_sites, "j_nn": chain.j_nn, "j_nnn": chain.j_nnn,
            "a": chain.a, "b": chain.b, "site_energies": list(chain.site_energies),
        },
        "protocol": {
            "omega": p.omega, "tau": p.tau, "delay": p.delay, "t_half": p.t_half,
            "envelope": p.envelope,
        },
        "model": config.model,
        "frame": config.frame,
        "initial_site": config.initial_site,
        "target_site": config.target_site,
    }
    return echo


def summarize(config: TransferConfig, traj: Trajectory, seed: Optional[int] = None,
              realization_index: Optional[int] = None) -> RunSummary:
    target = config.target_site - 1
    fidelity = float(np.abs(traj.final_state[..., target]) ** 2)
    return RunSummary(
        final_fidelity=min(max(fidelity, 0.0), 1.0),
        max_even_leakage=float(traj.watched_max),
        norm_drift=float(traj.norm_drift),
        speed_ratio=config.transit_time / min_transfer_time(config.chain.n_sites, config.chain.j_nn),
        model=config.model,
        seed=seed,
        realization_index=realization_index,
        n_samples=traj.n_samples,
        dt=traj.dt,
        n_steps=traj.n_steps,
        config=config_echo(config),
    )


def run_transfer(config: TransferConfig):
    """Prepare ``|initial_site>`` at ``-T``, evolve to ``+T`` and score the transfer.

    Returns ``(Trajectory, RunSummary)``. Fidelity is the final population of
    the target site.
    """
    traj = propagate_batch(config).select(0)
    real = config.realization
    summary = summarize(
        config, traj,
        seed=None if real is None else real.master_seed,
        realization_index=None if real is None else real.realization_index,
    )
    return traj, summary
