"""Hamiltonian assembly and fixed-step RK4 propagation of i d(psi)/dt = H(t) psi.

Three Hamiltonian providers are available for the driven chain:

* ``full_hamiltonian_at`` -- the lab-frame Hamiltonian with the oscillating
  on-site drive potential (spectral radius ~ 2.405*w*N/2, needs tiny steps);
* ``DriveFrameHamiltonian`` -- the same dynamics after the exact gauge
  transformation ``c_n = exp(i chi_n(t)) psi_n`` with ``d chi_n/dt`` equal to
  the drive potential. Populations are identical to the lab frame, while the
  spectral radius is bounded by the hoppings;
* ``effective_hamiltonian_at`` -- the Bessel-renormalized high-frequency model.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .drive import (
    DriveProtocol,
    effective_couplings,
    envelopes,
    force_components,
    force_integrals,
)
from .errors import ConfigurationError, IntegrationError
from .lattice import ChainSpec, DisorderRealization, _check_realization, build_static_hamiltonian

NORM_DRIFT_LIMIT = 1e-4


def drive_coefficients(chain: ChainSpec):
    """Per-site multipliers of ``F_x`` and ``F_y`` in the drive potential."""
    n = chain.sites
    return n * chain.a, np.where(n % 2 == 0, chain.b, 0.0)


def drive_onsite_potential(t: float, chain: ChainSpec, protocol: DriveProtocol) -> np.ndarray:
    fx, fy = force_components(t, protocol, chain)
    cx, cy = drive_coefficients(chain)
    return cx * fx + cy * fy


def full_hamiltonian_at(t: float, chain: ChainSpec, protocol: DriveProtocol,
                        realization: Optional[DisorderRealization] = None) -> np.ndarray:
    """Lab-frame Hamiltonian: static chain plus the drive diagonal."""
    h = build_static_hamiltonian(chain, realization)
    idx = np.arange(chain.n_sites)
    h[idx, idx] += drive_onsite_potential(t, chain, protocol)
    return h


def effective_hamiltonian_at(t: float, chain: ChainSpec, protocol: DriveProtocol,
                             realization: Optional[DisorderRealization] = None) -> np.ndarray:
    """Time-averaged Hamiltonian with Bessel-renormalized couplings.

    Without disorder the diagonal is zero. A disorder realization scales each
    bond by its factor and adds the static site energies, which the fast
    carrier leaves untouched.
    """
    n = chain.n_sites
    theta_odd, theta_even, sigma = effective_couplings(t, chain, protocol)
    # bond k joins sites k+1 and k+2 (1-based); odd bonds have k even
    bonds = np.where(np.arange(n - 1) % 2 == 0, theta_odd, theta_even)
    diag = np.asarray(chain.site_energies, dtype=float).copy()
    if realization is not None:
        _check_realization(chain, realization)
        bonds = bonds * np.asarray(realization.hopping_factors, dtype=float)
        diag = diag + chain.j_nn * np.asarray(realization.onsite_offsets, dtype=float)
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    h[idx, idx] = diag
    h[idx[:-1], idx[1:]] = bonds
    h[idx[1:], idx[:-1]] = bonds
    if chain.j_nnn != 0.0:
        h[idx[:-2], idx[2:]] = sigma
        h[idx[2:], idx[:-2]] = sigma
    return h


class DriveFrameHamiltonian:
    """Full driven Hamiltonian in the frame co-moving with the drive potential.

    ``static`` may be a single ``(N, N)`` matrix or a stack ``(B, N, N)`` of
    static Hamiltonians sharing one drive (disorder ensembles, J' sweeps).
    """

    def __init__(self, chain: ChainSpec, protocol: DriveProtocol, static: Optional[np.ndarray] = None):
        self.chain = chain
        self.protocol = protocol
        self.static = build_static_hamiltonian(chain) if static is None else np.asarray(static, dtype=complex)
        self._cx, self._cy = drive_coefficients(chain)

    def phases(self, t: float) -> np.ndarray:
        x, y = force_integrals(t, self.protocol, self.chain)
        return self._cx * x + self._cy * y

    def __call__(self, t: float) -> np.ndarray:
        u = np.exp(1j * self.phases(t))
        return self.static * (u[:, None] * u.conj()[None, :])

    def to_frame(self, psi: np.ndarray, t: float) -> np.ndarray:
        return np.exp(1j * self.phases(t)) * psi

    def from_frame(self, c: np.ndarray, t: float) -> np.ndarray:
        return np.exp(-1j * self.phases(t)) * c


def lab_frame_provider(chain: ChainSpec, protocol: DriveProtocol,
                       realization: Optional[DisorderRealization] = None,
                       centered: bool = True) -> Callable[[float], np.ndarray]:
    """Lab-frame provider; ``centered`` subtracts the mean drive potential.

    Centering only changes the global phase of the state and halves the
    spectral radius the integrator has to resolve.
    """
    static = build_static_hamiltonian(chain, realization)
    idx = np.arange(chain.n_sites)

    def provider(t):
        v = drive_onsite_potential(t, chain, protocol)
        if centered:
            v = v - v.mean()
        h = static.copy()
        h[idx, idx] += v
        return h

    return provider


@dataclass(frozen=True)
class StepPolicy:
    """Fixed RK4 step and population sampling stride (in steps)."""

    dt: float
    sample_stride: int = 1
    max_norm_drift: float = NORM_DRIFT_LIMIT

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if self.sample_stride < 1:
            raise ConfigurationError("sample_stride must be >= 1")

    @classmethod
    def default(cls, protocol: DriveProtocol, model: str = "full", frame: str = "drive",
                chain: Optional[ChainSpec] = None, carrier_samples: int = 200,
                tau_divisions: int = 1000) -> "StepPolicy":
        """Default step: ``min(2 pi/(w M), tau/1000)``; ``tau/2000`` for the effective model.

        The lab frame additionally caps ``dt * rho <= 0.03`` where ``rho``
        bounds the spectral radius, since explicit RK4 damps fast phases.
        Sampling is once per carrier period.
        """
        period = 2.0 * math.pi / protocol.omega
        if model == "effective":
            dt = protocol.tau / 2000.0 if protocol.envelope == "stirap" else period / carrier_samples
        elif model == "full":
            dt = period / carrier_samples
            if protocol.envelope == "stirap":
                dt = min(dt, protocol.tau / tau_divisions)
            if frame == "lab":
                if chain is None:
                    raise ConfigurationError("lab-frame step selection needs the chain")
                dt = min(dt, 0.03 / lab_spectral_bound(chain, protocol))
        else:
            raise ConfigurationError(f"unknown model {model!r}")
        stride = max(1, int(round(period / dt)))
        return cls(dt=dt, sample_stride=stride)


def lab_spectral_bound(chain: ChainSpec, protocol: DriveProtocol) -> float:
    """Upper bound on the spectral radius of the centered lab-frame Hamiltonian."""
    t = np.linspace(-protocol.t_half, protocol.t_half, 2001)
    ax, ay = envelopes(t, protocol, chain)
    cx, cy = drive_coefficients(chain)
    spread = 0.5 * (np.abs(ax).max() * (cx.max() - cx.min()) + np.abs(ay).max() * cy.max())
    hop = 2.0 * abs(chain.j_nn) * 2.0 + 2.0 * abs(chain.j_nnn)
    return spread + hop + float(np.abs(chain.site_energies).max()) + abs(chain.j_nn)


@dataclass
class Trajectory:
    """Sampled populations of one run, or of a batch of runs.

    ``populations`` has shape ``(n_samples, *batch, N)`` and ``norms`` shape
    ``(n_samples, *batch)``. ``watched_max`` is the running maximum, over every
    integration step, of the population summed over the watched sites.
    """

    times: np.ndarray
    populations: np.ndarray
    norms: np.ndarray
    final_state: np.ndarray
    norm_drift: np.ndarray
    dt: float
    n_steps: int
    watched_max: Optional[np.ndarray] = None

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def batch_shape(self):
        return self.final_state.shape[:-1]

    def select(self, i: int) -> "Trajectory":
        """Single run ``i`` from a batched trajectory."""
        return Trajectory(
            times=self.times,
            populations=self.populations[:, i],
            norms=self.norms[:, i],
            final_state=self.final_state[i],
            norm_drift=self.norm_drift[i],
            dt=self.dt,
            n_steps=self.n_steps,
            watched_max=None if self.watched_max is None else self.watched_max[i],
        )

    def to_csv(self, path):
        if self.batch_shape:
            raise ValueError("CSV export is defined for a single trajectory")
        n = self.populations.shape[-1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"p{k}" for k in range(1, n + 1)] + ["norm"])
            for t, pops, nrm in zip(self.times, self.populations, self.norms):
                writer.writerow([_fmt(t)] + [_fmt(p) for p in pops] + [_fmt(nrm)])


def _fmt(x) -> str:
    return format(float(x), ".15g")


def read_trajectory_csv(path):
    """Returns ``(times, populations, norms)`` from a trajectory CSV file."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[0] != "t" or header[-1] != "norm":
            raise ValueError(f"{path}: not a trajectory file")
        rows = np.array([[float(v) for v in row] for row in reader])
    rows = rows.reshape(-1, len(header))
    return rows[:, 0], rows[:, 1:-1], rows[:, -1]


def _apply(h, psi):
    # stacked matmul so every batch member goes through the same kernel
    return np.matmul(h, psi[..., None])[..., 0]


def propagate(hamiltonian_provider: Callable[[float], np.ndarray], psi0, t0: float, t1: float,
              step_policy: StepPolicy, watch: Optional[np.ndarray] = None) -> Trajectory:
    """Classical RK4 at fixed step from ``t0`` to ``t1``.

    ``psi0`` is ``(N,)`` or a batch ``(B, N)``; the provider returns matching
    ``(N, N)`` or ``(B, N, N)`` (or ``(N, N)`` shared by the batch). The step is
    shrunk so an integer number of steps lands exactly on ``t1``. No
    renormalization happens; the largest ``| ||psi|| - 1 |`` is reported and
    the run aborts with :class:`IntegrationError` once it exceeds the policy
    limit. ``watch`` is an optional boolean site mask.
    """
    psi = np.array(psi0, dtype=complex)
    norm0 = np.sqrt(np.sum(np.abs(psi) ** 2, axis=-1))
    if np.any(np.abs(norm0 - 1.0) > 1e-12):
        raise ConfigurationError("initial state must be normalized to 1e-12")
    if not t1 > t0:
        raise ConfigurationError("propagation requires t1 > t0")
    span = t1 - t0
    n_steps = max(1, math.ceil(span / step_policy.dt - 1e-9))
    dt = span / n_steps
    stride = step_policy.sample_stride
    mask = None if watch is None else np.asarray(watch, dtype=bool)

    times, pops, norms = [t0], [np.abs(psi) ** 2], [norm0]
    drift = np.abs(norm0 - 1.0)
    watched = None if mask is None else pops[0][..., mask].sum(axis=-1)

    h_start = hamiltonian_provider(t0)
    for k in range(n_steps):
        t = t0 + k * dt
        t_next = t1 if k == n_steps - 1 else t0 + (k + 1) * dt
        h_mid = hamiltonian_provider(t + 0.5 * dt)
        h_end = hamiltonian_provider(t_next)
        k1 = -1j * _apply(h_start, psi)
        k2 = -1j * _apply(h_mid, psi + (0.5 * dt) * k1)
        k3 = -1j * _apply(h_mid, psi + (0.5 * dt) * k2)
        k4 = -1j * _apply(h_end, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        h_start = h_end

        p = np.abs(psi) ** 2
        nrm = np.sqrt(p.sum(axis=-1))
        drift = np.maximum(drift, np.abs(nrm - 1.0))
        if np.any(drift > step_policy.max_norm_drift):
            raise IntegrationError(
                f"norm drift {float(np.max(drift)):.3e} exceeds {step_policy.max_norm_drift:.1e} "
                f"at t={t_next:.6g}; reduce dt (currently {dt:.3e})"
            )
        if mask is not None:
            watched = np.maximum(watched, p[..., mask].sum(axis=-1))
        if (k + 1) % stride == 0 or k == n_steps - 1:
            times.append(t_next)
            pops.append(p)
            norms.append(nrm)

    return Trajectory(
        times=np.array(times),
        populations=np.array(pops),
        norms=np.array(norms),
        final_state=psi,
        norm_drift=drift if drift.ndim else float(drift),
        dt=dt,
        n_steps=n_steps,
        watched_max=watched if watched is None or np.ndim(watched) else float(watched),
    )
