"""Static zig-zag chain, disorder sampling and the undriven Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class ChainSpec:
    """Zig-zag tight-binding chain.

    Sites ``n = 1..N`` sit at horizontal position ``n*a``; even sites are
    displaced vertically by ``b``. ``j_nn`` couples neighbours along the
    zig-zag, ``j_nnn`` couples sites ``n`` and ``n+2``.
    """

    n_sites: int
    j_nn: float = 1.0
    j_nnn: float = 0.0
    a: float = 1.0
    b: float = 1.0
    site_energies: Optional[Sequence[float]] = None

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 3 or self.n_sites % 2 == 0:
            raise ConfigurationError(f"n_sites must be odd and >= 3, got {self.n_sites}")
        if not (self.a > 0 and self.b > 0):
            raise ConfigurationError("lattice geometry requires a > 0 and b > 0")
        if self.j_nn == 0:
            raise ConfigurationError("j_nn must be nonzero")
        if self.site_energies is None:
            object.__setattr__(self, "site_energies", (0.0,) * self.n_sites)
        else:
            energies = tuple(float(e) for e in self.site_energies)
            if len(energies) != self.n_sites:
                raise ConfigurationError(
                    f"site_energies has {len(energies)} entries, expected {self.n_sites}"
                )
            object.__setattr__(self, "site_energies", energies)

    @property
    def sites(self) -> np.ndarray:
        """1-based site labels."""
        return np.arange(1, self.n_sites + 1)

    def replace(self, **changes) -> "ChainSpec":
        fields = dict(
            n_sites=self.n_sites, j_nn=self.j_nn, j_nnn=self.j_nnn,
            a=self.a, b=self.b, site_energies=self.site_energies,
        )
        fields.update(changes)
        if "n_sites" in changes and "site_energies" not in changes:
            fields["site_energies"] = None
        return ChainSpec(**fields)


@dataclass(frozen=True)
class DisorderSpec:
    delta_hopping: float = 0.0
    delta_onsite: float = 0.0
    master_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.delta_hopping < 1.0:
            raise ConfigurationError(f"delta_hopping must lie in [0, 1), got {self.delta_hopping}")
        if not self.delta_onsite >= 0.0:
            raise ConfigurationError(f"delta_onsite must be >= 0, got {self.delta_onsite}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigurationError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of disorder.

    ``hopping_factors[k]`` multiplies the bond between sites k+1 and k+2;
    ``onsite_offsets`` are the dimensionless ``delta_n`` (site energy ``J*delta_n``).
    """

    hopping_factors: np.ndarray
    onsite_offsets: np.ndarray
    realization_index: int = 0
    master_seed: Optional[int] = None

    @property
    def n_sites(self) -> int:
        return len(self.onsite_offsets)

    @classmethod
    def clean(cls, n_sites: int, realization_index: int = 0) -> "DisorderRealization":
        return cls(np.ones(n_sites - 1), np.zeros(n_sites), realization_index)


def realization_rng(master_seed: int, realization_index: int) -> np.random.Generator:
    """Counter-based stream: the generator depends only on (seed, index)."""
    seq = np.random.SeedSequence([int(master_seed), int(realization_index)])
    return np.random.Generator(np.random.PCG64(seq))


def sample_disorder(spec: DisorderSpec, realization_index: int, n_sites: int) -> DisorderRealization:
    """Draw i.i.d. uniform bond and site offsets on (-delta, delta).

    Bond draws come first, then site draws, from the same stream, so the
    realization is a pure function of ``(spec.master_seed, realization_index)``.
    """
    if realization_index < 0:
        raise ConfigurationError("realization_index must be >= 0")
    if n_sites < 2:
        raise ConfigurationError("n_sites must be >= 2")
    rng = realization_rng(spec.master_seed, realization_index)
    u_bonds = rng.uniform(-1.0, 1.0, n_sites - 1)
    u_sites = rng.uniform(-1.0, 1.0, n_sites)
    return DisorderRealization(
        hopping_factors=1.0 + spec.delta_hopping * u_bonds,
        onsite_offsets=spec.delta_onsite * u_sites,
        realization_index=int(realization_index),
        master_seed=int(spec.master_seed),
    )


def _check_realization(chain: ChainSpec, realization: DisorderRealization):
    if len(realization.hopping_factors) != chain.n_sites - 1 or realization.n_sites != chain.n_sites:
        raise ConfigurationError(
            f"disorder realization is sized for {realization.n_sites} sites, chain has {chain.n_sites}"
        )


def build_static_hamiltonian(chain: ChainSpec, realization: Optional[DisorderRealization] = None) -> np.ndarray:
    """Undriven part of the chain Hamiltonian as a dense complex matrix."""
    n = chain.n_sites
    bonds = np.full(n - 1, float(chain.j_nn))
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
        h[idx[:-2], idx[2:]] = chain.j_nnn
        h[idx[2:], idx[:-2]] = chain.j_nnn
    return h


def is_hermitian(h: np.ndarray, rtol: float = 1e-14) -> bool:
    scale = max(np.abs(h).max(), 1.0)
    return bool(np.abs(h - np.conj(np.swapaxes(h, -1, -2))).max() <= rtol * scale)
