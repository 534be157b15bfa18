"""Robustness studies: disorder ensembles, next-nearest hopping, RWA accuracy, CDT."""

from __future__ import annotations

import csv
import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .drive import DriveProtocol
from .dynamics import DriveFrameHamiltonian, StepPolicy, propagate
from .errors import ConfigurationError
from .lattice import ChainSpec, DisorderSpec, build_static_hamiltonian, sample_disorder
from .protocol import TransferConfig, propagate_batch

DISORDER_KINDS = ("hopping", "onsite", "both")


@dataclass
class SweepResult:
    """Per-realization fidelities for each swept parameter value."""

    parameter: str
    values: List[float]
    records: List[Tuple[float, int, float]] = field(default_factory=list)

    def fidelities(self, value: float) -> List[float]:
        return [f for v, _, f in self.records if v == value]

    def summary(self) -> Dict[str, dict]:
        out = {}
        for v in self.values:
            fids = self.fidelities(v)
            out[format(v, ".15g")] = {
                "n": len(fids),
                "min": min(fids),
                "median": statistics.median(fids),
                "mean": statistics.fmean(fids),
                "max": max(fids),
            }
        return out

    def median(self, value: float) -> float:
        return statistics.median(self.fidelities(value))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["param", "realization", "final_fidelity"])
            for v, idx, fid in self.records:
                writer.writerow([format(v, ".15g"), idx, format(fid, ".15g")])

    def summary_document(self) -> dict:
        return {"parameter": self.parameter, "n_rows": len(self.records), "values": self.summary()}

    def write(self, directory):
        from pathlib import Path

        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self.to_csv(directory / "sweep.csv")
        with open(directory / "sweep_summary.json", "w") as fh:
            json.dump(self.summary_document(), fh, indent=2)


def _fidelities(config: TransferConfig, statics: np.ndarray) -> np.ndarray:
    traj = propagate_batch(config, statics=statics)
    return np.clip(np.abs(traj.final_state[:, config.target_site - 1]) ** 2, 0.0, 1.0)


def _run_chunks(config: TransferConfig, statics: np.ndarray, threads: int, chunk: int) -> np.ndarray:
    pieces = [statics[i:i + chunk] for i in range(0, len(statics), chunk)]
    if threads <= 1 or len(pieces) == 1:
        results = [_fidelities(config, p) for p in pieces]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda p: _fidelities(config, p), pieces))
    return np.concatenate(results)


def disorder_spec_for(kind: str, delta: float, master_seed: int) -> DisorderSpec:
    if kind not in DISORDER_KINDS:
        raise ConfigurationError(f"disorder kind must be one of {DISORDER_KINDS}, got {kind!r}")
    return DisorderSpec(
        delta_hopping=delta if kind in ("hopping", "both") else 0.0,
        delta_onsite=delta if kind in ("onsite", "both") else 0.0,
        master_seed=master_seed,
    )


def disorder_sweep(base: TransferConfig, kind: str, deltas: Sequence[float], n_realizations: int,
                   master_seed: int, threads: int = 1, chunk: int = 32) -> SweepResult:
    """Full-model transfer fidelity over independent disorder realizations.

    Value ``k`` of ``deltas`` uses realization indices ``k*n_realizations + r``,
    so every (delta, realization) pair draws from its own stream. Results are
    identical for any ``threads``/``chunk`` choice.
    """
    if n_realizations < 1:
        raise ConfigurationError("n_realizations must be >= 1")
    deltas = [float(d) for d in deltas]
    if any(not 0.0 <= d < 1.0 for d in deltas):
        raise ConfigurationError("disorder strengths must lie in [0, 1)")
    config = base.replace(model="full", realization=None)
    chain = config.chain

    labels, statics = [], []
    for k, delta in enumerate(deltas):
        spec = disorder_spec_for(kind, delta, master_seed)
        for r in range(n_realizations):
            index = k * n_realizations + r
            real = sample_disorder(spec, index, chain.n_sites)
            labels.append((delta, index))
            statics.append(build_static_hamiltonian(chain, real))
    fids = _run_chunks(config, np.array(statics), threads, chunk)

    result = SweepResult(parameter=f"delta_{kind}", values=deltas)
    result.records = sorted((d, i, float(f)) for (d, i), f in zip(labels, fids))
    return result


def nnn_sweep(base: TransferConfig, ratios: Sequence[float], threads: int = 1) -> SweepResult:
    """Full-model fidelity with ``J' = ratio * J`` on a clean chain."""
    ratios = [float(r) for r in ratios]
    if any(r < 0 for r in ratios):
        raise ConfigurationError("J'/J ratios must be >= 0")
    config = base.replace(model="full", realization=None)
    chain = config.chain
    statics = np.array([build_static_hamiltonian(chain.replace(j_nnn=r * chain.j_nn)) for r in ratios])
    fids = _run_chunks(config, statics, threads, chunk=len(ratios))
    result = SweepResult(parameter="jnnn_over_j", values=ratios)
    result.records = [(r, 0, float(f)) for r, f in zip(ratios, fids)]
    return result


def model_comparison(base: TransferConfig, omegas: Sequence[float],
                     samples_per_period: int = 20) -> List[Tuple[float, float]]:
    """Max over time and sites of ``|p_full - p_effective|`` for each carrier ``omega``.

    Both models run with the full-model step on a shared time grid, sampled
    ``samples_per_period`` times per carrier period.
    """
    out = []
    for w in omegas:
        p = base.protocol
        protocol = DriveProtocol(float(w), p.tau, p.delay, p.t_half, p.envelope)
        cfg = base.replace(protocol=protocol, model="full", step=None)
        default = StepPolicy.default(protocol, "full", cfg.frame, cfg.chain)
        stride = max(1, default.sample_stride // samples_per_period)
        step = StepPolicy(dt=default.dt, sample_stride=stride)
        full = propagate_batch(cfg.replace(step=step)).select(0)
        eff = propagate_batch(cfg.replace(model="effective", step=step)).select(0)
        out.append((float(w), float(np.abs(full.populations - eff.populations).max())))
    return out


def cdt_freeze(chain: ChainSpec, omega: float, duration: float, initial_site: int = 1,
               carrier_samples: int = 200):
    """Hold the drive at its frozen value (both bond indices 2.405) and watch site occupation.

    Returns the :class:`Trajectory` of the full model over ``[0, duration]``.
    """
    protocol = DriveProtocol(omega=omega, tau=1.0, delay=0.0, t_half=duration, envelope="constant")
    frame = DriveFrameHamiltonian(chain, protocol)
    psi0 = np.zeros(chain.n_sites, dtype=complex)
    psi0[initial_site - 1] = 1.0
    period = 2.0 * np.pi / omega
    step = StepPolicy(dt=period / carrier_samples, sample_stride=carrier_samples)
    traj = propagate(frame, frame.to_frame(psi0, 0.0), 0.0, duration, step)
    traj.final_state = frame.from_frame(traj.final_state, duration)
    return traj

