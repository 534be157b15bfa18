"""Conversion of dimensionless run parameters (hbar = 1, energies in units of J) to SI."""

from __future__ import annotations

import math

from .errors import ConfigurationError


def physical_units(j_rad_per_s: float, config) -> dict:
    """Express carrier frequency and pulse timings for a physical hopping rate.

    ``config`` is a :class:`RunConfigDocument`. Times in the document are in
    units of ``1/j_nn``-scaled time; with ``j_rad_per_s`` as the physical value
    of ``j_nn`` one time unit corresponds to ``|j_nn| / j_rad_per_s`` seconds.
    """
    if not j_rad_per_s > 0:
        raise ConfigurationError("j_rad_per_s must be positive")
    rate = j_rad_per_s / abs(config.chain.j_nn)
    p = config.protocol
    return {
        "j_rad_per_s": j_rad_per_s,
        "omega_rad_per_s": p.omega * rate,
        "carrier_frequency_hz": p.omega * rate / (2.0 * math.pi),
        "tau_s": p.tau / rate,
        "delay_s": p.delay / rate,
        "t_half_s": p.t_half / rate,
        "transit_time_s": 2.0 * p.t_half / rate,
    }
