"""Unit conversions and physical constants.

All internal SNR/power arithmetic is linear (watts, ratios); dB and dBm
appear only at interfaces.  Conversions live here so every module agrees
on the same definitions.
"""

from __future__ import annotations

import math

#: Planck constant, J*s (exact SI value).
PLANCK_H = 6.62607015e-34

#: Speed of light in vacuum, m/s.
C_LIGHT = 299792458.0


def db_to_lin(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def lin_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def dbm_to_watt(value_dbm: float) -> float:
    return 1e-3 * 10.0 ** (value_dbm / 10.0)


def watt_to_dbm(value_w: float) -> float:
    return 10.0 * math.log10(value_w / 1e-3)


def thz_to_hz(value_thz: float) -> float:
    return value_thz * 1e12


def ghz_to_hz(value_ghz: float) -> float:
    return value_ghz * 1e9


def beta2_from_dispersion(dispersion_ps_nm_km: float, frequency_thz: float) -> float:
    """Group-velocity dispersion beta2 (s^2/m) from D (ps/(nm*km)).

    Sign follows D: standard fiber (D > 0) gives beta2 < 0.
    """
    wavelength_m = C_LIGHT / thz_to_hz(frequency_thz)
    d_si = dispersion_ps_nm_km * 1e-6  # s/m^2
    return -d_si * wavelength_m**2 / (2.0 * math.pi * C_LIGHT)


def alpha_power_per_m(loss_db_per_km: float) -> float:
    """Power attenuation coefficient (1/m) from a dB/km loss figure."""
    return loss_db_per_km * math.log(10.0) / 10.0 / 1e3
