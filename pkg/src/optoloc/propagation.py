"""
Underwater acoustic absorption and transmission loss.

Two empirical absorption models are provided. Thorp's formula covers the
low band (0.1 to 3 kHz) and the Schulkin-Marsh model covers 3 to 500 kHz.
:func:`absorption` picks between them on a half-open split at 3 kHz, so a
request for exactly 3 kHz is served by Schulkin-Marsh.

The two models do not agree at the 3 kHz seam. With the default water
(10 degC, 35 ppt, 1 kg/cm^2) Thorp gives about 0.201 dB/km at 3 kHz while
Schulkin-Marsh gives about 0.071 dB/km; see :func:`boundary_discontinuity`.

Distances are in meters, frequencies in kHz and absorption in dB/km.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, OutOfValidityError

#: Schulkin-Marsh ionic relaxation constant.
SM_A = 2.34e-6
#: Schulkin-Marsh viscous constant.
SM_B = 3.38e-6

THORP_MAX_KHZ = 3.0
VALID_MIN_KHZ = 0.1
VALID_MAX_KHZ = 500.0

#: Source levels are quoted at 1 m.
REFERENCE_DISTANCE_M = 1.0


class AbsorptionModel(str, Enum):
    THORP = "Thorp"
    SCHULKIN_MARSH = "SchulkinMarsh"


@dataclass(frozen=True)
class WaterEnv:
    """Bulk water properties.

    Attributes
    ----------
    temperature_c : float
        Water temperature in degC, within [-2, 40].
    salinity_ppt : float
        Salinity in parts per thousand, within [0, 45].
    pressure_kg_cm2 : float
        Hydrostatic pressure in kg/cm^2, strictly positive.
    spreading_factor : float
        Geometric spreading exponent k (1 cylindrical, 1.5 practical,
        2 spherical), within [1, 2].
    """

    temperature_c: float = 10.0
    salinity_ppt: float = 35.0
    pressure_kg_cm2: float = 1.0
    spreading_factor: float = 2.0

    def __post_init__(self):
        if not -2.0 <= self.temperature_c <= 40.0:
            raise DomainError(f"temperature_c={self.temperature_c} outside [-2, 40] degC")
        if not 0.0 <= self.salinity_ppt <= 45.0:
            raise DomainError(f"salinity_ppt={self.salinity_ppt} outside [0, 45] ppt")
        if not self.pressure_kg_cm2 > 0.0:
            raise DomainError(f"pressure_kg_cm2={self.pressure_kg_cm2} must be > 0")
        if not 1.0 <= self.spreading_factor <= 2.0:
            raise DomainError(f"spreading_factor={self.spreading_factor} outside [1, 2]")


@dataclass(frozen=True)
class AbsorptionCoefficient:
    value_db_per_km: float
    frequency_khz: float
    model: AbsorptionModel


def _check_frequency(f):
    if not (f > 0.0 and math.isfinite(f)):
        raise DomainError(f"frequency must be a positive finite number of kHz, got {f}")


def thorp_absorption(f):
    """Thorp's low-frequency absorption in dB/km for ``f`` in kHz."""
    _check_frequency(f)
    f2 = f * f
    alpha = 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003
    return AbsorptionCoefficient(alpha, f, AbsorptionModel.THORP)


def relaxation_frequency(temperature_c):
    """Temperature-dependent relaxation frequency in kHz."""
    if not temperature_c > -273.0:
        raise DomainError(f"temperature {temperature_c} degC is at or below absolute zero")
    return 21.9 * 10.0 ** (6.0 - 1520.0 / (temperature_c + 273.0))


def schulkin_marsh_absorption(f, env, *, a_coef=SM_A, b_coef=SM_B):
    """Schulkin-Marsh absorption in dB/km.

    ``a_coef`` and ``b_coef`` default to the published constants; they are
    exposed so individual terms can be isolated.
    """
    _check_frequency(f)
    f_t = relaxation_frequency(env.temperature_c)
    f2 = f * f
    ionic = env.salinity_ppt * a_coef * f_t * f2 / (f_t * f_t + f2)
    viscous = b_coef * f2 / f_t
    alpha = 8.68e3 * (ionic + viscous) * (1.0 - 6.54e-4 * env.pressure_kg_cm2)
    return AbsorptionCoefficient(alpha, f, AbsorptionModel.SCHULKIN_MARSH)


def absorption(f, env=None):
    """Absorption for ``f`` kHz, choosing the model by band.

    Raises :class:`OutOfValidityError` outside [0.1, 500] kHz rather than
    extrapolating either model.
    """
    if env is None:
        env = WaterEnv()
    if not VALID_MIN_KHZ <= f <= VALID_MAX_KHZ:
        raise OutOfValidityError(
            f"frequency {f} kHz outside the modelled band [{VALID_MIN_KHZ}, {VALID_MAX_KHZ}] kHz"
        )
    if f < THORP_MAX_KHZ:
        return thorp_absorption(f)
    return schulkin_marsh_absorption(f, env)


def boundary_discontinuity(env=None):
    """Schulkin-Marsh minus Thorp at 3 kHz, in dB/km."""
    if env is None:
        env = WaterEnv()
    return (
        schulkin_marsh_absorption(THORP_MAX_KHZ, env).value_db_per_km
        - thorp_absorption(THORP_MAX_KHZ).value_db_per_km
    )


def transmission_loss(distance_m, env, alpha):
    """Spreading plus absorption loss in dB over ``distance_m`` meters.

    ``alpha`` is an :class:`AbsorptionCoefficient` or a bare dB/km value.
    """
    if not distance_m >= REFERENCE_DISTANCE_M:
        raise DomainError(
            f"distance {distance_m} m is below the {REFERENCE_DISTANCE_M} m reference distance"
        )
    a = getattr(alpha, "value_db_per_km", alpha)
    return 10.0 * env.spreading_factor * math.log10(distance_m) + a * distance_m * 1e-3


def received_sil(sl_db, tl_db):
    """Sound intensity level left after ``tl_db`` of loss."""
    return sl_db - tl_db
