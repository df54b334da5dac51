"""
Airborne optoacoustic source and the acoustic link to a submerged node.

A laser focused below the surface breaks the water down into a small
plasma that radiates an acoustic pulse. The pulse source level (SL) is
nearly isotropic on average but fluctuates from pulse to pulse, and the
fluctuation depends on the angle from the beam axis. That dependence is
captured by a jitter table of ``(direction_deg, sigma_db)`` bins.

A localization message is a run of control-bit pulses followed by the SL
and the plasma coordinates. The receiver averages the control-bit SILs to
estimate transmission loss and from it the range to the plasma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import propagation
from .errors import DomainError
from .geometry import Measurement, Position3D
from .ranging import RangeEstimate, distance_from_tl, tl_from_message

#: Positive floor on noisy linear intensity before taking the log.
INTENSITY_FLOOR = 1e-30

#: Per-pulse SL standard deviation (dB) by angle from the beam axis.
#: Ordering follows the bench measurements (largest spread on-axis,
#: smallest broadside); magnitudes are calibrated, see README.
DEFAULT_JITTER_TABLE = ((0.0, 0.04), (45.0, 0.015), (90.0, 0.008))

DOWN = (0.0, 0.0, -1.0)


@dataclass(frozen=True)
class LaserParams:
    wavelength_nm: float = 1064.0
    focusing_angle_deg: float = 20.0
    pulse_energy: float = 30e-3
    breakdown_threshold_energy: float = 6e-3

    def __post_init__(self):
        if not self.wavelength_nm > 0:
            raise DomainError("wavelength_nm must be > 0")
        if not 0 < self.focusing_angle_deg < 180:
            raise DomainError("focusing_angle_deg must be in (0, 180)")
        if not (self.pulse_energy > 0 and self.breakdown_threshold_energy > 0):
            raise DomainError("pulse and threshold energies must be > 0")


@dataclass(frozen=True)
class SourceModel:
    base_sl_db: float = 210.0
    laser: LaserParams = field(default_factory=LaserParams)
    jitter_table: tuple = DEFAULT_JITTER_TABLE
    beam_axis: tuple = DOWN

    def __post_init__(self):
        if not self.base_sl_db > 0:
            raise DomainError(f"base_sl_db must be > 0, got {self.base_sl_db}")
        table = tuple((float(d), float(s)) for d, s in self.jitter_table)
        if not table:
            raise DomainError("jitter_table needs at least one bin")
        dirs = [d for d, _ in table]
        if dirs != sorted(dirs) or dirs[0] < 0 or dirs[-1] > 90:
            raise DomainError("jitter_table bins must be sorted and lie in [0, 90] deg")
        if any(not s >= 0 for _, s in table):
            raise DomainError("jitter_table sigmas must be >= 0")
        axis = np.asarray(self.beam_axis, dtype=float)
        norm = np.linalg.norm(axis)
        if axis.shape != (3,) or not norm > 0:
            raise DomainError("beam_axis must be a non-zero 3-vector")
        object.__setattr__(self, "jitter_table", table)
        object.__setattr__(self, "beam_axis", tuple(float(v) for v in axis / norm))

    def sigma_at(self, direction_deg):
        """Jitter sigma of the bin nearest ``direction_deg`` (ties go to the lower bin)."""
        if not 0.0 <= direction_deg <= 90.0:
            raise DomainError(f"direction {direction_deg} deg outside [0, 90]")
        return min(self.jitter_table, key=lambda b: abs(b[0] - direction_deg))[1]

    def without_jitter(self):
        return SourceModel(
            self.base_sl_db,
            self.laser,
            tuple((d, 0.0) for d, _ in self.jitter_table),
            self.beam_axis,
        )


@dataclass(frozen=True)
class LocalizationMessage:
    control_bit_count: int
    sl_db: float
    source_coords: Position3D

    def __post_init__(self):
        if int(self.control_bit_count) != self.control_bit_count or self.control_bit_count < 1:
            raise DomainError("control_bit_count must be a positive integer")


@dataclass(frozen=True)
class ReceivedMessage:
    control_bit_sils_db: tuple
    sl_db: float
    source_coords: Position3D


def normalized_energy(E, E_th):
    if not (E > 0 and E_th > 0):
        raise DomainError("pulse and threshold energies must be > 0")
    return E / E_th


def plasma_max_length(laser):
    """Maximum plasma length in meters for a focused pulse above breakdown."""
    beta = normalized_energy(laser.pulse_energy, laser.breakdown_threshold_energy)
    if beta < 1.0:
        raise DomainError(f"pulse energy is below breakdown threshold (beta={beta:.3g})")
    half = math.radians(laser.focusing_angle_deg) / 2.0
    return laser.wavelength_nm * 1e-9 / (math.pi * math.tan(half) ** 2) * math.sqrt(beta - 1.0)


def plasma_position(airborne_pos, focal_depth_m):
    """Plasma location for a vertical beam focused ``focal_depth_m`` below the surface."""
    airborne_pos = Position3D.of(airborne_pos)
    if airborne_pos.z < 0:
        raise DomainError("the airborne node must be at or above the surface (z >= 0)")
    if not focal_depth_m > 0:
        raise DomainError(f"focal depth must be > 0, got {focal_depth_m}")
    return Position3D(airborne_pos.x, airborne_pos.y, -focal_depth_m)


def direction_from_axis(source, plasma, receiver):
    """Angle in degrees between the beam axis and the plasma-to-receiver ray.

    Receivers above the plasma plane (beyond 90 deg) are clamped to 90.
    """
    v = np.subtract(tuple(receiver), tuple(plasma))
    n = np.linalg.norm(v)
    if n == 0:
        raise DomainError("receiver coincides with the plasma")
    cosang = float(np.dot(v, source.beam_axis) / n)
    return min(math.degrees(math.acos(max(-1.0, min(1.0, cosang)))), 90.0)


def emit_pulse_sl(source, direction_deg, rng):
    """One pulse's source level in dB, jittered per the direction bin."""
    return source.base_sl_db + source.sigma_at(direction_deg) * rng.standard_normal()


def transmit(msg, source, receiver_pos, env, freq_khz, snr_db, rng, direction_deg=None):
    """Send ``msg`` through the AWGN intensity channel to ``receiver_pos``.

    Each control bit is one pulse. Per bit the stream supplies two standard
    normals in a fixed order (SL jitter, then channel noise), so runs with
    different jitter tables or bit counts stay paired on a shared seed.

    ``direction_deg`` overrides the geometric angle used for the jitter
    lookup. Noise sigma is ``I_nominal * 10**(-snr_db / 20)`` where
    ``I_nominal`` is the jitter-free received intensity; ``snr_db=inf``
    gives a noiseless channel.
    """
    receiver_pos = Position3D.of(receiver_pos)
    if receiver_pos.z >= 0:
        raise DomainError(f"receiver must be submerged (z < 0), got z={receiver_pos.z}")
    if math.isnan(snr_db):
        raise DomainError("snr_db is NaN")
    plasma = msg.source_coords
    distance = receiver_pos.distance_to(plasma)
    alpha = propagation.absorption(freq_khz, env)
    tl = propagation.transmission_loss(distance, env, alpha)
    if direction_deg is None:
        direction_deg = direction_from_axis(source, plasma, receiver_pos)
    sigma_sl = source.sigma_at(direction_deg)

    draws = rng.standard_normal((msg.control_bit_count, 2))
    sl = source.base_sl_db + sigma_sl * draws[:, 0]
    intensity = 10.0 ** ((sl - tl) / 10.0)
    nominal = 10.0 ** ((source.base_sl_db - tl) / 10.0)
    noisy = intensity + nominal * 10.0 ** (-snr_db / 20.0) * draws[:, 1]
    sils = 10.0 * np.log10(np.maximum(noisy, INTENSITY_FLOOR))
    return ReceivedMessage(tuple(sils.tolist()), msg.sl_db, plasma)


def mean_sil(received):
    sils = received.control_bit_sils_db
    if len(sils) == 0:
        raise DomainError("received message has no control-bit SILs")
    # Shifted mean: exact when all samples are equal.
    ref = sils[0]
    return ref + math.fsum(s - ref for s in sils) / len(sils)


def estimate_range(received, env, freq_khz):
    """Range inversion for a received message, with iteration diagnostics."""
    if env.spreading_factor != 2.0:
        raise DomainError("range inversion assumes spherical spreading (k = 2)")
    tl = tl_from_message(received.sl_db, mean_sil(received))
    return distance_from_tl(tl, propagation.absorption(freq_khz, env))


def estimate_distance(received, env, freq_khz):
    """Pair the decoded plasma coordinates with the estimated range."""
    est: RangeEstimate = estimate_range(received, env, freq_khz)
    return Measurement(received.source_coords, est.distance_m)
