"""
Position fixes from plasma ranges.

Depth always comes from the node's pressure sensor, so both solvers only
estimate horizontal coordinates.

Static nodes use linearized multilateration: every range sphere
``|p - s_i|^2 = D_i^2`` has the last one subtracted from it, which cancels
the quadratic terms and leaves an over-determined linear system in
``(x, y)`` solved in the least-squares sense.

Dynamic nodes hear a single plasma three times while moving a known
distance along +x (A to B) and then along +y (B to C); differencing the
range spheres gives ``x_B`` and ``y_C`` in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CollinearGeometryError,
    DegenerateMotionError,
    DomainError,
    GeometryError,
    InsufficientMeasurementsError,
)
from .geometry import Position3D

#: Normal-equation condition number above which geometry is rejected.
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class StaticFix:
    x_m: float
    y_m: float
    z_m: float
    condition_number: float

    def position(self):
        return Position3D(self.x_m, self.y_m, self.z_m)


@dataclass(frozen=True)
class MotionLog:
    d_ab_m: float
    d_bc_m: float

    def __post_init__(self):
        if not (self.d_ab_m > 0 and self.d_bc_m > 0):
            raise DegenerateMotionError(
                f"motion legs must be positive, got D_AB={self.d_ab_m}, D_BC={self.d_bc_m}"
            )


def linear_system(measurements, depth_z):
    """Design matrix and right-hand side of the linearized range equations."""
    src = np.array([tuple(m.source) for m in measurements], dtype=float)
    d = np.array([m.distance_m for m in measurements], dtype=float)
    ref, d_ref = src[-1], d[-1]
    head = src[:-1]
    A = 2.0 * (head[:, :2] - ref[:2])
    b = (
        np.sum(head ** 2, axis=1)
        - np.sum(ref ** 2)
        - 2.0 * depth_z * (head[:, 2] - ref[2])
        + d_ref ** 2
        - d[:-1] ** 2
    )
    return A, b


def multilaterate_static(measurements, depth_z):
    """Least-squares horizontal fix from three or more plasma ranges.

    The last measurement is the reference equation. The minimizer of
    ``|A phi - b|`` is found with ``numpy.linalg.lstsq`` (an orthogonal
    factorization) instead of forming ``inv(A.T @ A)``.
    """
    measurements = list(measurements)
    if len(measurements) < 3:
        raise InsufficientMeasurementsError(
            f"static multilateration needs at least 3 measurements, got {len(measurements)}"
        )
    A, b = linear_system(measurements, depth_z)
    cond = np.linalg.cond(A.T @ A)
    if not cond <= MAX_CONDITION:
        raise CollinearGeometryError(
            f"plasma positions are (nearly) collinear in x-y: cond(A^T A) = {cond:.3g}"
        )
    phi = np.linalg.lstsq(A, b, rcond=None)[0]
    return StaticFix(float(phi[0]), float(phi[1]), float(depth_z), float(cond))


def localize_dynamic(m_a, m_b, m_c, motion, depth_z):
    """Final position C of a node that moved +x by ``d_ab_m`` then +y by ``d_bc_m``."""
    s = m_a.source
    if m_b.source != s or m_c.source != s:
        raise GeometryError("dynamic localization needs all three ranges from one plasma position")
    if not (motion.d_ab_m > 0 and motion.d_bc_m > 0):
        raise DegenerateMotionError("motion legs must be positive")
    d_ab, d_bc = motion.d_ab_m, motion.d_bc_m
    x_b = (m_b.distance_m ** 2 - m_a.distance_m ** 2 + d_ab ** 2 + 2.0 * d_ab * s.x) / (2.0 * d_ab)
    y_c = (m_c.distance_m ** 2 - m_b.distance_m ** 2 + d_bc ** 2 + 2.0 * d_bc * s.y) / (2.0 * d_bc)
    return Position3D(x_b, y_c, float(depth_z))


def residual_norm(fix, measurements):
    """RMS range residual of ``fix`` against the measurements, in meters."""
    measurements = list(measurements)
    if not measurements:
        raise DomainError("residual_norm needs at least one measurement")
    fix = Position3D.of(fix)
    sq = [(fix.distance_to(m.source) - m.distance_m) ** 2 for m in measurements]
    return math.sqrt(math.fsum(sq) / len(sq))
