"""Positions and range measurements in the local Cartesian frame.

The frame is metric with ``z`` pointing up and ``z = 0`` on the water
surface, so submerged points have negative ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"position component {name}={v} is not finite")

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def of(cls, p):
        """Coerce a 3-sequence (or a Position3D) into a Position3D."""
        if isinstance(p, cls):
            return p
        x, y, z = p
        return cls(float(x), float(y), float(z))

    def distance_to(self, other):
        return math.dist(tuple(self), tuple(other))


@dataclass(frozen=True)
class Measurement:
    """A plasma position paired with the receiver's estimated range to it."""

    source: Position3D
    distance_m: float

    def __post_init__(self):
        if not self.distance_m >= 1.0:
            raise DomainError(
                f"measured distance {self.distance_m} m is below the 1 m reference distance"
            )
