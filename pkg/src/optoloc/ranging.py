"""
Range from transmission loss.

Under spherical spreading the loss over ``D`` meters is

    TL = 20 log10(D) + alpha * D / 1000

which has no elementary inverse. Writing ``c = alpha ln(10) / 20000`` it
rearranges to ``(c D) exp(c D) = c exp(ln(10) TL / 20)``, so
``D = W0(c exp(ln(10) TL / 20)) / c`` with ``W0`` the principal branch of
the Lambert W function. That form is evaluated here as written; the
round-trip tests against :func:`optoloc.propagation.transmission_loss`
confirm the constant placement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError, MeasurementInconsistentError
from .propagation import REFERENCE_DISTANCE_M

LN10 = math.log(10.0)
INV_E = math.exp(-1.0)

#: Hard iteration cap for range inversion.
MAX_RANGE_ITERATIONS = 10
_MAX_W_ITERATIONS = 64
# exp() overflows beyond this argument.
_MAX_EXP_ARG = 700.0


@dataclass(frozen=True)
class RangeEstimate:
    distance_m: float
    iterations_used: int
    residual_db: float


def _halley(x, w, max_iter):
    """Refine ``w`` toward ``w exp(w) = x``; returns ``(w, iterations)``."""
    for it in range(max_iter + 1):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        # Residual at rounding level, or sitting on the branch point.
        if abs(f) <= 1e-15 * abs(x) or wp1 == 0.0:
            return w, it
        if it == max_iter:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 1e-14 * abs(w):
            return w, it + 1
    raise ConvergenceError(f"Halley iteration for W0({x!r}) did not settle in {max_iter} steps")


def _initial_guess(x):
    if x >= 0.0:
        return math.log1p(x)
    # Branch-point series, accurate near -1/e.
    p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3


def lambert_w0_iter(x, max_iter=_MAX_W_ITERATIONS):
    """Principal-branch Lambert W with the Halley iteration count.

    Returns ``(w, iterations)``. Raises :class:`DomainError` for
    ``x < -1/e`` and :class:`ConvergenceError` if ``max_iter`` is exceeded.
    """
    if math.isnan(x) or x < -INV_E:
        raise DomainError(f"W0 is real only for x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0, 0
    if x == -INV_E:
        return -1.0, 0
    if math.isinf(x):
        return math.inf, 0
    return _halley(x, _initial_guess(x), max_iter)


def lambert_w0(x):
    """Principal branch of the Lambert W function, ``w exp(w) = x``."""
    return lambert_w0_iter(x)[0]


def _w0_of_exp(log_x, max_iter):
    """W0(exp(log_x)) for arguments too large to exponentiate.

    Newton on ``w + ln(w) - log_x``, which shares the root with
    ``w exp(w) = exp(log_x)``.
    """
    w = log_x - math.log(log_x)
    for it in range(1, max_iter + 1):
        step = (w + math.log(w) - log_x) / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 4e-16 * w:
            return w, it
    raise ConvergenceError(f"W0(exp({log_x!r})) did not settle in {max_iter} steps")


def _forward_tl(distance_m, alpha_db_per_km):
    return 20.0 * math.log10(distance_m) + alpha_db_per_km * distance_m * 1e-3


def distance_from_tl(tl_db, alpha, max_iter=MAX_RANGE_ITERATIONS):
    """Invert spherical-spreading transmission loss into a distance.

    Parameters
    ----------
    tl_db : float
        Measured transmission loss in dB, non-negative.
    alpha : AbsorptionCoefficient or float
        Absorption in dB/km.
    max_iter : int
        Halley iteration cap; exceeding it raises :class:`ConvergenceError`.

    Returns
    -------
    RangeEstimate
    """
    a = float(getattr(alpha, "value_db_per_km", alpha))
    if not (tl_db >= 0.0 and math.isfinite(tl_db)):
        raise DomainError(f"transmission loss must be finite and >= 0 dB, got {tl_db}")
    if not (a >= 0.0 and math.isfinite(a)):
        raise DomainError(f"absorption must be finite and >= 0 dB/km, got {a}")

    c = a * LN10 / 20000.0
    # No absorption (or so little that c underflows): pure spherical spreading.
    if c < 1e-300:
        d = 10.0 ** (tl_db / 20.0)
        return RangeEstimate(d, 0, abs(_forward_tl(d, a) - tl_db))

    log_arg = math.log(c) + LN10 / 20.0 * tl_db
    if log_arg < _MAX_EXP_ARG:
        x = math.exp(log_arg)
        w, iterations = _halley(x, _initial_guess(x), max_iter)
    else:
        w, iterations = _w0_of_exp(log_arg, max_iter)
    d = 20000.0 * w / (a * LN10)
    # Losses below alpha * 1e-3 dB put the receiver inside the reference
    # sphere; report the reference distance and let residual_db show the gap.
    d = max(d, REFERENCE_DISTANCE_M)
    return RangeEstimate(d, iterations, abs(_forward_tl(d, a) - tl_db))


def tl_from_message(sl_db, mean_sil_db):
    """Transmission loss implied by a known source level and a mean SIL."""
    tl = sl_db - mean_sil_db
    if tl < 0.0:
        raise MeasurementInconsistentError(
            f"mean SIL {mean_sil_db} dB exceeds source level {sl_db} dB "
            "(receiver inside the 1 m reference or noise-dominated)"
        )
    return tl
