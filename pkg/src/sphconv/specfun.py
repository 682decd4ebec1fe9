"""Real-order Bessel J, the real gamma function, and decay-envelope fits.

These evaluators are the numerical bedrock of the multiplier formulas.
Bessel J is computed in two regimes: the ascending power series for small
arguments and the large-argument asymptotic expansion beyond, with the seam
placed where both are accurate. The scaled variant t^(-a) J_a(t) is summed
directly from its own series so small arguments never go through the
cancellation-prone t^(-a) * J_a(t) product.

Supported orders are real with |a| <= 50; negative integer orders are
rejected (the series coefficients degenerate there and nothing downstream
needs them).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError, NumericalError, PoleError, RangeError

_ORDER_LIMIT = 50.0
# Seam between the ascending series and the asymptotic expansion. For
# |a| <= _BIG_ORDER both regimes overlap accurately at t = 12; above that the
# asymptotic expansion needs t >~ a^2/2 and the series runs out of digits
# near t ~ 30, so the gap is bridged by an extended-precision evaluation.
_SERIES_SWITCH = 12.0
_BIG_ORDER = 4.9
_SERIES_TERMS = 64
_HANKEL_MIN_TERMS = 10
_HANKEL_MAX_TERMS = 30


@dataclass(frozen=True)
class BesselOrder:
    """A validated real Bessel order."""

    a: float

    def __post_init__(self) -> None:
        a = self.a
        if not (isinstance(a, (int, float)) and math.isfinite(a)):
            raise RangeError(f"bessel order must be a finite real, got {a!r}")
        if abs(a) > _ORDER_LIMIT:
            raise RangeError(
                f"bessel order {a} outside the supported range |a| <= {_ORDER_LIMIT:g}"
            )


@dataclass(frozen=True)
class DecayFit:
    """A fitted power law: constant * t^exponent, with its fit residual."""

    exponent: float
    constant: float
    residual: float
    t_range: tuple[float, float]

    def __post_init__(self) -> None:
        if not (self.constant > 0.0):
            raise DomainError(f"fit constant must be positive, got {self.constant}")
        if self.residual < 0.0:
            raise DomainError("fit residual must be nonnegative")
        lo, hi = self.t_range
        if not (0.0 <= lo < hi):
            raise DomainError(f"fit range must satisfy 0 <= low < high, got {self.t_range}")


def _order_value(order: BesselOrder | float) -> float:
    a = order.a if isinstance(order, BesselOrder) else BesselOrder(float(order)).a
    if a < 0.0 and a == math.floor(a):
        raise RangeError(f"negative integer order {a:g} is not supported")
    return float(a)


def gamma(x: float) -> float:
    """Gamma(x) for real non-pole x; the negative axis goes through reflection.

    Raises PoleError at 0, -1, -2, ... and NumericalError on overflow.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma argument must be finite, got {x!r}")
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma pole at x = {x:g}")
    try:
        if x > 0.0:
            return math.gamma(x)
        # Gamma(x) = pi / (sin(pi x) Gamma(1 - x)) keeps evaluation on x > 0.
        return math.pi / (math.sin(math.pi * x) * math.gamma(1.0 - x))
    except OverflowError as exc:
        raise NumericalError(f"gamma overflow at x = {x:g}") from exc


def _as_time_array(t, allow_zero: bool) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr)
    if not np.all(np.isfinite(flat)):
        raise DomainError("argument t must be finite")
    low_ok = np.all(flat >= 0.0) if allow_zero else np.all(flat > 0.0)
    if not low_ok:
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"argument t must be {bound}")
    return flat.astype(float), scalar


def _series_scaled(a: float, t: np.ndarray) -> np.ndarray:
    """Ascending series for t^(-a) J_a(t); exact limit 2^(-a)/Gamma(a+1) at t=0."""
    z = 0.25 * t * t
    term = np.ones_like(z)
    acc = np.ones_like(z)
    for k in range(1, _SERIES_TERMS + 1):
        term = term * (-z) / (k * (a + k))
        acc = acc + term
    return acc * (2.0 ** (-a) / gamma(a + 1.0))


def _series_j(a: float, t: np.ndarray) -> np.ndarray:
    return _series_scaled(a, t) * np.power(t, a)


def _hankel_j(a: float, t: np.ndarray) -> np.ndarray:
    """Large-argument expansion sqrt(2/(pi t)) (P cos w - Q sin w).

    The asymptotic terms are summed until they start growing (then frozen),
    with at least 10 and at most 30 terms.
    """
    mu = 4.0 * a * a
    c = np.ones_like(t)
    p = np.ones_like(t)
    q = np.zeros_like(t)
    frozen = np.zeros(t.shape, dtype=bool)
    inv8t = 0.125 / t
    for j in range(1, _HANKEL_MAX_TERMS + 1):
        nxt = c * ((mu - (2.0 * j - 1.0) ** 2) / j) * inv8t
        grew = np.abs(nxt) >= np.abs(c)
        frozen |= grew & (j > _HANKEL_MIN_TERMS)
        c = np.where(frozen, 0.0, nxt)
        sign = -1.0 if (j // 2) % 2 else 1.0
        if j % 2:
            q = q + sign * c
        else:
            p = p + sign * c
    w = t - (0.5 * a + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * t)) * (p * np.cos(w) - q * np.sin(w))


def _mpmath_j(a: float, t: np.ndarray) -> np.ndarray:
    return np.array([float(mpmath.besselj(a, float(tv))) for tv in t], dtype=float)


def _mpmath_scaled(a: float, t: np.ndarray) -> np.ndarray:
    out = np.empty(t.shape, dtype=float)
    for i, tv in enumerate(t):
        with mpmath.workdps(30):
            out[i] = float(mpmath.besselj(a, float(tv)) * mpmath.power(float(tv), -a))
    return out


def bessel_j(order: BesselOrder | float, t) -> float | np.ndarray:
    """J_a(t) for real order a, |a| <= 50, t > 0. Accepts scalars or arrays."""
    a = _order_value(order)
    flat, scalar = _as_time_array(t, allow_zero=False)
    out = np.empty_like(flat)
    if abs(a) <= _BIG_ORDER:
        small = flat <= _SERIES_SWITCH
        if small.any():
            out[small] = _series_j(a, flat[small])
        if (~small).any():
            out[~small] = _hankel_j(a, flat[~small])
    else:
        asym = flat >= 0.5 * a * a
        if asym.any():
            out[asym] = _hankel_j(a, flat[asym])
        if (~asym).any():
            out[~asym] = _mpmath_j(a, flat[~asym])
    out = out.reshape(np.shape(t))
    return float(out[()]) if scalar else out


def scaled_bessel(order: BesselOrder | float, t) -> float | np.ndarray:
    """t^(-a) J_a(t), computed without cancellation at small t.

    t = 0 is allowed and returns the series limit 1/(2^a Gamma(a+1)).
    """
    a = _order_value(order)
    flat, scalar = _as_time_array(t, allow_zero=True)
    out = np.empty_like(flat)
    if abs(a) <= _BIG_ORDER:
        small = flat <= _SERIES_SWITCH
        if small.any():
            out[small] = _series_scaled(a, flat[small])
        if (~small).any():
            tb = flat[~small]
            out[~small] = _hankel_j(a, tb) * np.power(tb, -a)
    else:
        asym = flat >= 0.5 * a * a
        if asym.any():
            tb = flat[asym]
            out[asym] = _hankel_j(a, tb) * np.power(tb, -a)
        if (~asym).any():
            out[~asym] = _mpmath_scaled(a, flat[~asym])
    out = out.reshape(np.shape(t))
    return float(out[()]) if scalar else out


def envelope_constant(order: BesselOrder | float, t_max: float, samples: int) -> DecayFit:
    """Empirical sup of |t^(-a) J_a(t)| (1+t)^(a+1/2) over a log-spaced grid.

    The returned DecayFit carries the sup in `constant`, the fixed envelope
    exponent -(a+1/2), and the largest jump between adjacent grid values in
    `residual` (a grid-resolution bound on how much the sup could be missed).
    """
    a = _order_value(order)
    t_max = float(t_max)
    if not (math.isfinite(t_max) and t_max > 0.0):
        raise DomainError(f"t_max must be > 0, got {t_max!r}")
    samples = int(samples)
    if samples < 100:
        raise DomainError(f"samples must be >= 100, got {samples}")
    lo = min(1e-6, 1e-3 * t_max)
    grid = np.logspace(math.log10(lo), math.log10(t_max), samples)
    vals = np.abs(scaled_bessel(a, grid)) * np.power(1.0 + grid, a + 0.5)
    limit0 = abs(scaled_bessel(a, 0.0))  # the t -> 0 endpoint of the envelope
    vals = np.concatenate(([limit0], vals))
    constant = float(vals.max())
    if not math.isfinite(constant):
        raise NumericalError(f"envelope for order {a:g} is not finite on the grid")
    residual = float(np.abs(np.diff(vals)).max())
    return DecayFit(
        exponent=-(a + 0.5),
        constant=constant,
        residual=residual,
        t_range=(float(lo), t_max),
    )
