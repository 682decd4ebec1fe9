"""Closed-form radial multipliers, decay fitting, and (p, q) region predicates.

Two closed forms are provided for the transform of the outside-the-ball
kernel. m_paper is the cotangent-weighted Bessel difference; m_reference is
the Weber-function form for n = 1. Both are evaluated through the scaled
series t^(-a) J_a(t) so small frequencies never suffer cancellation. The
quadrature oracle in `kernel` arbitrates between them; the fourier-check
workflow records which one tracks it with an s-independent ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    PoleError,
)
from .kernel import KernelParams
from .specfun import DecayFit, gamma, scaled_bessel

_EQ_TOL = 1e-12  # equality tolerance for all region predicates
_FIT_FLOOR = 1e-14
# two decades of dynamic range, with an allowance of one oscillation spacing
# at each end (peak sampling quantizes the endpoints of the requested window:
# peaks of |m| sit up to pi inside it on either side)
_MIN_DECADES = 1.85


@dataclass(frozen=True)
class MultiplierSample:
    """One radial multiplier evaluation (s = |frequency|, value = m(s))."""

    s: float
    value: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.s) and self.s >= 0.0):
            raise DomainError(f"sample frequency must be finite and >= 0, got {self.s!r}")
        if not math.isfinite(self.value):
            raise DomainError("sample value must be finite")


@dataclass(frozen=True)
class RegionQuery:
    """A Lebesgue-exponent pair (p, q) attached to kernel parameters.

    The closed boundary p = 1 (and q = 1) is accepted so predicates can
    answer False there; below 1 or non-finite is a domain error.
    """

    p: float
    q: float
    params: KernelParams

    def __post_init__(self) -> None:
        for name, v in (("p", self.p), ("q", self.q)):
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 1.0):
                raise DomainError(f"region.{name}: must be a finite real >= 1, got {v!r}")


def _check_guard(params: KernelParams) -> None:
    reason = params.guard_violation()
    if reason is not None:
        raise PoleError(f"closed-form multiplier unusable: {reason}")


def _freq_array(s) -> tuple[np.ndarray, bool]:
    arr = np.abs(np.asarray(s, dtype=float))  # radial: only |s| matters
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).astype(float)
    if not np.all(np.isfinite(flat)):
        raise DomainError("frequency s must be finite")
    return flat, scalar


def m_paper(params: KernelParams, s) -> float | np.ndarray:
    """Cotangent-weighted difference form:

        sqrt(pi) Gamma(1-alpha) (s/2)^(alpha-n/2) cot(pi(n/2-alpha))
            * (J_{alpha-n/2}(s) - J_{n/2-alpha}(s)),

    computed through the scaled series so the s -> 0 limit is exact when
    alpha > n/2. Identically zero when alpha = (n+1)/2 (the cot factor
    vanishes there while the Bessel difference does not).
    """
    _check_guard(params)
    alpha, n = params.alpha, params.n
    flat, scalar = _freq_array(s)
    mu = alpha - 0.5 * n
    if mu <= 0.0 and np.any(flat == 0.0):
        raise DomainError(
            f"m_paper has no finite s = 0 limit for alpha <= n/2 (alpha={alpha:g}, n={n})"
        )
    ang = math.pi * (0.5 * n - alpha)
    cot = math.cos(ang) / math.sin(ang)
    front = math.sqrt(math.pi) * gamma(1.0 - alpha) * cot * 2.0 ** (-mu)
    vals = front * (
        np.power(flat, 2.0 * mu) * scaled_bessel(mu, flat) - scaled_bessel(-mu, flat)
    )
    if not np.all(np.isfinite(vals)):
        raise NumericalError("m_paper produced a non-finite value")
    vals = vals.reshape(np.shape(s))
    return float(vals[()]) if scalar else vals


def _m_paper_misparsed(params: KernelParams, s) -> float | np.ndarray:
    """Deliberately wrong reading of the prefactor: |s| / 2^(alpha-n/2)
    instead of (|s|/2)^(alpha-n/2). Test hook for the ratio-constancy
    detector; requires s > 0.
    """
    _check_guard(params)
    alpha, n = params.alpha, params.n
    flat, scalar = _freq_array(s)
    if np.any(flat == 0.0):
        raise DomainError("the misparsed form is defined for s > 0 only")
    mu = alpha - 0.5 * n
    ang = math.pi * (0.5 * n - alpha)
    cot = math.cos(ang) / math.sin(ang)
    front = math.sqrt(math.pi) * gamma(1.0 - alpha) * cot * 2.0 ** (-mu)
    j_plus = np.power(flat, mu) * scaled_bessel(mu, flat)
    j_minus = np.power(flat, -mu) * scaled_bessel(-mu, flat)
    vals = front * flat * (j_plus - j_minus)
    vals = vals.reshape(np.shape(s))
    return float(vals[()]) if scalar else vals


def m_reference(params: KernelParams, s) -> float | np.ndarray:
    """Weber-function form for n = 1, written through J of orders +-nu with
    nu = alpha - 1/2:

        -sqrt(pi) Gamma(1-alpha) 2^(-nu)
            * (s^(2 nu) sb(nu, s) cos(nu pi) - sb(-nu, s)) / sin(nu pi),

    where sb(a, t) = t^(-a) J_a(t). Defined at s = 0 with its finite limit
    Gamma(1-alpha) Gamma(alpha-1/2) / sqrt(pi) (needs alpha > 1/2).
    """
    alpha, n = params.alpha, params.n
    if n != 1:
        raise DomainError("m_reference is a one-dimensional closed form (n = 1)")
    nu = alpha - 0.5
    if abs(nu - round(nu)) < _EQ_TOL:
        raise PoleError(f"m_reference degenerate: alpha - 1/2 = {nu:g} is an integer")
    if alpha >= 1.0 and abs(alpha - round(alpha)) < _EQ_TOL:
        raise PoleError(f"m_reference degenerate: gamma pole at alpha = {alpha:g}")
    flat, scalar = _freq_array(s)
    if nu <= 0.0 and np.any(flat == 0.0):
        raise DomainError("m_reference has no finite s = 0 limit for alpha <= 1/2")
    front = -math.sqrt(math.pi) * gamma(1.0 - alpha) * 2.0 ** (-nu) / math.sin(math.pi * nu)
    vals = front * (
        np.power(flat, 2.0 * nu) * scaled_bessel(nu, flat) * math.cos(math.pi * nu)
        - scaled_bessel(-nu, flat)
    )
    if not np.all(np.isfinite(vals)):
        raise NumericalError("m_reference produced a non-finite value")
    vals = vals.reshape(np.shape(s))
    return float(vals[()]) if scalar else vals


def decay_exponent_predicted(params: KernelParams) -> float:
    """The tabulated decay exponent 2 alpha - n - 1/2 (used as |s|^-that)."""
    return 2.0 * params.alpha - params.n - 0.5


def peak_samples(fn, s_min: float, s_max: float, coarse_step: float | None = None,
                 refine_iters: int = 80) -> list[MultiplierSample]:
    """Samples of fn at the local maxima of |fn| on [s_min, s_max].

    A coarse scan (default step pi/8) locates interior maxima of |fn|; each
    is then refined by ternary search. fn must accept numpy arrays.
    """
    if not (0.0 < s_min < s_max):
        raise DomainError("need 0 < s_min < s_max")
    step = coarse_step if coarse_step is not None else math.pi / 8.0
    grid = np.arange(s_min, s_max + step, step)
    grid = grid[grid <= s_max]
    vals = np.abs(np.asarray(fn(grid), dtype=float))
    idx = np.nonzero((vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:]))[0] + 1
    if idx.size == 0:
        raise InsufficientDataError("no interior maxima found in the scan window")
    lo = grid[idx - 1].astype(float)
    hi = grid[idx + 1].astype(float)
    for _ in range(refine_iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        f1 = np.abs(np.asarray(fn(m1), dtype=float))
        f2 = np.abs(np.asarray(fn(m2), dtype=float))
        take_right = f1 < f2
        lo = np.where(take_right, m1, lo)
        hi = np.where(take_right, hi, m2)
    s_peak = 0.5 * (lo + hi)
    v_peak = np.asarray(fn(s_peak), dtype=float)
    return [MultiplierSample(float(sv), float(vv)) for sv, vv in zip(s_peak, v_peak)]


def decay_slope_fit(samples: list[MultiplierSample]) -> DecayFit:
    """Least-squares power law through (s, |value|) in log-log coordinates.

    Needs at least 20 usable samples spanning about two decades; values at
    or below 1e-14 are dropped first (Bessel zeros would wreck a log fit).
    """
    usable = [(m.s, abs(m.value)) for m in samples if abs(m.value) > _FIT_FLOOR]
    if not usable:
        raise DegenerateFitError("all samples are numerically zero")
    if len(usable) < 20:
        raise InsufficientDataError(f"need >= 20 usable samples, got {len(usable)}")
    svals = np.array([s for s, _ in usable])
    if np.any(svals <= 0.0):
        raise DomainError("slope fit needs strictly positive frequencies")
    span = math.log10(svals.max() / svals.min())
    if span < _MIN_DECADES:
        raise InsufficientDataError(
            f"samples span {span:.2f} decades; need about two (>= {_MIN_DECADES})"
        )
    x = np.log(svals)
    y = np.log(np.array([v for _, v in usable]))
    coeffs = np.polyfit(x, y, 1)
    fitted = np.polyval(coeffs, x)
    return DecayFit(
        exponent=float(coeffs[0]),
        constant=float(math.exp(coeffs[1])),
        residual=float(np.max(np.abs(fitted - y))),
        t_range=(float(svals.min()), float(svals.max())),
    )


# --- region predicates -------------------------------------------------------

def _in_window(query: RegionQuery) -> bool:
    return 1.0 < query.p <= 2.0 and 2.0 <= query.q


def hl_admissible(a: float, query: RegionQuery) -> bool:
    """Power-decay admissibility: 1 < p <= 2 <= q < inf and 1/p - 1/q = a/n."""
    n = query.params.n
    if not (0.0 < a < n):
        raise DomainError(f"decay exponent must be in (0, n) = (0, {n}), got {a!r}")
    if not _in_window(query):
        return False
    return abs((1.0 / query.p - 1.0 / query.q) - a / n) <= _EQ_TOL


def region_main(query: RegionQuery) -> bool:
    """1 < p <= 2 <= q < inf and 1/p - 1/q <= (2 alpha - n - 1/2)/n,
    for n/2 + 1/4 < alpha <= (n+1)/2."""
    alpha, n = query.params.alpha, query.params.n
    if not (0.5 * n + 0.25 < alpha <= 0.5 * (n + 1) + _EQ_TOL):
        raise DomainError(
            f"region needs n/2 + 1/4 < alpha <= (n+1)/2, got alpha={alpha:g}, n={n}"
        )
    if not _in_window(query):
        return False
    return (1.0 / query.p - 1.0 / query.q) <= (2.0 * alpha - n - 0.5) / n + _EQ_TOL


def region_strichartz(query: RegionQuery) -> bool:
    """1 < p <= 2 <= q < inf and 1/p - 1/q <= (n + 1 - 2 alpha)/(2n),
    for 0 < alpha <= (n+1)/2. Comparison baseline region."""
    alpha, n = query.params.alpha, query.params.n
    if not (0.0 < alpha <= 0.5 * (n + 1) + _EQ_TOL):
        raise DomainError(
            f"region needs 0 < alpha <= (n+1)/2, got alpha={alpha:g}, n={n}"
        )
    if not _in_window(query):
        return False
    return (1.0 / query.p - 1.0 / query.q) <= (n + 1.0 - 2.0 * alpha) / (2.0 * n) + _EQ_TOL


def region_one_dim(query: RegionQuery) -> bool:
    """One-dimensional exponent lines (n = 1): the sharp pair
    p = 2/(2-alpha), q = 2/alpha, and the two dual segments
    1/q = alpha - 1/p (for 2/(2-alpha) <= p <= 2) and
    1/q = alpha - 1/p' (for 1/(3/2-alpha) <= p <= 2/(2-alpha)),
    the segments requiring 1/2 <= alpha <= 1.
    """
    if query.params.n != 1:
        raise DomainError("one-dimensional region predicate needs n = 1")
    alpha = query.params.alpha
    if not (0.0 <= alpha <= 1.0 + _EQ_TOL):
        raise DomainError(f"one-dimensional region needs 0 <= alpha <= 1, got {alpha:g}")
    p, q = query.p, query.q
    rp, rq = 1.0 / p, 1.0 / q
    # sharp single point, valid on all of 0 <= alpha <= 1
    if abs(rp - 0.5 * (2.0 - alpha)) <= _EQ_TOL and abs(rq - 0.5 * alpha) <= _EQ_TOL:
        return True
    if alpha < 0.5 - _EQ_TOL:
        return False
    # segment: 1/q = alpha - 1/p on 2/(2-alpha) <= p <= 2
    if 2.0 / (2.0 - alpha) - _EQ_TOL <= p <= 2.0 + _EQ_TOL:
        if abs(rq - (alpha - rp)) <= _EQ_TOL:
            return True
    # dual segment: 1/q = alpha - (1 - 1/p) on 1/(3/2-alpha) <= p <= 2/(2-alpha)
    if 1.0 / (1.5 - alpha) - _EQ_TOL <= p <= 2.0 / (2.0 - alpha) + _EQ_TOL:
        if abs(rq - (alpha - (1.0 - rp))) <= _EQ_TOL:
            return True
    return False
