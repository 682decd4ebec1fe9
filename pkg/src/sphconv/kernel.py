"""Sphere-singular kernels, the weak-L2 check, and the 1-d quadrature oracle.

The radial profiles live here: (r^2 - 1)^(-alpha) outside the unit sphere and
(1 - r^2)^(-alpha) inside it. xi_hat_quadrature evaluates the classical
oscillatory integral 2 * int_1^inf (y^2-1)^(-alpha) cos(sy) dy directly, with
no Bessel machinery, so it can serve as an independent referee for the
closed-form multipliers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import ConvergenceError, DomainError, SingularPointError

_INT_TOL = 1e-12


def _near_integer(x: float) -> bool:
    return abs(x - round(x)) < _INT_TOL


@dataclass(frozen=True)
class KernelParams:
    """The pair (alpha, n) shared by kernels, multipliers and regions.

    alpha > 0 and 1 <= n <= 3 are enforced here. The closed-form guard
    (alpha not a positive integer, n/2 - alpha not an integer) is checked by
    the multiplier evaluators, not at construction, so purely spatial uses
    of pole parameters stay legal.
    """

    alpha: float
    n: int

    def __post_init__(self) -> None:
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)):
            raise DomainError(f"kernel.alpha: must be a finite real, got {self.alpha!r}")
        if self.alpha <= 0.0:
            raise DomainError(f"kernel.alpha: must be > 0, got {self.alpha:g}")
        if not (isinstance(self.n, int) and 1 <= self.n <= 3):
            raise DomainError(f"kernel.n: must be an integer in 1..3, got {self.n!r}")

    def guard_violation(self) -> str | None:
        """Reason the closed-form path is unusable, or None if it is fine."""
        if self.alpha >= 0.5 and _near_integer(self.alpha):
            return f"alpha = {self.alpha:g} is a positive integer (gamma factor pole)"
        if _near_integer(self.n / 2.0 - self.alpha):
            return (
                f"n/2 - alpha = {self.n / 2.0 - self.alpha:g} is an integer "
                "(cotangent factor pole)"
            )
        return None


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs for the singular oscillatory quadrature paths.

    jacobi_order: nodes on the singular cell next to the sphere (a floor;
      the oracle raises the effective order with s to keep the head panel's
      oscillation resolved).
    panel_count: Gauss-Legendre panels on [2, truncation_radius] for the
      oracle; the direct convolution reuses the implied panel density
      panel_count / (truncation_radius - 2) per unit length.
    truncation_radius: where half-period tail summation takes over (> 2).
    tail_tol: absolute tolerance of the accelerated tail (in (0, 1e-2]).
    """

    jacobi_order: int = 48
    panel_count: int = 64
    truncation_radius: float = 20.0
    tail_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not (isinstance(self.jacobi_order, int) and self.jacobi_order >= 1):
            raise DomainError(
                f"quadrature.jacobi_order: must be a positive integer, got {self.jacobi_order!r}"
            )
        if not (isinstance(self.panel_count, int) and self.panel_count >= 1):
            raise DomainError(
                f"quadrature.panel_count: must be a positive integer, got {self.panel_count!r}"
            )
        if not (math.isfinite(self.truncation_radius) and self.truncation_radius > 2.0):
            raise DomainError(
                f"quadrature.truncation_radius: must be > 2, got {self.truncation_radius!r}"
            )
        if not (0.0 < self.tail_tol <= 1e-2):
            raise DomainError(
                f"quadrature.tail_tol: must be in (0, 1e-2], got {self.tail_tol!r}"
            )


def _radial_array(r) -> tuple[np.ndarray, bool]:
    arr = np.asarray(r, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr)
    if not np.all(np.isfinite(flat)):
        raise DomainError("radius must be finite")
    if np.any(flat < 0.0):
        raise DomainError("radius must be >= 0")
    if np.any(flat == 1.0):
        raise SingularPointError("kernel is singular exactly on the unit sphere (r = 1)")
    return flat, scalar


def xi_alpha(params: KernelParams, r) -> float | np.ndarray:
    """(r^2 - 1)^(-alpha) for r > 1, zero inside the ball. Singular at r = 1."""
    flat, scalar = _radial_array(r)
    out = np.zeros_like(flat)
    outside = flat > 1.0
    out[outside] = np.power(flat[outside] ** 2 - 1.0, -params.alpha)
    out = out.reshape(np.shape(r))
    return float(out[()]) if scalar else out


def phi_alpha(params: KernelParams, r) -> float | np.ndarray:
    """(1 - r^2)^(-alpha) for r < 1, zero outside the ball. Singular at r = 1."""
    flat, scalar = _radial_array(r)
    out = np.zeros_like(flat)
    inside = flat < 1.0
    out[inside] = np.power(1.0 - flat[inside] ** 2, -params.alpha)
    out = out.reshape(np.shape(r))
    return float(out[()]) if scalar else out


def weak_l2_bound(lambda_grid) -> float:
    """sup over the grid of lambda^2 * |{y : xi_{1/2}(y) > lambda}| (n = 1).

    The level-set measure is 2(sqrt(1 + lambda^-2) - 1); the product is
    evaluated in the algebraically equal form 2 / (1 + sqrt(1 + lambda^-2)),
    which does not cancel at large lambda. The sup is < 1 analytically.
    """
    lam = np.asarray(lambda_grid, dtype=float).ravel()
    if lam.size == 0:
        raise DomainError("lambda grid must be nonempty")
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0.0):
        raise DomainError("lambda values must be positive finite reals")
    vals = 2.0 / (1.0 + np.sqrt(1.0 + 1.0 / (lam * lam)))
    return float(vals.max())


def gauss_jacobi_rule(alpha: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating u^(-alpha) * smooth on (0, 1) exactly
    for polynomial factors up to degree 2*order - 1. alpha in [0, 1).
    """
    alpha = float(alpha)
    if not (0.0 <= alpha < 1.0):
        raise DomainError(f"jacobi exponent must be in [0, 1), got {alpha:g}")
    order = int(order)
    if order < 1:
        raise DomainError(f"rule order must be >= 1, got {order}")
    x, w = roots_jacobi(order, 0.0, -alpha)  # weight (1+x)^(-alpha) on [-1, 1]
    nodes = 0.5 * (x + 1.0)
    weights = w * 2.0 ** (alpha - 1.0)
    target = 1.0 / (1.0 - alpha)
    if abs(weights.sum() - target) > 1e-12 * target:
        raise ConvergenceError(
            f"jacobi rule of order {order} failed the zeroth-moment check"
        )
    return nodes, weights


_GL16 = roots_legendre(16)
_GL8 = roots_legendre(8)

_TAIL_WINDOW = 12  # partial sums kept for averaging acceleration
_TAIL_MAX_SEGMENTS = 2000


def _panel_integrate(fn, edges: np.ndarray, rule) -> float:
    """Composite Gauss-Legendre integral of fn over consecutive edges."""
    xg, wg = rule
    centers = 0.5 * (edges[1:] + edges[:-1])
    halves = 0.5 * (edges[1:] - edges[:-1])
    y = centers[:, None] + halves[:, None] * xg[None, :]
    vals = fn(y)
    return float(np.sum(vals * wg[None, :] * halves[:, None]))


def xi_hat_quadrature(params: KernelParams, s: float, cfg: QuadratureConfig) -> float:
    """The classical transform 2 * int_1^inf (y^2-1)^(-alpha) cos(sy) dy.

    Valid for n = 1 and 1/2 < alpha < 1, where the integral converges.
    The (y-1)^(-alpha) endpoint is handled by a Gauss-Jacobi rule whose
    effective order grows with s (the config order is a floor), the middle
    region by composite Gauss-Legendre panels no wider than ~3/s, and the
    tail by half-period segments between zeros of cos(sy) with iterated
    pairwise averaging of the partial sums.
    """
    alpha = params.alpha
    if params.n != 1:
        raise DomainError("the quadrature oracle is defined for n = 1 only")
    if not (0.5 < alpha < 1.0):
        raise DomainError(
            f"oracle needs 1/2 < alpha < 1 for classical convergence, got {alpha:g}"
        )
    s = float(s)
    if not (math.isfinite(s) and s > 0.0):
        raise DomainError(f"frequency s must be > 0, got {s!r}")

    def integrand(y):
        return np.power(y * y - 1.0, -alpha) * np.cos(s * y)

    # head [1, 2]: y = 1 + u exposes the pure u^(-alpha) weight
    head_order = max(cfg.jacobi_order, int(0.75 * s) + 48)
    u, w = gauss_jacobi_rule(alpha, head_order)
    head = float(np.sum(w * np.power(2.0 + u, -alpha) * np.cos(s * (1.0 + u))))

    # middle [2, R]: panel width capped at ~3/s so GL-16 resolves the wave
    radius = cfg.truncation_radius
    count = max(cfg.panel_count, int(math.ceil((radius - 2.0) * s / 3.0)))
    mid = _panel_integrate(integrand, np.linspace(2.0, radius, count + 1), _GL16)

    # tail: segments ending at consecutive zeros of cos(sy)
    k0 = int(math.ceil((radius * s - 0.5 * math.pi) / math.pi))
    while (0.5 * math.pi + k0 * math.pi) / s <= radius:
        k0 += 1
    partials: list[float] = []
    total = 0.0
    prev_est = None
    left = radius
    for j in range(_TAIL_MAX_SEGMENTS):
        right = (0.5 * math.pi + (k0 + j) * math.pi) / s
        total += _panel_integrate(integrand, np.array([left, right]), _GL8)
        partials.append(total)
        left = right
        if len(partials) >= _TAIL_WINDOW:
            seq = np.array(partials[-_TAIL_WINDOW:])
            for _ in range(_TAIL_WINDOW - 1):
                seq = 0.5 * (seq[:-1] + seq[1:])
            est = float(seq[0])
            if prev_est is not None and abs(est - prev_est) < 0.5 * cfg.tail_tol:
                return 2.0 * (head + mid + est)
            prev_est = est
    raise ConvergenceError(
        f"tail acceleration did not reach tail_tol={cfg.tail_tol:g} "
        f"within {_TAIL_MAX_SEGMENTS} segments (alpha={alpha:g}, s={s:g})"
    )


DEFAULT_ORACLE_QUADRATURE = QuadratureConfig()
