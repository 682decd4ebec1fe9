"""Empirical operator-norm ratios over test batteries and region sweeps.

The measured ratio ||S f||_q / ||f||_p over a fixed battery is a lower
bound for the operator norm, so the lab can witness boundedness inside a
predicted region but can never certify unboundedness outside it.  Battery
composition is versioned by descriptor so reports stay comparable.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EmptyBatteryError, SphconvError
from .kernel import KernelParams
from .multiplier import (
    RegionQuery,
    hl_admissible,
    region_main,
    region_one_dim,
    region_strichartz,
)
from .operators import GridFunction, GridSpec, apply_salpha_spectral, make_test_function

_SKIP_NORM = 1e-12

CSV_HEADER = [
    "n", "alpha", "p", "q", "main", "strichartz", "one_dim", "hl",
    "a_needed", "max_ratio", "argmax", "battery_size", "seed",
]


def lp_norm(f: GridFunction, p: float) -> float:
    """Riemann-sum norm (h^n sum |f|^p)^(1/p); max norm at p = inf.

    O(h^2) accurate for the smooth, rapidly decaying battery members this
    lab feeds it; no endpoint corrections are attempted.
    """
    if p == math.inf:
        return float(np.max(np.abs(f.samples)))
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p >= 1.0):
        raise DomainError(f"norm exponent must be >= 1 or inf, got {p!r}")
    weight = f.spec.h ** f.spec.n
    return float((weight * np.sum(np.abs(f.samples) ** p)) ** (1.0 / p))


@dataclass(frozen=True)
class NormReport:
    """Max battery ratio at one (p, q) cell plus the predicted verdict."""

    query: RegionQuery
    max_ratio: float
    argmax_descriptor: str
    battery_size: int
    predicted: bool | None
    a_needed: float
    n_skipped: int = 0


@dataclass(frozen=True)
class RegionPoint:
    """One sweep cell: all four predicate verdicts plus the measured ratio."""

    n: int
    alpha: float
    p: float
    q: float
    verdicts: dict = field(default_factory=dict)
    a_needed: float = math.nan
    max_ratio: float = math.nan
    argmax: str = ""
    battery_size: int = 0
    seed: int = 0
    error: str = ""


def standard_battery(spec: GridSpec) -> list[GridFunction]:
    """The versioned "standard-v1" battery: 17 members probing scale,
    sphere concentration, dilation and modulation."""
    members = []
    for scale in (1.0, 2.0, 4.0, 8.0):
        members.append(make_test_function(spec, "gaussian", scale))
    for scale in (0.1, 0.2, 0.4):
        members.append(make_test_function(spec, "sphere_bump", scale))
    for lam in (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0):
        members.append(make_test_function(spec, "dilate", lam))
    for freq in (1.0, 4.0, 16.0):
        members.append(make_test_function(spec, "modulated_bump", 2.0, frequency=freq))
    return members


def smoke_battery(spec: GridSpec) -> list[GridFunction]:
    """Six fast members, no sphere bumps; fits coarse grids."""
    members = []
    for scale in (1.0, 2.0):
        members.append(make_test_function(spec, "gaussian", scale))
    for lam in (0.5, 2.0):
        members.append(make_test_function(spec, "dilate", lam))
    for freq in (1.0, 4.0):
        members.append(make_test_function(spec, "modulated_bump", 2.0, frequency=freq))
    return members


_BATTERIES = {"standard-v1": standard_battery, "smoke-v1": smoke_battery}


def battery_from_descriptor(descriptor: str, spec: GridSpec) -> list[GridFunction]:
    try:
        builder = _BATTERIES[descriptor]
    except KeyError:
        raise DomainError(
            f"unknown battery descriptor {descriptor!r}; "
            f"known: {sorted(_BATTERIES)}"
        ) from None
    return builder(spec)


def default_sweep_grid(n: int) -> GridSpec:
    # n = 1 carries the full battery; higher n shrink to keep the padded
    # transforms inside desk-scale memory
    if n == 1:
        return GridSpec(1, 64.0, 8192)
    if n == 2:
        return GridSpec(2, 16.0, 512)
    return GridSpec(3, 8.0, 128)


def ratio_report(
    params: KernelParams,
    p: float,
    q: float,
    battery: list[GridFunction],
    *,
    which: str = "reference",
    pad_factor: int | None = None,
    calibration: float = 1.0,
    applied: list[GridFunction] | None = None,
) -> NormReport:
    """Maximize ||S f||_q / ||f||_p over the battery.

    Members with ||f||_p below 1e-12 are skipped and counted.  ``applied``
    short-circuits the operator when the caller already holds S f for each
    member (the sweep applies the battery once and reuses it per cell).
    """
    if not battery:
        raise EmptyBatteryError("battery is empty")
    query = RegionQuery(p=float(p), q=float(q), params=params)
    if applied is None:
        applied = [
            apply_salpha_spectral(f, params, which, pad_factor=pad_factor,
                                  calibration=calibration)
            for f in battery
        ]
    if len(applied) != len(battery):
        raise DomainError("applied battery length does not match the battery")

    best, best_label, skipped = -math.inf, "", 0
    for f, sf in zip(battery, applied):
        denom = lp_norm(f, p)
        if denom < _SKIP_NORM:
            skipped += 1
            continue
        ratio = lp_norm(sf, q) / denom
        if ratio > best:
            best, best_label = ratio, f.label
    if best == -math.inf:
        raise EmptyBatteryError(
            f"all {len(battery)} battery members fell below the "
            f"{_SKIP_NORM:g} norm floor"
        )
    try:
        predicted = region_main(query)
    except DomainError:
        predicted = None
    a_needed = params.n * (1.0 / query.p - 1.0 / query.q)
    return NormReport(
        query=query,
        max_ratio=best,
        argmax_descriptor=best_label,
        battery_size=len(battery),
        predicted=predicted,
        a_needed=a_needed,
        n_skipped=skipped,
    )


def _cell_verdicts(query: RegionQuery) -> dict:
    def try_predicate(fn):
        try:
            return fn(query)
        except DomainError:
            return None

    params = query.params
    a_needed = params.n * (1.0 / query.p - 1.0 / query.q)
    if 0.0 < a_needed < params.n:
        hl = try_predicate(lambda qq: hl_admissible(a_needed, qq))
    else:
        hl = None
    return {
        "main": try_predicate(region_main),
        "strichartz": try_predicate(region_strichartz),
        "one_dim": try_predicate(region_one_dim) if params.n == 1 else None,
        "hl": hl,
    }


def sweep_region(
    params: KernelParams,
    p_grid: list[float],
    q_grid: list[float],
    battery_descriptor: str = "standard-v1",
    *,
    grid_spec: GridSpec | None = None,
    seed: int | None = None,
    workers: int = 1,
    which: str = "reference",
    pad_factor: int | None = None,
    calibration: float = 1.0,
) -> list[RegionPoint]:
    """Evaluate every (p, q) cell: predicate verdicts plus measured ratio.

    The battery is synthesized and pushed through the operator exactly once;
    cells then reduce over precomputed norms, so they parallelize freely.
    Cell-level failures land in the cell's ``error`` field, never abort the
    sweep.  A seed is required up front (recorded per row; any future
    randomized battery member must draw from it) so reruns are byte-for-byte
    reproducible.
    """
    if seed is None:
        raise DomainError("sweep requires an explicit seed; none given")
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if not p_grid or not q_grid:
        raise DomainError("p_grid and q_grid must be nonempty")
    if not isinstance(workers, int) or workers < 1:
        raise DomainError(f"workers must be a positive integer, got {workers!r}")

    if grid_spec is None:
        grid_spec = default_sweep_grid(params.n)
    # a battery-level failure (pole parameters, unresolvable member) still
    # yields a full sweep: the predicate columns are pure arithmetic, so the
    # failure is recorded per cell next to max_ratio = nan
    battery, applied, battery_error = [], None, ""
    try:
        battery = battery_from_descriptor(battery_descriptor, grid_spec)
        applied = [
            apply_salpha_spectral(f, params, which, pad_factor=pad_factor,
                                  calibration=calibration)
            for f in battery
        ]
    except SphconvError as exc:
        battery_error = f"{type(exc).__name__}: {exc}"
    cells = [(p, q) for p in p_grid for q in q_grid]
    na = {"main": None, "strichartz": None, "one_dim": None, "hl": None}

    def run_cell(cell):
        p, q = cell
        base = dict(n=params.n, alpha=params.alpha, p=float(p), q=float(q),
                    seed=seed, battery_size=len(battery))
        try:
            query = RegionQuery(p=float(p), q=float(q), params=params)
        except SphconvError as exc:
            return RegionPoint(verdicts=dict(na),
                               error=f"{type(exc).__name__}: {exc}", **base)
        verdicts = _cell_verdicts(query)
        a_needed = params.n * (1.0 / query.p - 1.0 / query.q)
        if battery_error:
            return RegionPoint(verdicts=verdicts, a_needed=a_needed,
                               error=battery_error, **base)
        try:
            report = ratio_report(params, p, q, battery, applied=applied)
            return RegionPoint(
                verdicts=verdicts,
                a_needed=a_needed,
                max_ratio=report.max_ratio,
                argmax=report.argmax_descriptor,
                **base,
            )
        except SphconvError as exc:
            return RegionPoint(verdicts=verdicts, a_needed=a_needed,
                               error=f"{type(exc).__name__}: {exc}", **base)

    if workers == 1:
        return [run_cell(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_cell, cells))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _verdict(v) -> str:
    if v is None:
        return "na"
    return "true" if v else "false"


def write_region_csv(points: list[RegionPoint]) -> str:
    """Render sweep rows under the fixed schema, 17-significant-digit floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for pt in points:
        writer.writerow([
            pt.n,
            _fmt(pt.alpha),
            _fmt(pt.p),
            _fmt(pt.q),
            _verdict(pt.verdicts.get("main")),
            _verdict(pt.verdicts.get("strichartz")),
            _verdict(pt.verdicts.get("one_dim")),
            _verdict(pt.verdicts.get("hl")),
            _fmt(pt.a_needed),
            _fmt(pt.max_ratio),
            pt.argmax,
            pt.battery_size,
            pt.seed,
        ])
    return buf.getvalue()
