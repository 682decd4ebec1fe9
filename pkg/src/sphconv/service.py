"""HTTP facade over the verification workflows.

Every command-line action is a POST against this app, whether the client
runs it in-process or against a remote instance; responses carry both
structured rows and the exact CSV/text artifacts so outputs are identical
either way.  Domain failures map to 422 with the error class name in
``kind`` for exit-code dispatch on the client side.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import (
    ApplySettings,
    BesselCheckSettings,
    FourierCheckSettings,
    SweepSettings,
)
from .errors import SphconvError
from .kernel import KernelParams, QuadratureConfig
from .operators import GridFunction, GridSpec
from .workflows import run_apply, run_bessel_check, run_fourier_check, run_sweep


class KernelModel(BaseModel):
    alpha: float
    n: int = 1

    def build(self) -> KernelParams:
        return KernelParams(self.alpha, self.n)


class GridModel(BaseModel):
    half_width: float
    points_per_axis: int

    def build(self, n: int) -> GridSpec:
        return GridSpec(n, self.half_width, self.points_per_axis)


class QuadratureModel(BaseModel):
    jacobi_order: int = 48
    panel_count: int = 64
    truncation_radius: float = 20.0
    tail_tol: float = 1e-9

    def build(self) -> QuadratureConfig:
        return QuadratureConfig(self.jacobi_order, self.panel_count,
                                self.truncation_radius, self.tail_tol)


class BesselCheckRequest(BaseModel):
    orders: list[float] = [-0.5, 0.0, 0.5, 1.0, 2.0]
    t_max: float = 1000.0
    samples: int = 100000
    tolerance: float = Field(default=1e-10, gt=0.0)


class FourierCheckRequest(BaseModel):
    alphas: list[float] = [0.6, 0.75, 0.9]
    s_values: list[float] = [0.5, 1.0, 2.0, 5.0]
    parse: Literal["standard", "misparsed"] = "standard"
    tolerance: float = Field(default=1e-3, gt=0.0)
    quadrature: QuadratureModel | None = None


class ApplyRequest(BaseModel):
    kernel: KernelModel
    grid: GridModel | None = None
    kind: Literal["gaussian", "sphere_bump", "modulated_bump", "dilate"] = "gaussian"
    scale: float = 2.0
    frequency: float = 0.0
    samples: list[float] | None = None  # row-major; replaces the synthesized kind
    label: str = ""
    which: Literal["paper", "reference"] = "reference"
    pad_factor: int | None = None
    direct: bool = False
    calibration: float = 1.0
    quadrature: QuadratureModel | None = None


class SweepRequest(BaseModel):
    kernel: KernelModel
    p_grid: list[float] = Field(min_length=1)
    q_grid: list[float] = Field(min_length=1)
    battery: str = "standard-v1"
    seed: int  # deliberately no default: reproducibility is opt-in by value
    workers: int = 1
    which: Literal["paper", "reference"] = "reference"
    pad_factor: int | None = None
    grid: GridModel | None = None


def _finite_or_none(x: float) -> float | None:
    # strict JSON has no nan/inf; the CSV text keeps the literal "nan"
    return x if np.isfinite(x) else None


def _grid_payload(f: GridFunction) -> dict:
    return {
        "spec": {
            "n": f.spec.n,
            "half_width": f.spec.half_width,
            "points_per_axis": f.spec.points_per_axis,
        },
        "label": f.label,
        "samples": f.samples.reshape(-1).tolist(),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="sphconv", version=__version__)

    @app.exception_handler(SphconvError)
    async def _domain_error(request, exc):
        return JSONResponse(
            status_code=422,
            content={"kind": type(exc).__name__, "message": str(exc)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "service": "sphconv", "version": __version__}

    @app.post("/bessel/check")
    def bessel_check(req: BesselCheckRequest):
        result = run_bessel_check(BesselCheckSettings(
            orders=tuple(req.orders), t_max=req.t_max,
            samples=req.samples, tolerance=req.tolerance,
        ))
        return {
            "passed": result.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in result.checks
            ],
            "rows": [
                {"a": r.a, "constant": r.constant, "t_max": r.t_max,
                 "samples": r.samples}
                for r in result.rows
            ],
            "csv": result.csv_text,
        }

    @app.post("/fourier/check")
    def fourier_check(req: FourierCheckRequest):
        result = run_fourier_check(
            FourierCheckSettings(
                alphas=tuple(req.alphas), s_values=tuple(req.s_values),
                parse=req.parse, tolerance=req.tolerance,
            ),
            quadrature=req.quadrature.build() if req.quadrature else None,
        )
        return {
            "passed": result.passed,
            "winner": result.winner,
            "calibration": result.calibration,
            "constant_paper": result.constant_paper,
            "constant_reference": result.constant_reference,
            "spread_paper": result.spread_paper,
            "spread_reference": result.spread_reference,
            "rows": [
                {"alpha": r.alpha, "s": r.s, "oracle": r.oracle,
                 "m_paper": r.m_paper, "m_reference": r.m_reference,
                 "ratio_paper": r.ratio_paper,
                 "ratio_reference": r.ratio_reference}
                for r in result.rows
            ],
            "csv": result.csv_text,
            "calibration_text": result.calibration_text,
        }

    @app.post("/operator/apply")
    def operator_apply(req: ApplyRequest):
        kernel = req.kernel.build()
        grid = req.grid.build(kernel.n) if req.grid else None
        operand = None
        if req.samples is not None:
            if grid is None:
                raise SphconvError("raw samples require an explicit grid")
            shape = (grid.points_per_axis,) * grid.n
            operand = GridFunction(
                grid, np.asarray(req.samples, dtype=float).reshape(shape),
                label=req.label,
            )
        settings = ApplySettings(
            kind=req.kind, scale=req.scale, frequency=req.frequency,
            which=req.which, pad_factor=req.pad_factor, direct=req.direct,
            calibration=req.calibration,
        )
        result = run_apply(
            kernel, settings, grid=grid,
            quadrature=req.quadrature.build() if req.quadrature else None,
            operand=operand,
        )
        diag = result.diagnostics
        return {
            "operand": _grid_payload(result.operand),
            "spectral": _grid_payload(result.spectral),
            "direct": _grid_payload(result.direct) if result.direct else None,
            "discrepancy": result.discrepancy,
            "diagnostics": {
                "pad_factor": diag.pad_factor,
                "wrap_bound": diag.wrap_bound,
                "nyquist_fraction": diag.nyquist_fraction,
                "imag_residue": diag.imag_residue,
                "multiplier_max": diag.multiplier_max,
            },
            "warnings": result.warnings,
        }

    @app.post("/sweep")
    def sweep(req: SweepRequest):
        kernel = req.kernel.build()
        settings = SweepSettings(
            p_grid=tuple(req.p_grid), q_grid=tuple(req.q_grid),
            battery=req.battery, which=req.which, pad_factor=req.pad_factor,
        )
        result = run_sweep(
            kernel, settings, seed=req.seed,
            grid=req.grid.build(kernel.n) if req.grid else None,
            workers=req.workers,
        )
        return {
            "rows": [
                {
                    "n": pt.n, "alpha": pt.alpha, "p": pt.p, "q": pt.q,
                    "verdicts": pt.verdicts,
                    "a_needed": _finite_or_none(pt.a_needed),
                    "max_ratio": _finite_or_none(pt.max_ratio),
                    "argmax": pt.argmax,
                    "battery_size": pt.battery_size, "seed": pt.seed,
                    "error": pt.error,
                }
                for pt in result.points
            ],
            "csv": result.csv_text,
            "n_errors": result.n_errors,
            "warnings": result.warnings,
        }

    return app
