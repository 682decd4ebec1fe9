"""Declarative run configuration: one INI file, flag overrides win.

Every field is parsed and validated here, before any computation starts;
failures carry the ``[section] key`` path.  The FIELDS table is the single
source for the help text, so the CLI's field enumeration can be checked
against it.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError
from .kernel import KernelParams, QuadratureConfig
from .operators import GridSpec

DEFAULT_P_GRID = (1.05, 1.2, 4.0 / 3.0, 1.5, 1.6, 1.75, 1.9, 2.0)
DEFAULT_Q_GRID = (2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0)

# (field path, validation rule) - rendered verbatim in --help
FIELDS = [
    ("kernel.alpha", "positive finite real"),
    ("kernel.n", "integer in {1, 2, 3}"),
    ("grid.half_width", "real > 2"),
    ("grid.points_per_axis", "positive power of two with 2L/N < 0.25"),
    ("quadrature.jacobi_order", "integer >= 1"),
    ("quadrature.panel_count", "integer >= 1"),
    ("quadrature.truncation_radius", "real > 2"),
    ("quadrature.tail_tol", "real in (0, 1e-2]"),
    ("bessel.orders", "comma list of reals, |a| <= 50, no negative integers"),
    ("bessel.t_max", "real > 1"),
    ("bessel.samples", "integer >= 1000"),
    ("bessel.tolerance", "real > 0"),
    ("fourier.alphas", "comma list of reals in (1/2, 1)"),
    ("fourier.s_values", "comma list of reals > 0"),
    ("fourier.parse", "standard | misparsed"),
    ("fourier.tolerance", "real > 0"),
    ("apply.kind", "gaussian | sphere_bump | modulated_bump | dilate"),
    ("apply.scale", "real > 0"),
    ("apply.frequency", "real >= 0"),
    ("apply.which", "paper | reference"),
    ("apply.pad_factor", "empty or integer >= 1"),
    ("apply.direct", "true | false"),
    ("apply.calibration", "nonzero finite real"),
    ("apply.input", "empty or path to an SCNV1 grid file"),
    ("sweep.p_grid", "comma list of reals >= 1"),
    ("sweep.q_grid", "comma list of reals >= 1"),
    ("sweep.battery", "standard-v1 | smoke-v1"),
    ("sweep.which", "paper | reference"),
    ("sweep.pad_factor", "empty or integer >= 1"),
    ("run.out", "output directory"),
    ("run.workers", "integer >= 1"),
    ("run.seed", "unsigned 64-bit integer; required by sweep"),
]

_KNOWN = {}
for _path, _rule in FIELDS:
    _sect, _key = _path.split(".")
    _KNOWN.setdefault(_sect, set()).add(_key)


@dataclass(frozen=True)
class BesselCheckSettings:
    orders: tuple = (-0.5, 0.0, 0.5, 1.0, 2.0)
    t_max: float = 1000.0
    samples: int = 100000
    tolerance: float = 1e-10


@dataclass(frozen=True)
class FourierCheckSettings:
    alphas: tuple = (0.6, 0.75, 0.9)
    s_values: tuple = (0.5, 1.0, 2.0, 5.0)
    parse: str = "standard"
    tolerance: float = 1e-3


@dataclass(frozen=True)
class ApplySettings:
    kind: str = "gaussian"
    scale: float = 2.0
    frequency: float = 0.0
    which: str = "reference"
    pad_factor: int | None = None
    direct: bool = False
    calibration: float = 1.0
    input_path: str | None = None


@dataclass(frozen=True)
class SweepSettings:
    p_grid: tuple = DEFAULT_P_GRID
    q_grid: tuple = DEFAULT_Q_GRID
    battery: str = "standard-v1"
    which: str = "reference"
    pad_factor: int | None = None


@dataclass(frozen=True)
class RunConfig:
    kernel: KernelParams = field(default_factory=lambda: KernelParams(0.75, 1))
    grid: GridSpec | None = None
    quadrature: QuadratureConfig | None = None
    bessel: BesselCheckSettings = field(default_factory=BesselCheckSettings)
    fourier: FourierCheckSettings = field(default_factory=FourierCheckSettings)
    apply: ApplySettings = field(default_factory=ApplySettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    out: str = "."
    workers: int = 1
    seed: int | None = None


def default_apply_grid(n: int) -> GridSpec:
    if n == 1:
        return GridSpec(1, 64.0, 4096)
    if n == 2:
        return GridSpec(2, 16.0, 512)
    return GridSpec(3, 8.0, 128)


def _fail(path: str, detail: str):
    raise ConfigError(f"[{path.replace('.', '] ', 1)}: {detail}")


def _parse_float(path: str, raw: str, lo=None, hi=None, lo_open=True) -> float:
    try:
        val = float(raw)
    except ValueError:
        _fail(path, f"not a number: {raw!r}")
    if not math.isfinite(val):
        _fail(path, f"must be finite, got {raw!r}")
    if lo is not None and (val <= lo if lo_open else val < lo):
        _fail(path, f"must be {'>' if lo_open else '>='} {lo:g}, got {val:g}")
    if hi is not None and val > hi:
        _fail(path, f"must be <= {hi:g}, got {val:g}")
    return val


def _parse_int(path: str, raw: str, lo=None, hi=None) -> int:
    try:
        val = int(raw, 0)
    except ValueError:
        _fail(path, f"not an integer: {raw!r}")
    if lo is not None and val < lo:
        _fail(path, f"must be >= {lo}, got {val}")
    if hi is not None and val > hi:
        _fail(path, f"must be <= {hi}, got {val}")
    return val


def _parse_list(path: str, raw: str) -> tuple:
    items = [chunk.strip() for chunk in raw.split(",") if chunk.strip()]
    if not items:
        _fail(path, "empty list")
    out = []
    for chunk in items:
        try:
            out.append(float(chunk))
        except ValueError:
            _fail(path, f"not a number: {chunk!r}")
    return tuple(out)


def _parse_choice(path: str, raw: str, choices: tuple) -> str:
    if raw not in choices:
        _fail(path, f"must be one of {', '.join(choices)}; got {raw!r}")
    return raw


def _parse_bool(path: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    _fail(path, f"must be true or false, got {raw!r}")


def _parse_optional_int(path: str, raw: str, lo: int) -> int | None:
    if raw.strip() == "":
        return None
    return _parse_int(path, raw, lo=lo)


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Read the INI file (if any), apply flag overrides, validate everything.

    ``overrides`` maps dotted field paths to raw strings; they replace file
    values before parsing so both sources face identical validation.
    Unknown sections or keys are rejected rather than ignored.
    """
    values: dict[tuple[str, str], str] = {}
    if path is not None:
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        for section in parser.sections():
            if section not in _KNOWN:
                raise ConfigError(f"[{section}]: unknown section")
            for key, raw in parser.items(section):
                if key not in _KNOWN[section]:
                    raise ConfigError(f"[{section}] {key}: unknown field")
                values[(section, key)] = raw
    for dotted, raw in (overrides or {}).items():
        section, key = dotted.split(".", 1)
        if section not in _KNOWN or key not in _KNOWN[section]:
            raise ConfigError(f"[{section}] {key}: unknown field")
        values[(section, key)] = str(raw)

    def get(section: str, key: str) -> str | None:
        return values.get((section, key))

    def has(section: str) -> bool:
        return any(sect == section for sect, _ in values)

    defaults = RunConfig()

    raw = get("kernel", "alpha")
    alpha = _parse_float("kernel.alpha", raw, lo=0.0) if raw is not None else 0.75
    raw = get("kernel", "n")
    n = _parse_int("kernel.n", raw, lo=1, hi=3) if raw is not None else 1
    try:
        kernel = KernelParams(alpha, n)
    except DomainError as exc:
        raise ConfigError(f"[kernel]: {exc}") from None

    grid = None
    if has("grid"):
        raw = get("grid", "half_width")
        half = _parse_float("grid.half_width", raw, lo=2.0) if raw is not None else 64.0
        raw = get("grid", "points_per_axis")
        npts = (
            _parse_int("grid.points_per_axis", raw, lo=2)
            if raw is not None
            else 4096
        )
        try:
            grid = GridSpec(n, half, npts)
        except DomainError as exc:
            raise ConfigError(f"[grid]: {exc}") from None

    quad_kwargs = {}
    raw = get("quadrature", "jacobi_order")
    if raw is not None:
        quad_kwargs["jacobi_order"] = _parse_int("quadrature.jacobi_order", raw, lo=1)
    raw = get("quadrature", "panel_count")
    if raw is not None:
        quad_kwargs["panel_count"] = _parse_int("quadrature.panel_count", raw, lo=1)
    raw = get("quadrature", "truncation_radius")
    if raw is not None:
        quad_kwargs["truncation_radius"] = _parse_float(
            "quadrature.truncation_radius", raw, lo=2.0
        )
    raw = get("quadrature", "tail_tol")
    if raw is not None:
        quad_kwargs["tail_tol"] = _parse_float(
            "quadrature.tail_tol", raw, lo=0.0, hi=1e-2
        )
    try:
        # None means "each consumer picks its own default": the ratio oracle
        # and the direct convolution ship different tunings
        quadrature = QuadratureConfig(**quad_kwargs) if quad_kwargs else None
    except DomainError as exc:
        raise ConfigError(f"[quadrature]: {exc}") from None

    raw = get("bessel", "orders")
    orders = (
        _parse_list("bessel.orders", raw) if raw is not None else defaults.bessel.orders
    )
    raw = get("bessel", "t_max")
    b_tmax = (
        _parse_float("bessel.t_max", raw, lo=1.0)
        if raw is not None
        else defaults.bessel.t_max
    )
    raw = get("bessel", "samples")
    b_samples = (
        _parse_int("bessel.samples", raw, lo=1000)
        if raw is not None
        else defaults.bessel.samples
    )
    raw = get("bessel", "tolerance")
    b_tol = (
        _parse_float("bessel.tolerance", raw, lo=0.0)
        if raw is not None
        else defaults.bessel.tolerance
    )
    bessel = BesselCheckSettings(orders, b_tmax, b_samples, b_tol)

    raw = get("fourier", "alphas")
    alphas = (
        _parse_list("fourier.alphas", raw)
        if raw is not None
        else defaults.fourier.alphas
    )
    for a in alphas:
        if not 0.5 < a < 1.0:
            _fail("fourier.alphas", f"oracle window is (1/2, 1); got {a:g}")
    raw = get("fourier", "s_values")
    s_values = (
        _parse_list("fourier.s_values", raw)
        if raw is not None
        else defaults.fourier.s_values
    )
    for s in s_values:
        if s <= 0.0:
            _fail("fourier.s_values", f"values must be > 0; got {s:g}")
    raw = get("fourier", "parse")
    parse = (
        _parse_choice("fourier.parse", raw, ("standard", "misparsed"))
        if raw is not None
        else "standard"
    )
    raw = get("fourier", "tolerance")
    f_tol = (
        _parse_float("fourier.tolerance", raw, lo=0.0)
        if raw is not None
        else defaults.fourier.tolerance
    )
    fourier = FourierCheckSettings(alphas, s_values, parse, f_tol)

    raw = get("apply", "kind")
    kind = (
        _parse_choice(
            "apply.kind", raw, ("gaussian", "sphere_bump", "modulated_bump", "dilate")
        )
        if raw is not None
        else "gaussian"
    )
    raw = get("apply", "scale")
    scale = _parse_float("apply.scale", raw, lo=0.0) if raw is not None else 2.0
    raw = get("apply", "frequency")
    frequency = (
        _parse_float("apply.frequency", raw, lo=0.0, lo_open=False)
        if raw is not None
        else 0.0
    )
    raw = get("apply", "which")
    a_which = (
        _parse_choice("apply.which", raw, ("paper", "reference"))
        if raw is not None
        else "reference"
    )
    raw = get("apply", "pad_factor")
    a_pad = _parse_optional_int("apply.pad_factor", raw, lo=1) if raw is not None else None
    raw = get("apply", "direct")
    direct = _parse_bool("apply.direct", raw) if raw is not None else False
    raw = get("apply", "calibration")
    calibration = _parse_float("apply.calibration", raw) if raw is not None else 1.0
    if calibration == 0.0:
        _fail("apply.calibration", "must be nonzero")
    raw = get("apply", "input")
    input_path = raw if raw else None
    apply_settings = ApplySettings(
        kind, scale, frequency, a_which, a_pad, direct, calibration, input_path
    )

    raw = get("sweep", "p_grid")
    p_grid = _parse_list("sweep.p_grid", raw) if raw is not None else DEFAULT_P_GRID
    raw = get("sweep", "q_grid")
    q_grid = _parse_list("sweep.q_grid", raw) if raw is not None else DEFAULT_Q_GRID
    for name, grid_vals in (("sweep.p_grid", p_grid), ("sweep.q_grid", q_grid)):
        for v in grid_vals:
            if v < 1.0:
                _fail(name, f"exponents must be >= 1; got {v:g}")
    raw = get("sweep", "battery")
    battery = (
        _parse_choice("sweep.battery", raw, ("standard-v1", "smoke-v1"))
        if raw is not None
        else "standard-v1"
    )
    raw = get("sweep", "which")
    s_which = (
        _parse_choice("sweep.which", raw, ("paper", "reference"))
        if raw is not None
        else "reference"
    )
    raw = get("sweep", "pad_factor")
    s_pad = _parse_optional_int("sweep.pad_factor", raw, lo=1) if raw is not None else None
    sweep = SweepSettings(p_grid, q_grid, battery, s_which, s_pad)

    raw = get("run", "out")
    out = raw if raw else "."
    raw = get("run", "workers")
    workers = _parse_int("run.workers", raw, lo=1) if raw is not None else 1
    raw = get("run", "seed")
    seed = (
        _parse_int("run.seed", raw, lo=0, hi=2**64 - 1) if raw not in (None, "") else None
    )

    return RunConfig(
        kernel=kernel,
        grid=grid,
        quadrature=quadrature,
        bessel=bessel,
        fourier=fourier,
        apply=apply_settings,
        sweep=sweep,
        out=out,
        workers=workers,
        seed=seed,
    )
