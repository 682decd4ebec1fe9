"""Command-line front end.

Thin client over the HTTP service: every command POSTs to the app, either
in-process (default) or to a running instance via --server.  All file
output happens client-side, from the response payload, so local and remote
runs write identical bytes.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 numerical non-convergence, 4 I/O.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

import httpx
import numpy as np

from .config import FIELDS, RunConfig, load_config
from .errors import ConfigError, SphconvError
from .operators import GridFunction, GridSpec, grid_to_csv, read_grid, write_grid

_RULES = dict(FIELDS)

_EXIT_OK = 0
_EXIT_FAILED = 1
_EXIT_INVALID = 2
_EXIT_NONCONVERGED = 3
_EXIT_IO = 4

# 422 kinds that mean "the computation gave up", not "you asked wrong"
_NUMERIC_KINDS = ("ConvergenceError", "NumericalError")


def _epilog() -> str:
    lines = ["configuration fields (INI key or the matching flag; flags win):"]
    width = max(len(path) for path, _ in FIELDS)
    for path, rule in FIELDS:
        lines.append(f"  {path:<{width}}  {rule}")
    return "\n".join(lines)


def _field_arg(parser: argparse.ArgumentParser, flag: str, path: str, **kwargs):
    if kwargs.get("action") != "store_const":
        kwargs.setdefault("metavar", path.split(".", 1)[1].upper())
    parser.add_argument(flag, dest=path, help=f"{path}: {_RULES[path]}", **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphconv",
        description="Singular sphere-kernel convolution: checks, applies, sweeps.",
        epilog=_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", dest="config_path", metavar="PATH",
                        help="INI config file; flags override its values")
    common.add_argument("--server", metavar="URL",
                        help="POST to a running service instead of in-process")
    _field_arg(common, "--out", "run.out")
    _field_arg(common, "--workers", "run.workers")
    _field_arg(common, "--seed", "run.seed")

    kernel = argparse.ArgumentParser(add_help=False)
    _field_arg(kernel, "--alpha", "kernel.alpha")
    _field_arg(kernel, "--n", "kernel.n")
    _field_arg(kernel, "--half-width", "grid.half_width")
    _field_arg(kernel, "--points-per-axis", "grid.points_per_axis")

    quadrature = argparse.ArgumentParser(add_help=False)
    _field_arg(quadrature, "--jacobi-order", "quadrature.jacobi_order")
    _field_arg(quadrature, "--panel-count", "quadrature.panel_count")
    _field_arg(quadrature, "--truncation-radius", "quadrature.truncation_radius")
    _field_arg(quadrature, "--tail-tol", "quadrature.tail_tol")

    p = sub.add_parser("bessel-check", parents=[common],
                       help="run the oscillatory-kernel invariant suite and "
                            "envelope fits, write bessel_envelopes.csv")
    _field_arg(p, "--orders", "bessel.orders")
    _field_arg(p, "--t-max", "bessel.t_max")
    _field_arg(p, "--samples", "bessel.samples")
    _field_arg(p, "--tolerance", "bessel.tolerance")
    p.set_defaults(handler=cmd_bessel_check)

    p = sub.add_parser("fourier-check", parents=[common, quadrature],
                       help="compare both closed multiplier forms against the "
                            "quadrature oracle, write fourier_check.csv and "
                            "calibration.txt")
    _field_arg(p, "--alphas", "fourier.alphas")
    _field_arg(p, "--s-values", "fourier.s_values")
    _field_arg(p, "--parse", "fourier.parse")
    _field_arg(p, "--tolerance", "fourier.tolerance")
    p.set_defaults(handler=cmd_fourier_check)

    p = sub.add_parser("apply", parents=[common, kernel, quadrature],
                       help="apply the operator to a synthesized or loaded "
                            "grid function, write output.scnv/.csv")
    _field_arg(p, "--kind", "apply.kind")
    _field_arg(p, "--scale", "apply.scale")
    _field_arg(p, "--frequency", "apply.frequency")
    _field_arg(p, "--which", "apply.which")
    _field_arg(p, "--pad-factor", "apply.pad_factor")
    _field_arg(p, "--direct", "apply.direct", action="store_const",
               const="true", default=None)
    _field_arg(p, "--calibration", "apply.calibration")
    _field_arg(p, "--input", "apply.input", metavar="PATH")
    p.set_defaults(handler=cmd_apply)

    p = sub.add_parser("sweep", parents=[common, kernel],
                       help="measure norm ratios over a (p, q) grid, "
                            "write sweep.csv")
    _field_arg(p, "--p-grid", "sweep.p_grid")
    _field_arg(p, "--q-grid", "sweep.q_grid")
    _field_arg(p, "--battery", "sweep.battery")
    _field_arg(p, "--which", "sweep.which")
    _field_arg(p, "--pad-factor", "sweep.pad_factor")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("serve", parents=[common],
                       help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=None)

    return parser


def _flag_overrides(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if "." in k and v is not None}


def _make_client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    with warnings.catch_warnings():
        # this stack's testclient import warns about its own httpx pairing
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _post(client, path: str, payload: dict):
    """Returns (body, 0) on 200; (None, exit_code) with stderr diagnostics
    otherwise."""
    resp = client.post(path, json=payload)
    if resp.status_code == 200:
        return resp.json(), _EXIT_OK
    if resp.status_code == 422:
        body = resp.json()
        kind = body.get("kind", "ValidationError")
        message = body.get("message") or str(body.get("detail", body))
        print(f"{kind}: {message}", file=sys.stderr)
        code = _EXIT_NONCONVERGED if kind in _NUMERIC_KINDS else _EXIT_INVALID
        return None, code
    print(f"service error {resp.status_code}: {resp.text}", file=sys.stderr)
    return None, _EXIT_IO


def _write_text(cfg: RunConfig, name: str, text: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name)
    # newline="" keeps the response's own line endings byte-exact
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _kernel_payload(cfg: RunConfig) -> dict:
    return {"alpha": cfg.kernel.alpha, "n": cfg.kernel.n}


def _grid_payload(cfg: RunConfig) -> dict | None:
    if cfg.grid is None:
        return None
    return {"half_width": cfg.grid.half_width,
            "points_per_axis": cfg.grid.points_per_axis}


def _quadrature_payload(cfg: RunConfig) -> dict | None:
    if cfg.quadrature is None:
        return None
    q = cfg.quadrature
    return {"jacobi_order": q.jacobi_order, "panel_count": q.panel_count,
            "truncation_radius": q.truncation_radius, "tail_tol": q.tail_tol}


def _grid_from_payload(payload: dict) -> GridFunction:
    meta = payload["spec"]
    spec = GridSpec(meta["n"], meta["half_width"], meta["points_per_axis"])
    shape = (spec.points_per_axis,) * spec.n
    samples = np.asarray(payload["samples"], dtype=float).reshape(shape)
    return GridFunction(spec, samples, label=payload["label"])


def cmd_bessel_check(cfg: RunConfig, client, args) -> int:
    body, code = _post(client, "/bessel/check", {
        "orders": list(cfg.bessel.orders),
        "t_max": cfg.bessel.t_max,
        "samples": cfg.bessel.samples,
        "tolerance": cfg.bessel.tolerance,
    })
    if body is None:
        return code
    path = _write_text(cfg, "bessel_envelopes.csv", body["csv"])
    for check in body["checks"]:
        status = "ok" if check["passed"] else "FAIL"
        print(f"{status:4s} {check['name']}: {check['detail']}")
    print(f"wrote {path}")
    if not body["passed"]:
        failing = [c["name"] for c in body["checks"] if not c["passed"]]
        print(f"suite failed: {', '.join(failing)}", file=sys.stderr)
        return _EXIT_FAILED
    return _EXIT_OK


def cmd_fourier_check(cfg: RunConfig, client, args) -> int:
    payload = {
        "alphas": list(cfg.fourier.alphas),
        "s_values": list(cfg.fourier.s_values),
        "parse": cfg.fourier.parse,
        "tolerance": cfg.fourier.tolerance,
    }
    quad = _quadrature_payload(cfg)
    if quad is not None:
        payload["quadrature"] = quad
    body, code = _post(client, "/fourier/check", payload)
    if body is None:
        return code
    _write_text(cfg, "fourier_check.csv", body["csv"])
    path = _write_text(cfg, "calibration.txt", body["calibration_text"])
    print(body["calibration_text"], end="")
    print(f"wrote {path}")
    if not body["passed"]:
        print("no closed form tracks the oracle with an s-constant ratio",
              file=sys.stderr)
        return _EXIT_FAILED
    return _EXIT_OK


def cmd_apply(cfg: RunConfig, client, args) -> int:
    payload = {
        "kernel": _kernel_payload(cfg),
        "kind": cfg.apply.kind,
        "scale": cfg.apply.scale,
        "frequency": cfg.apply.frequency,
        "which": cfg.apply.which,
        "pad_factor": cfg.apply.pad_factor,
        "direct": cfg.apply.direct,
        "calibration": cfg.apply.calibration,
    }
    if cfg.apply.input_path is not None:
        operand = read_grid(cfg.apply.input_path)
        payload["grid"] = {"half_width": operand.spec.half_width,
                           "points_per_axis": operand.spec.points_per_axis}
        payload["samples"] = operand.samples.reshape(-1).tolist()
        payload["label"] = operand.label
    else:
        grid = _grid_payload(cfg)
        if grid is not None:
            payload["grid"] = grid
    quad = _quadrature_payload(cfg)
    if quad is not None:
        payload["quadrature"] = quad
    body, code = _post(client, "/operator/apply", payload)
    if body is None:
        return code
    for note in body["warnings"]:
        print(f"warning: {note}", file=sys.stderr)
    out_grid = _grid_from_payload(body["spectral"])
    write_grid(out_grid, _named(cfg, "output.scnv"))
    _write_text(cfg, "output.csv", grid_to_csv(out_grid))
    diag = body["diagnostics"]
    print(f"applied to {body['operand']['label']}: pad_factor={diag['pad_factor']}, "
          f"wrap_bound={diag['wrap_bound']:.3e}, "
          f"imag_residue={diag['imag_residue']:.3e}")
    if body["direct"] is not None:
        direct_grid = _grid_from_payload(body["direct"])
        write_grid(direct_grid, _named(cfg, "direct.scnv"))
        _write_text(cfg, "direct.csv", grid_to_csv(direct_grid))
        print(f"relative L2 discrepancy (spectral vs direct): "
              f"{body['discrepancy']:.6e}")
    print(f"wrote {_named(cfg, 'output.scnv')}")
    return _EXIT_OK


def _named(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def cmd_sweep(cfg: RunConfig, client, args) -> int:
    if cfg.seed is None:
        raise ConfigError("[run] seed: required for sweep (no silent "
                          "nondeterminism); pass --seed or set it in the file")
    payload = {
        "kernel": _kernel_payload(cfg),
        "p_grid": list(cfg.sweep.p_grid),
        "q_grid": list(cfg.sweep.q_grid),
        "battery": cfg.sweep.battery,
        "seed": cfg.seed,
        "workers": cfg.workers,
        "which": cfg.sweep.which,
        "pad_factor": cfg.sweep.pad_factor,
    }
    grid = _grid_payload(cfg)
    if grid is not None:
        payload["grid"] = grid
    body, code = _post(client, "/sweep", payload)
    if body is None:
        return code
    for note in body["warnings"]:
        print(f"warning: {note}", file=sys.stderr)
    path = _write_text(cfg, "sweep.csv", body["csv"])
    n_rows = len(body["rows"])
    print(f"wrote {path}: {n_rows} cells, {body['n_errors']} with errors")
    return _EXIT_OK


def cmd_serve(cfg: RunConfig, args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return _EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config_path, _flag_overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_INVALID
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return _EXIT_IO

    if args.command == "serve":
        return cmd_serve(cfg, args)

    try:
        client = _make_client(args.server)
    except httpx.HTTPError as exc:
        print(f"cannot reach {args.server}: {exc}", file=sys.stderr)
        return _EXIT_IO
    try:
        return args.handler(cfg, client, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_INVALID
    except SphconvError as exc:
        # client-side domain failures (e.g. a malformed --input file)
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_INVALID
    except httpx.HTTPError as exc:
        print(f"transport failure: {exc}", file=sys.stderr)
        return _EXIT_IO
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return _EXIT_IO
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
