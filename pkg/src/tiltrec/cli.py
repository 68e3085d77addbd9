"""Command-line entry points chaining the stages of the workflow.

Subcommands map to pipeline stages: ``phantom`` rasterizes a fixture,
``project`` simulates the scan, ``recon`` runs the TV solver, ``tilt``
recovers boundary components, ``render`` draws overlays, and ``all`` chains
everything. Each stage writes its declared file formats plus a JSON sidecar
echoing the effective configuration; failures print a machine-readable
error JSON and exit with a stage-specific code.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import fileio
from .phantoms import FIXTURES, PhantomSpec, fixture, make_phantom
from .pipeline import TiltConfig, run_tilt
from .projection import ScanGeometry, Sinogram, add_noise, forward_project
from .tvreg import DivergenceError, TvConfig, reconstruct_tv

EXIT_CONFIG = 2
EXIT_MISSING_INPUT = 3
EXIT_BAD_SIDECAR = 4
EXIT_RUNTIME = 5


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


def _fail(code, kind, message):
    raise CliError(code, kind, message)


def _parse_angles(spec: str):
    try:
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        _fail(EXIT_CONFIG, "config", f"bad --angles {spec!r}, expected 'a:b:n'")
    if n < 1:
        _fail(EXIT_CONFIG, "config", "need at least one angle")
    return np.linspace(a, b, n)


def _load_config_file(path):
    """Flat key=value lines with # comments."""
    values = {}
    try:
        with open(path) as f:
            for ln, raw in enumerate(f, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    _fail(EXIT_CONFIG, "config", f"{path}:{ln}: expected key=value")
                key, val = (part.strip() for part in line.split("=", 1))
                values[key.replace("-", "_")] = val
    except OSError as exc:
        _fail(EXIT_MISSING_INPUT, "missing-input", f"cannot read config file: {exc}")
    return values


_DEFAULTS = {
    "fixture": "annulus",
    "size": 256,
    "angles": "-30:30:61",
    "noise": 0.03,
    "seed": 7,
    "alpha": 1.0,
    "iters": 500,
    "level": 7,
    "threshold": 0.09,
    "linelen": 9,
    "maskn": 64,
    "s0": 1.0,
    "step": 0.5,
    "smax": 20.0,
    "statement": "literal",
    "threads": 0,
}


def _build_parser():
    p = argparse.ArgumentParser(
        prog="tiltrec",
        description="Limited-angle tomography boundary recovery pipeline",
    )
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file; flags override")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--fixture", help=f"one of {sorted(FIXTURES)}")
    common.add_argument("--size", type=int)
    common.add_argument("--angles", help="a:b:n view angles in degrees")
    common.add_argument("--noise", type=float, help="relative noise level")
    common.add_argument("--seed", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--iters", type=int)
    common.add_argument("--level", type=int, help="subband grid is 2^level per side")
    common.add_argument("--threshold", type=float)
    common.add_argument("--linelen", type=int)
    common.add_argument("--maskn", type=int)
    common.add_argument("--s0", type=float)
    common.add_argument("--step", type=float)
    common.add_argument("--smax", type=float)
    common.add_argument("--statement", choices=["literal", "relaxed"])
    common.add_argument("--threads", type=int, help="cap worker threads (0 = default)")
    for name in ("phantom", "project", "recon", "tilt", "render", "all"):
        sub.add_parser(name, parents=[common])
    return p


def _effective_config(args) -> dict:
    cfg = dict(_DEFAULTS)
    if args.config:
        file_vals = _load_config_file(args.config)
        unknown = set(file_vals) - set(cfg)
        if unknown:
            _fail(EXIT_CONFIG, "config", f"unknown config keys: {sorted(unknown)}")
        for k, v in file_vals.items():
            kind = type(_DEFAULTS[k])
            try:
                cfg[k] = kind(v) if kind is not str else v
            except ValueError:
                _fail(EXIT_CONFIG, "config", f"bad value for {k}: {v!r}")
    for k in cfg:
        flag = getattr(args, k, None)
        if flag is not None:
            cfg[k] = flag
    if cfg["fixture"] not in FIXTURES:
        _fail(EXIT_CONFIG, "config", f"unknown fixture {cfg['fixture']!r}")
    if cfg["threads"]:
        os.environ.setdefault("NUMBA_NUM_THREADS", str(cfg["threads"]))
        os.environ.setdefault("OMP_NUM_THREADS", str(cfg["threads"]))
    return cfg


def _write_sidecar(path, cfg, extra=None):
    payload = {"config": cfg}
    if extra:
        payload.update(extra)
    with open(path, "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True)


def _geometry(cfg) -> ScanGeometry:
    return ScanGeometry.default(cfg["size"], _parse_angles(cfg["angles"]))


def _paths(cfg):
    out = cfg["out"]
    return {
        "phantom": os.path.join(out, "phantom.pgm"),
        "phantom_pfm": os.path.join(out, "phantom.pfm"),
        "sino": os.path.join(out, "sinogram.raw"),
        "recon": os.path.join(out, "reconstruction.pfm"),
        "recon_log": os.path.join(out, "reconstruction_log.json"),
        "report": os.path.join(out, "tilt_report.json"),
        "render": os.path.join(out, "overlay.png"),
    }


def cmd_phantom(cfg):
    paths = _paths(cfg)
    spec = fixture(cfg["fixture"], cfg["size"])
    img = make_phantom(spec)
    fileio.write_pgm(paths["phantom"], img.data > 0.5)
    fileio.write_pfm(paths["phantom_pfm"], img.data)
    _write_sidecar(paths["phantom"] + ".json", cfg)
    return img


def cmd_project(cfg, img=None):
    paths = _paths(cfg)
    if img is None:
        if not os.path.exists(paths["phantom_pfm"]):
            _fail(EXIT_MISSING_INPUT, "missing-input", f"{paths['phantom_pfm']} not found; run phantom first")
        from .phantoms import Image

        img = Image(fileio.read_pfm(paths["phantom_pfm"]), 1.0 / cfg["size"])
    geom = _geometry(cfg)
    sino = forward_project(img.data, geom)
    if cfg["noise"] > 0:
        sino = add_noise(sino, cfg["noise"], cfg["seed"])
    fileio.write_sinogram(paths["sino"], sino)
    return sino


def cmd_recon(cfg, sino=None):
    paths = _paths(cfg)
    if sino is None:
        if not os.path.exists(paths["sino"]):
            _fail(EXIT_MISSING_INPUT, "missing-input", f"{paths['sino']} not found; run project first")
        try:
            sino = fileio.read_sinogram(paths["sino"])
        except ValueError as exc:
            _fail(EXIT_BAD_SIDECAR, "bad-sidecar", str(exc))
    geom = sino.geometry
    tv = TvConfig(alpha=cfg["alpha"], iterations=cfg["iters"])
    try:
        rec, log = reconstruct_tv(sino, geom, tv)
    except DivergenceError as exc:
        _fail(EXIT_RUNTIME, "divergence", str(exc))
    fileio.write_pfm(paths["recon"], rec)
    _write_sidecar(paths["recon_log"], cfg, {"objective": {str(k): v for k, v in log.items()}})
    return rec


def _tilt_config(cfg) -> TiltConfig:
    try:
        return TiltConfig(
            level=cfg["level"],
            threshold=cfg["threshold"],
            line_length=cfg["linelen"],
            mask_n=cfg["maskn"],
            s0=cfg["s0"],
            step=cfg["step"],
            s_max=cfg["smax"],
            statement_mode=cfg["statement"],
        )
    except ValueError as exc:
        _fail(EXIT_CONFIG, "config", str(exc))


def cmd_tilt(cfg, rec=None):
    paths = _paths(cfg)
    if rec is None:
        if not os.path.exists(paths["recon"]):
            _fail(EXIT_MISSING_INPUT, "missing-input", f"{paths['recon']} not found; run recon first")
        rec = fileio.read_pfm(paths["recon"])
    report = run_tilt(rec, _tilt_config(cfg))
    payload = report.to_json_dict()
    payload["config"].update({k: cfg[k] for k in ("fixture", "size", "angles", "noise", "seed", "alpha", "iters")})
    with open(paths["report"], "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
    return report


def cmd_render(cfg, rec=None, report_payload=None):
    paths = _paths(cfg)
    if rec is None:
        if not os.path.exists(paths["recon"]):
            _fail(EXIT_MISSING_INPUT, "missing-input", f"{paths['recon']} not found")
        rec = fileio.read_pfm(paths["recon"])
    if report_payload is None:
        if not os.path.exists(paths["report"]):
            _fail(EXIT_MISSING_INPUT, "missing-input", f"{paths['report']} not found")
        with open(paths["report"]) as f:
            report_payload = json.load(f)

    from matplotlib.image import imsave
    from scipy.ndimage import zoom

    from .cubical import rle_decode

    n = rec.shape[0]
    base = np.clip(rec / max(rec.max(), 1e-9), 0.0, 1.0)
    rgb = np.stack([base, base, base], axis=2)
    m = report_payload["subband_size"]
    scale = n // m
    for comp in report_payload["components"]:
        proj = rle_decode(comp["projection_rle"], (m, m))
        up = zoom(proj.astype(float), scale, order=0) > 0.5
        rgb[up, 0] = np.minimum(rgb[up, 0] * 0.4 + 0.6, 1.0)  # translucent red
        rgb[up, 1] *= 0.4
        rgb[up, 2] *= 0.4
    for comp in report_payload["components"]:
        if comp.get("curve"):
            for x, y in comp["curve"]:
                i, j = int(round(x)), int(round(y))
                if 0 <= i < n and 0 <= j < n:
                    rgb[i, j] = (0.1, 0.9, 0.1)  # spline in green
    imsave(paths["render"], rgb)
    return paths["render"]


def cmd_all(cfg):
    img = cmd_phantom(cfg)
    sino = cmd_project(cfg, img=img)
    rec = cmd_recon(cfg, sino=sino)
    report = cmd_tilt(cfg, rec=rec)
    with open(_paths(cfg)["report"]) as f:
        payload = json.load(f)
    cmd_render(cfg, rec=rec, report_payload=payload)
    return report


_COMMANDS = {
    "phantom": cmd_phantom,
    "project": cmd_project,
    "recon": cmd_recon,
    "tilt": cmd_tilt,
    "render": cmd_render,
    "all": cmd_all,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _effective_config(args)
        cfg["out"] = args.out
        os.makedirs(cfg["out"], exist_ok=True)
        t0 = time.perf_counter()
        _COMMANDS[args.command](cfg)
        print(f"{args.command}: ok ({time.perf_counter() - t0:.1f}s) -> {cfg['out']}")
        return 0
    except CliError as exc:
        print(json.dumps({"error_code": exc.code, "kind": exc.kind, "message": str(exc)}))
        return exc.code
    except ValueError as exc:
        print(json.dumps({"error_code": EXIT_CONFIG, "kind": "config", "message": str(exc)}))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
