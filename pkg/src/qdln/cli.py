"""Command-line entry point: ``qdln validate | run | list``.

Exit codes: 0 success, 1 runtime error, 2 invalid configuration,
3 partial result (some simulation did not converge).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import platform
import sys
import tempfile
import time
from importlib import metadata, resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__

log = logging.getLogger("qdln")

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_PARTIAL = 0, 1, 2, 3
OUT_ENV = "QDLN_OUT"
DEFAULT_OUT = "qdln_out"


class ConfigError(Exception):
    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


def _registry():
    # deferred: importing the experiments pulls in the FDTD engine
    from .registry import EXPERIMENTS
    return EXPERIMENTS


def load_schema(name):
    text = resources.files("qdln").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def shipped_config(name):
    return resources.files("qdln").joinpath("configs", f"{name}.json")


def _path_str(path):
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _semantic_problems(cfg):
    """Cross-field checks the schema cannot express. No simulation is started."""
    from .experiments.common import Band, ExperimentError
    from .geometry import DEVICE_DEFAULTS, GeometryError, check_device_params

    p = cfg["params"]
    out = []
    if "band" in p:
        try:
            Band.from_dict(p["band"])
        except (ExperimentError, TypeError) as e:
            out.append(f"params.band: {e}")
    lengths = p.get("lengths")
    if lengths and any(b <= a for a, b in zip(lengths, lengths[1:])):
        out.append("params.lengths: must be strictly increasing")
    geo = p.get("geometry")
    if geo is not None or cfg["experiment"] == "bragg_spectrum":
        q = dict(DEVICE_DEFAULTS)
        q.update({k: v for k, v in (geo or {}).items() if k in DEVICE_DEFAULTS})
        if "radius" in p:
            q["bragg_radius"] = p["radius"]
        if "period" in p and cfg["experiment"] == "bragg_spectrum":
            q["bragg_period"] = p["period"]
        try:
            check_device_params(q)
        except GeometryError as e:
            out.append(f"params.geometry: {e}")
    return out


def read_config(path):
    """Load and fully validate a config file. Raises :class:`ConfigError`."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError([f"cannot read {path}: {e.strerror or e}"]) from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"]) from None
    if not isinstance(cfg, dict) or "experiment" not in cfg:
        raise ConfigError(["<root>: config must be an object with an 'experiment' field"])
    reg = _registry()
    name = cfg["experiment"]
    if name not in reg:
        raise ConfigError([f"experiment: unknown experiment {name!r}; registered: {', '.join(reg)}"])
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(cfg), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    problems = [f"{_path_str(e.absolute_path)}: {e.message}" for e in errors]
    if not problems:
        problems = _semantic_problems(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


# --- output -----------------------------------------------------------------

def _clean(x):
    """JSON-safe copy: numpy scalars/arrays to Python, NaN/inf to null."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def atomic_write(path, data):
    """Write via a temp file in the same directory and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(data).hexdigest()


def _versions():
    from . import _core
    return {"qdln": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "jsonschema": metadata.version("jsonschema"), "kernel_backend": _core.BACKEND}


def effective_config(cfg, seed=None, threads=None, resolution_scale=None):
    out = json.loads(json.dumps(cfg))
    out.setdefault("schema_version", 1)
    out["seed"] = seed if seed is not None else out.get("seed", 0)
    out["threads"] = threads if threads is not None else out.get("threads", 1)
    out["resolution_scale"] = resolution_scale if resolution_scale is not None else out.get("resolution_scale", 1.0)
    return out


def execute(cfg, out_dir):
    """Run a validated config and write its artifacts. Returns the manifest."""
    exp = _registry()[cfg["experiment"]]
    ctx = {"seed": cfg["seed"], "threads": cfg["threads"], "resolution_scale": cfg["resolution_scale"]}
    t0 = time.perf_counter()
    outcome = exp.runner(cfg["params"], ctx)
    wall = time.perf_counter() - t0

    files = {}
    for name, (header, rows) in outcome.tables.items():
        files[name] = atomic_write(out_dir / name, csv_text(header, rows))
    for name, doc in outcome.extra_json.items():
        files[name] = atomic_write(out_dir / name, dumps(doc))
    summary = {"experiment": exp.name, "inputs": cfg["params"], "results": outcome.summary,
               "converged": outcome.converged, "unconverged": outcome.flags, "version": __version__}
    files["summary.json"] = atomic_write(out_dir / "summary.json", dumps(summary))

    canon = json.dumps(_clean(cfg), sort_keys=True, separators=(",", ":"))
    manifest = {
        "experiment": exp.name,
        "config": cfg,
        "config_sha256": hashlib.sha256(canon.encode()).hexdigest(),
        "versions": _versions(),
        "wall_time_s": wall,
        "status": "ok" if outcome.converged else "partial",
        "converged": outcome.converged,
        "unconverged": outcome.flags,
        "files": files,
    }
    atomic_write(out_dir / "manifest.json", dumps(manifest))
    return manifest


# --- commands ---------------------------------------------------------------

def _config_arg(args):
    path = args.config or args.config_pos
    if path is None:
        raise ConfigError(["no config given (use --config PATH)"])
    return path


def cmd_validate(args):
    try:
        cfg = read_config(_config_arg(args))
    except ConfigError as e:
        for p in e.problems:
            print(f"invalid: {p}", file=sys.stderr)
        return EXIT_INVALID
    print(f"ok: {cfg['experiment']}")
    return EXIT_OK


def cmd_run(args):
    try:
        cfg = read_config(_config_arg(args))
        cfg = effective_config(cfg, args.seed, args.threads, args.resolution_scale)
        if cfg["threads"] < 1 or not cfg["resolution_scale"] > 0:
            raise ConfigError(["--threads must be >= 1 and --resolution-scale > 0"])
    except ConfigError as e:
        for p in e.problems:
            print(f"invalid: {p}", file=sys.stderr)
        return EXIT_INVALID
    root = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    out_dir = root / cfg["experiment"]
    try:
        manifest = execute(cfg, out_dir)
    except Exception as e:  # surfaced with the raising module's name
        if args.verbose > 1:
            log.exception("run failed")
        print(f"error: {type(e).__module__}.{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{manifest['status']}: {cfg['experiment']} -> {out_dir}")
    if not manifest["converged"]:
        for f in manifest["unconverged"]:
            print(f"unconverged: {f}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_list(args):
    from .registry import list_experiments
    items = list_experiments()
    if args.json:
        print(json.dumps([{"name": n, "description": d} for n, d in items], indent=2))
    else:
        width = max(len(n) for n, _ in items)
        for n, d in items:
            print(f"{n:<{width}}  {d}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="qdln", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    ap.add_argument("--version", action="version", version=f"qdln {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config against its schema; runs nothing")
    p.add_argument("config_pos", nargs="?", metavar="CONFIG")
    p.add_argument("--config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run one experiment from a config")
    p.add_argument("config_pos", nargs="?", metavar="CONFIG")
    p.add_argument("--config")
    p.add_argument("--out", help=f"output root (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--threads", type=int, help="worker threads for sweep points")
    p.add_argument("--seed", type=int, help="seed override (photon statistics)")
    p.add_argument("--resolution-scale", type=float, help="grid refinement factor")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("list", help="registered experiments")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_list)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
