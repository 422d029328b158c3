"""entiredyn command line.

    entiredyn render --preset fig2d --out out/
    entiredyn hyperbolic --preset fig1a
    entiredyn verify cossqrt-threshold
    entiredyn mv-solve --spec spec.json --out map.json
    entiredyn --preset fig2d            # image + hyperbolicity + audit

Exit status: 0 success, 1 failure or hard error, 2 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import audit as _audit
from .dynamics import ESCAPE_RADIUS, hyperbolicity_report
from .errors import EntireDynError
from .mv import SlitDomainSpec, solve_parameters
from .presets import PRESETS, TASK_PRESETS, preset_config, preset_function
from .render import Palette, Viewport, classify_grid, render, write_image
from .verification import FAIL, ROWS, UNKNOWN, run_rows
from .zoo import comb_singular_set, function_from_json

log = logging.getLogger("entiredyn")

COMMANDS = ("run", "render", "classify", "hyperbolic", "audit", "mv-solve", "verify")
EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN = 0, 1, 2


@dataclass
class RunConfig:
    command: str = "run"
    preset: str | None = None
    function: dict | None = None
    preset_params: dict = field(default_factory=dict)
    center: complex = 0j
    width: float = 8.0
    resolution: tuple = (800, 800)
    max_iter: int = 1000
    escape_radius: float = ESCAPE_RADIUS
    out: str = "."
    threads: int | None = None
    tile: int = 64
    palette: dict | None = None
    png: bool = False
    spec: str | None = None
    map_out: str | None = None
    rows: list = field(default_factory=list)

    def build_function(self):
        if self.function is not None:
            return function_from_json(self.function)
        if self.preset in PRESETS:
            return preset_function(self.preset, **self.preset_params)
        raise ValueError("no function: give --preset or a config with a 'function' entry")

    @property
    def viewport(self) -> Viewport:
        nx, ny = self.resolution
        return Viewport(self.center, self.width, nx, ny)

    @property
    def stem(self) -> str:
        if self.preset:
            return self.preset
        return (self.function or {}).get("label") or (self.function or {}).get("family", "function")


def _load_file(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            raise ValueError("TOML configs need Python 3.11+; use JSON") from None
        return tomllib.loads(raw.decode())
    return json.loads(raw)


def _apply(cfg: RunConfig, obj: dict):
    """Merge a config fragment (preset or file) into cfg."""
    for key in ("command", "preset", "function", "out", "threads", "tile", "palette", "png", "spec", "rows"):
        if key in obj:
            setattr(cfg, key, obj[key])
    if "params" in obj:
        cfg.preset_params = dict(obj["params"])
    vp = obj.get("viewport", {})
    if "center" in vp:
        c = vp["center"]
        cfg.center = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
    if "width" in vp:
        cfg.width = float(vp["width"])
    if "resolution" in vp:
        cfg.resolution = tuple(int(v) for v in vp["resolution"])
    budgets = obj.get("budgets", {})
    if "max_iter" in budgets:
        cfg.max_iter = int(budgets["max_iter"])
    if "escape_radius" in budgets:
        cfg.escape_radius = float(budgets["escape_radius"])
    if "resolution" in budgets:
        cfg.resolution = tuple(int(v) for v in budgets["resolution"])


def _resolution(text):
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="entiredyn", description=__doc__.split("\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("command", nargs="?", choices=COMMANDS, default=None)
    p.add_argument("rows", nargs="*", help="verify: rows or task presets to run (default all)")
    p.add_argument("--config", help="JSON (or TOML) run configuration")
    p.add_argument("--preset", help="one of " + ", ".join(list(PRESETS) + list(TASK_PRESETS)))
    p.add_argument("--out", help="output directory (mv-solve: output file)")
    p.add_argument("--threads", type=int)
    p.add_argument("--tile", type=int, help="tile edge in pixels for parallel classification")
    p.add_argument("--resolution", type=_resolution, help="WxH")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--escape-radius", type=float)
    p.add_argument("--center", type=complex, help="viewport centre, e.g. 0.5+1j")
    p.add_argument("--width", type=float, help="viewport width")
    p.add_argument("--u", type=float, help="parameter of the cossqrt preset")
    p.add_argument("--N", type=int, nargs=2, metavar=("N1", "N2"), help="mv-example2 indices")
    p.add_argument("--spec", help="mv-solve: slit-domain spec JSON")
    p.add_argument("--png", action="store_true", help="also write PNG images (needs Pillow)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    file_obj = _load_file(args.config) if args.config else {}
    preset = args.preset or file_obj.get("preset")
    if preset:
        _apply(cfg, preset_config(preset))
    _apply(cfg, file_obj)
    if args.preset:
        cfg.preset = args.preset
    if args.command:
        cfg.command = args.command
    elif preset in TASK_PRESETS:
        cfg.command = "verify"
    if args.rows:
        cfg.rows = list(args.rows)
    if args.out is not None:
        if cfg.command == "mv-solve":
            cfg.map_out = args.out
        else:
            cfg.out = args.out
    for name in ("threads", "tile", "max_iter", "escape_radius", "center", "width", "resolution", "spec"):
        val = getattr(args, name)
        if val is not None:
            setattr(cfg, name, val)
    if args.png:
        cfg.png = True
    if args.u is not None:
        cfg.preset_params["u"] = args.u
    if args.N is not None:
        cfg.preset_params.update(N1=args.N[0], N2=args.N[1])
    return cfg


def _dump(obj, path):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %s", path)


def _grid(cfg, f, cycles):
    return classify_grid(f, cycles, cfg.viewport, cfg.max_iter, cfg.escape_radius,
                         threads=cfg.threads, tile=cfg.tile)


def cmd_render(cfg, f, rep=None):
    rep = rep or hyperbolicity_report(f)
    grid = _grid(cfg, f, rep.cycles)
    palette = Palette.from_json(cfg.palette) if cfg.palette else Palette()
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, cfg.stem + ".ppm")
    write_image(render(grid, palette), path, png=cfg.png)
    _dump(grid.survey_json(), os.path.join(cfg.out, cfg.stem + ".components.json"))
    print(f"{path}: {cfg.resolution[0]}x{cfg.resolution[1]}, {len(grid.components)} components")
    return EXIT_OK


def cmd_classify(cfg, f):
    rep = hyperbolicity_report(f)
    grid = _grid(cfg, f, rep.cycles)
    out = grid.survey_json()
    out["function"] = f.to_json()
    out["basin_fractions"] = {str(k): v for k, v in sorted(grid.basin_fractions().items())}
    out["undecided_pixels"] = int((grid.status == 0).sum())
    out["max_iter"] = cfg.max_iter
    out["escape_radius"] = cfg.escape_radius
    _dump(out, os.path.join(cfg.out, cfg.stem + ".classify.json"))
    print(json.dumps(out["basin_fractions"], sort_keys=True))
    return EXIT_OK


def _verdict_code(value):
    return EXIT_OK if value is True else EXIT_FAIL if value is False else EXIT_UNKNOWN


def cmd_hyperbolic(cfg, f):
    rep = hyperbolicity_report(f, max_iter=max(cfg.max_iter, 10_000), escape_radius=cfg.escape_radius)
    obj = rep.to_json()
    obj["function"] = f.to_json()
    _dump(obj, os.path.join(cfg.out, cfg.stem + ".hyperbolic.json"))
    periods = [c.period for c in rep.cycles]
    print(f"hyperbolic: {rep.hyperbolic}; attracting cycles of period {periods}")
    return _verdict_code(rep.hyperbolic)


def cmd_audit(cfg, f):
    rep = _audit.audit(f, max_iter=cfg.max_iter, escape_radius=cfg.escape_radius, threads=cfg.threads)
    _dump(rep.to_json(), os.path.join(cfg.out, cfg.stem + ".audit.json"))
    for k, v in rep.predicted.items():
        print(f"{k}: {v}")
    return EXIT_OK if rep.hyperbolic is True else EXIT_UNKNOWN


def cmd_run(cfg, f):
    """Default preset pipeline: image, hyperbolicity report and audit."""
    rep = hyperbolicity_report(f, max_iter=10_000, escape_radius=cfg.escape_radius)
    obj = rep.to_json()
    obj["function"] = f.to_json()
    _dump(obj, os.path.join(cfg.out, cfg.stem + ".hyperbolic.json"))
    print(f"hyperbolic: {rep.hyperbolic}; attracting cycles of period {[c.period for c in rep.cycles]}")
    cmd_render(cfg, f, rep)
    return cmd_audit(cfg, f)


def cmd_mv_solve(cfg):
    if not cfg.spec:
        raise ValueError("mv-solve needs --spec")
    spec = SlitDomainSpec.from_json(_load_file(cfg.spec))
    comb = solve_parameters(spec)
    out = cfg.map_out or os.path.join(cfg.out, "map.json")
    obj = comb.to_json()
    obj["singular_set"] = comb_singular_set(comb).to_json()
    _dump(obj, out)
    print(f"{out}: residual {comb.residual:.2e}, {len(comb.poles)} returns, {len(comb.tips)} tips")
    return EXIT_OK


def cmd_verify(cfg):
    rows = cfg.rows or list(ROWS)
    results = run_rows(rows)
    for r in results:
        print(r.line())
    verdicts = {r.verdict for r in results}
    if FAIL in verdicts:
        return EXIT_FAIL
    if UNKNOWN in verdicts:
        return EXIT_UNKNOWN
    return EXIT_OK


def run(cfg: RunConfig) -> int:
    if cfg.command == "verify":
        return cmd_verify(cfg)
    if cfg.command == "mv-solve":
        return cmd_mv_solve(cfg)
    f = cfg.build_function()
    handler = {"run": cmd_run, "render": cmd_render, "classify": cmd_classify,
               "hyperbolic": cmd_hyperbolic, "audit": cmd_audit}[cfg.command]
    return handler(cfg, f)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if cfg.command == "run" and not (cfg.preset or cfg.function):
            build_parser().print_help()
            return EXIT_FAIL
        return run(cfg)
    except (EntireDynError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
