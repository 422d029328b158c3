"""Named parameter sets for the figure and example functions."""
from __future__ import annotations

import math

from .mv import build_slit_domain, example2_stage, solve_parameters
from .zoo import ClosedFormMV0, Cosine, CosSqrt, ExpAffine, MVNumeric

FIG2B_A = 4j / (1 - math.cosh(4))
FIG2B_B = 4j - FIG2B_A
THRESHOLD_REFERENCE = 2.7981186


def fig2b():
    return Cosine(FIG2B_A, FIG2B_B, "fig2b")


def mv_g0():
    comb = solve_parameters(build_slit_domain({-1: -1.0, 1: -1.0}))
    return MVNumeric(comb, "mv-g0")


def mv_example2(N1: int = 5, N2: int = 25):
    f = example2_stage((1, N1, N2))
    return MVNumeric(f.comb, f"mv-example2({N1},{N2})")


# name -> (builder, viewport center, viewport width)
PRESETS = {
    "fig1a": (lambda: ExpAffine(2 + 0.5j * math.pi, "fig1a"), 1 + 4j, 16.0),
    "fig1b": (lambda: ClosedFormMV0("fig1b"), 0j, 8.0),
    "fig2a": (lambda: Cosine.symmetric(0.75, "fig2a"), 0j, 10.0),
    "fig2b": (fig2b, 2j, 10.0),
    "fig2c": (lambda: Cosine.symmetric(4 * math.pi / 3, "fig2c"), 0j, 12.0),
    "fig2d": (lambda: Cosine.symmetric(2.0, "fig2d"), 0j, 8.0),
    "cossqrt": (lambda u=3.0: CosSqrt(u, f"cossqrt({u:g})"), 0.5 + 0j, 6.0),
    "mv-g0": (mv_g0, 0j, 8.0),
    "mv-example2": (mv_example2, 0j, 8.0),
}
FUNCTION_PRESETS = tuple(PRESETS)
TASK_PRESETS = ("cossqrt-threshold",)


def preset_function(name: str, **params):
    builder = PRESETS[name][0]
    return builder(**params)


def preset_config(name: str) -> dict:
    """Fully explicit config fragment for a preset (function left to the builder)."""
    if name in TASK_PRESETS:
        return {"preset": name, "command": "verify", "rows": [name]}
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS) + list(TASK_PRESETS)}")
    _, center, width = PRESETS[name]
    return {"preset": name, "viewport": {"center": [center.real, center.imag], "width": width}}
