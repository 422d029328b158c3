"""Three-valued evaluation of the boundedness / dichotomy / local-connectivity
criteria for hyperbolic maps, cross-checked against rendered grids.

Every prediction is True, False or None (unknown); None is never upgraded.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dynamics import ESCAPE_RADIUS, hyperbolicity_report
from .errors import BoundaryZero, CountMismatch, EntireDynError, NotHyperbolic
from .render import Viewport, classify_grid, unbounded_evidence
from .zoo import ClosedFormMV0, Cosine, CosSqrt, ExpAffine, MVNumeric, critical_points, singular_set

log = logging.getLogger(__name__)

CASE1 = "Case1_AllUnbounded"
CASE2 = "Case2_AllBoundedQuasidiscs"
NOT_APPLICABLE = "NotApplicable"

AUDIT_RESOLUTIONS = (400, 800)


def multiplicity_bound(f):
    """Uniform bound on critical-point multiplicities, when known symbolically."""
    if isinstance(f, ExpAffine):
        return 0
    if isinstance(f, (Cosine, CosSqrt, ClosedFormMV0)):
        return 1
    if isinstance(f, MVNumeric):
        orders = f.comb.orders
        return max(1, int(orders.max()) - 1) if orders.size else 1
    return None


def default_viewport(values, n: int) -> Viewport:
    """Square window centred on the given values, width max(8, 2.5 * spread)."""
    v = np.asarray(list(values), complex)
    if v.size == 0:
        return Viewport.square(0j, 8.0, n)
    center = complex(0.5 * (v.real.min() + v.real.max()), 0.5 * (v.imag.min() + v.imag.max()))
    span = max(np.ptp(v.real), np.ptp(v.imag))
    return Viewport.square(center, max(8.0, 2.5 * span), n)


def component_assignment(grid, values) -> dict:
    """value -> component id in ``grid`` (None when not in a labeled component)."""
    out = {}
    for v in values:
        comp = grid.component_at(v)
        out[complex(v)] = None if comp is None else comp.id
    return out


def shared_component(assignment: dict):
    """True if two values share a component, False if all differ, None if any is unplaced."""
    ids = list(assignment.values())
    if any(i is None for i in ids):
        return None
    return len(set(ids)) < len(ids)


# --------------------------------------------------------------------------
# predictors (pure functions of the recorded hypotheses)

def predict_boundedness(f, sing=None, crit_assignment=None, hyperbolic=True):
    """Are all Fatou components bounded?

    False with an asymptotic value.  True when every component holds at most
    one critical value.  For the cosine-type families a shared component
    forces infinitely many critical points into one component, hence False.
    Anything else is unknown.
    """
    if hyperbolic is False:
        raise NotHyperbolic("boundedness prediction needs a hyperbolic map")
    sing = sing or singular_set(f)
    if sing.asymptotic_values:
        return False
    if crit_assignment is None:
        return None
    shared = shared_component(crit_assignment)
    if shared is False:
        return True
    if shared and isinstance(f, (Cosine, CosSqrt)):
        return False
    return None


def dichotomy_from_fields(has_asymptotic, crit_values_count, hyperbolic, same_component):
    if has_asymptotic or crit_values_count != 2 or hyperbolic is not True:
        return NOT_APPLICABLE
    if same_component is None:
        return None
    return CASE1 if same_component else CASE2


def predict_local_connectivity(has_asymptotic, dichotomy, bounded, same_component, mult_bound):
    """False when some component is unbounded; True under a one-critical-value
    or bounded two-value hypothesis with a uniform multiplicity bound."""
    if has_asymptotic or dichotomy == CASE1 or bounded is False:
        return False
    if mult_bound is None:
        return None
    if dichotomy == CASE2 or same_component is False:
        return True
    return None


# --------------------------------------------------------------------------
# report

@dataclass
class AuditReport:
    function: dict
    hyperbolic: object
    has_asymptotic_values: bool
    crit_values_count: int
    crit_points_per_component: dict
    same_component_crit_values: object
    all_components_bounded: object
    dichotomy_case: object
    julia_locally_connected: object
    evidence: list = field(default_factory=list)

    @property
    def predicted(self) -> dict:
        return {"all_components_bounded": self.all_components_bounded,
                "dichotomy_case": self.dichotomy_case,
                "julia_locally_connected": self.julia_locally_connected}

    def consistent(self) -> bool:
        """Propositional consistency of the predictions."""
        if self.dichotomy_case == CASE1 and self.julia_locally_connected is not False:
            return False
        if self.all_components_bounded is False and self.julia_locally_connected is True:
            return False
        return True

    def to_json(self) -> dict:
        return {
            "function": self.function,
            "hyperbolic": self.hyperbolic,
            "has_asymptotic_values": self.has_asymptotic_values,
            "crit_values_count": self.crit_values_count,
            "crit_points_per_component": {str(k): v for k, v in self.crit_points_per_component.items()},
            "same_component_crit_values": self.same_component_crit_values,
            "predicted": self.predicted,
            "evidence": list(self.evidence),
        }


def _grids(f, cycles, values, resolutions, max_iter, escape_radius, threads):
    out = []
    for n in resolutions:
        vp = default_viewport(values, n)
        out.append(classify_grid(f, cycles, vp, max_iter, escape_radius, threads=threads,
                                 tile=None if threads == 1 else 128))
    return out


def _same_component(grids, values, evidence):
    verdicts = []
    for g in grids:
        s = shared_component(component_assignment(g, values))
        evidence.append(f"{g.viewport.nx}x{g.viewport.ny}: critical values share a component: {s}")
        verdicts.append(s)
    if any(v is None for v in verdicts):
        return None
    if len(set(verdicts)) > 1:
        evidence.append("resolution disagreement: component identity left unknown")
        return None
    return verdicts[0]


def dichotomy_case(f, max_iter: int = 1000, resolutions=AUDIT_RESOLUTIONS,
                   escape_radius: float = ESCAPE_RADIUS, threads=None, evidence=None):
    """Case1 / Case2 / NotApplicable for a map with two critical values, or None."""
    evidence = [] if evidence is None else evidence
    sing = singular_set(f)
    crit = list(sing.critical_values)
    if sing.asymptotic_values or len(crit) != 2:
        return NOT_APPLICABLE
    rep = hyperbolicity_report(f)
    if rep.hyperbolic is not True:
        evidence.append(f"hyperbolicity: {rep.hyperbolic}")
        return NOT_APPLICABLE
    grids = _grids(f, rep.cycles, crit, resolutions, max_iter, escape_radius, threads)
    same = _same_component(grids, crit, evidence)
    return dichotomy_from_fields(False, 2, True, same)


def _crit_per_component(f, grid, evidence):
    vp = grid.viewport
    half = 0.5 * vp.width - 1.5 * vp.pixel
    box = (vp.center.real - half, vp.center.real + half, vp.center.imag - half, vp.center.imag + half)
    for shrink in (0.0, 0.013, 0.029):
        b = (box[0] + shrink, box[1] - shrink, box[2] + shrink, box[3] - shrink)
        try:
            pts = critical_points(f, b)
            break
        except (BoundaryZero, CountMismatch) as exc:
            evidence.append(f"critical-point search on {b}: {type(exc).__name__}")
    else:
        return {}
    table = {}
    for cp in pts:
        comp = grid.component_at(cp.location)
        key = -1 if comp is None else comp.id
        row = table.setdefault(key, {"count": 0, "total_multiplicity": 0})
        row["count"] += 1
        row["total_multiplicity"] += cp.multiplicity
    return table


def audit(f, resolutions=AUDIT_RESOLUTIONS, max_iter: int = 1000,
          escape_radius: float = ESCAPE_RADIUS, threads=None, frame_check: bool = True) -> AuditReport:
    sing = singular_set(f)
    crit = list(sing.critical_values)
    has_av = bool(sing.asymptotic_values)
    evidence = [f"singular set ({sing.provenance}): critical {crit}, asymptotic {list(sing.asymptotic_values)}"]
    rep = hyperbolicity_report(f)
    hyp = rep.hyperbolic
    evidence.append(f"hyperbolic: {hyp}; cycles: {[c.period for c in rep.cycles]}")
    report = AuditReport(f.to_json(), hyp, has_av, len(crit), {}, None, None, None, None, evidence)
    if hyp is not True:
        evidence.append("not verified hyperbolic: predictions left unknown")
        return report
    values = crit or list(sing.asymptotic_values)
    grids = _grids(f, rep.cycles, values, resolutions, max_iter, escape_radius, threads)
    same = _same_component(grids, crit, evidence) if len(crit) >= 2 else (False if crit else None)
    report.same_component_crit_values = same
    try:
        report.crit_points_per_component = _crit_per_component(f, grids[0], evidence)
    except EntireDynError as exc:
        evidence.append(f"critical-point census failed: {exc}")
    assignment = component_assignment(grids[0], crit) if crit and same is not None else None
    report.all_components_bounded = predict_boundedness(f, sing, assignment, hyp)
    report.dichotomy_case = dichotomy_from_fields(has_av, len(crit), hyp, same)
    report.julia_locally_connected = predict_local_connectivity(
        has_av, report.dichotomy_case, report.all_components_bounded, same, multiplicity_bound(f))
    if frame_check:
        _frame_evidence(f, rep.cycles, grids[0], values, report, max_iter, escape_radius, threads)
    if not report.consistent():
        evidence.append("inconsistent predictions")
    return report


def _frame_evidence(f, cycles, grid, values, report, max_iter, escape_radius, threads):
    """Compare the boundedness prediction with frame-touching of the components
    through the singular values (at the audit width and twice it)."""
    vp = Viewport.square(grid.viewport.center, grid.viewport.width, min(grid.viewport.nx, 400))
    seen = []
    for v in values:
        ev = unbounded_evidence(f, cycles, vp, v, max_iter, escape_radius, threads)
        seen.append(ev)
        report.evidence.append(f"component through {complex(v):.6g}: unbounded evidence {ev}")
    if report.all_components_bounded is True and any(seen):
        report.evidence.append("heuristic disagreement: predicted bounded but a component touches the frame at both widths")
        log.warning("frame evidence contradicts the boundedness prediction for %s", report.function)


# --------------------------------------------------------------------------
# properness probe

@dataclass
class ProbeResult:
    component_id: object
    window: float
    counts: list
    preimages: list

    def to_json(self) -> dict:
        return {"component_id": self.component_id, "window": self.window, "counts": self.counts,
                "preimages": [[[w.real, w.imag] for w in ws] for ws in self.preimages]}


def _preimages(f, target, window, center, seeds, iters=80, tol=1e-10):
    x = center.real + np.linspace(-0.5, 0.5, seeds) * window
    y = center.imag + np.linspace(-0.5, 0.5, seeds) * window
    w = (x[None, :] + 1j * y[:, None]).ravel()
    with np.errstate(all="ignore"):
        for _ in range(iters):
            d = f.deriv(w)
            w = w - (f(w) - target) / d
        ok = np.isfinite(w) & (np.abs(f(w) - target) < tol * (1 + abs(target)))
    w = w[ok]
    w = w[(np.abs(w.real - center.real) <= window / 2) & (np.abs(w.imag - center.imag) <= window / 2)]
    roots = []
    for z in w[np.lexsort((w.imag, w.real))]:
        if all(abs(z - r) > 1e-6 for r in roots):
            roots.append(complex(z))
    return roots


def properness_probe(f, cycles, component_point, targets, window: float, center=None,
                     resolution: int = 400, seeds: int = 121, max_iter: int = 1000,
                     escape_radius: float = ESCAPE_RADIUS):
    """Lower-bound count of f-preimages of each target inside the component
    through ``component_point`` and inside the square window.

    Targets outside that component get a zero count.
    """
    center = complex(component_point if center is None else center)
    grid = classify_grid(f, cycles, Viewport.square(center, window, resolution), max_iter, escape_radius)
    comp = grid.component_at(component_point)
    if comp is None:
        return ProbeResult(None, window, [0] * len(targets), [[] for _ in targets])
    counts, found = [], []
    for t in targets:
        tc = grid.component_at(t)
        if tc is None or tc.id != comp.id:
            counts.append(0)
            found.append([])
            continue
        roots = [w for w in _preimages(f, complex(t), window, center, seeds)
                 if (c := grid.component_at(w)) is not None and c.id == comp.id]
        counts.append(len(roots))
        found.append(roots)
    return ProbeResult(comp.id, window, counts, found)
