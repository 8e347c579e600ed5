"""Closed form versus numerical oracle, over fixed parameter grids.

Three checks make up the report:

* thermal: every closed-form quantity against the measures evaluated on the
  Gibbs state;
* psi2 dynamics: the closed forms against the evolved state;
* psi1 dynamics: both variants of the formulas against the evolved state,
  with each component classified as agreeing, as a known misprint (the
  printed form deviates but the repaired form agrees), or as unexplained.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

from . import closedform, measures
from .model import SpinParams, bell_state, gibbs_state, milburn_evolve

QUANTITIES = measures.CorrelationSet.QUANTITIES

THERMAL_GRID = {
    "J": (-1.0, -0.3, 0.3, 1.0),
    "Jz": (-1.0, -0.5, 0.0, 0.5, 1.0),
    "B": (0.0, 1.0, 2.0),
    "D": (0.0, 1.0, 2.0),
    "T": (0.2, 0.5, 1.0, 2.0, 5.0),
}
THERMAL_TOL = {"C": 1e-5, "GMD2": 1e-5, "CC": 1e-4, "QD": 1e-4}

PSI2_GRID = {"B": (0.5, 1.0, 2.0), "gamma": (0.1, 1.0), "t": (0.0, 0.25, 0.5, 1.0, 2.0)}
DYN_TOL = {"C": 1e-6, "GMD2": 1e-6, "CC": 1e-4, "QD": 1e-4}

PSI1_GRID = {"J": (0.0, 0.5, 1.0), "D": (0.4, 1.0), "gamma": (0.1, 1.0), "t": tuple(np.linspace(0.0, 3.0, 13))}
PSI1_TOL = 1e-4
# components whose printed form is known to be misprinted; QD1 enters
# through the alpha_{3,4} exponent, which sets its long-time limit
PSI1_FLAGGED = {"C": "radicand cos vs cos^2", "GMD2": "frequency cos^2(4mu t) vs cos(4mu t)",
                "QD": "long-time limit via alpha_{3,4} exponent"}

QUICK_THERMAL_GRID = {"J": (-1.0, 0.3), "Jz": (-0.5, 1.0), "B": (0.0, 2.0), "D": (0.0, 1.0), "T": (0.2, 1.0)}
QUICK_PSI1_GRID = {"J": (0.0, 1.0), "D": (0.4,), "gamma": (0.1,), "t": (0.0, 0.75, 2.25)}


def _product(grid: dict):
    keys = list(grid)
    for combo in itertools.product(*(grid[k] for k in keys)):
        yield dict(zip(keys, map(float, combo)))


@dataclass
class ComponentCheck:
    quantity: str
    tol: float
    max_delta: float
    worst: dict
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_delta <= self.tol


def _components(deltas: dict, worst: dict, failures: dict, tol: dict) -> dict[str, ComponentCheck]:
    return {q: ComponentCheck(q, tol[q], deltas[q], worst[q], failures[q]) for q in QUANTITIES}


def check_thermal(grid: dict = THERMAL_GRID, variant: str = "corrected") -> dict:
    """Compare thermal closed forms with the numerical measures on a grid."""
    deltas = dict.fromkeys(QUANTITIES, 0.0)
    worst: dict = dict.fromkeys(QUANTITIES, {})
    failures: dict = {q: [] for q in QUANTITIES}
    undefined = 0
    n = 0
    for pt in _product(grid):
        n += 1
        p = SpinParams(pt["J"], pt["Jz"], pt["B"], pt["D"])
        oracle = measures.correlation_set(gibbs_state(p, pt["T"]))
        closed = closedform.thermal_correlations(p, pt["T"], variant)
        for q in QUANTITIES:
            c = getattr(closed, q)
            d = abs(c - getattr(oracle, q)) if np.isfinite(c) else np.inf
            if not np.isfinite(c):
                undefined += q == "CC"
            if d > deltas[q] or not worst[q]:
                deltas[q], worst[q] = d, pt
            if d > THERMAL_TOL[q]:
                it = closedform.thermal_intermediates(p, pt["T"], variant)
                failures[q].append({"point": pt, "closedform": c, "oracle": getattr(oracle, q),
                                    "intermediates": asdict(it)})
    comps = _components(deltas, worst, failures, THERMAL_TOL)
    return {
        "variant": variant,
        "points": n,
        "undefined_points": undefined,
        "components": comps,
        "passed": all(c.passed for c in comps.values()),
    }


def check_psi2(grid: dict = PSI2_GRID) -> dict:
    deltas = dict.fromkeys(QUANTITIES, 0.0)
    worst: dict = dict.fromkeys(QUANTITIES, {})
    failures: dict = {q: [] for q in QUANTITIES}
    rho0 = bell_state("psi2")
    n = 0
    for pt in _product(grid):
        n += 1
        # J, D and Jz drop out of the psi2 dynamics; fix them to generic values
        p = SpinParams(J=0.7, Jz=0.3, B=pt["B"], D=0.4)
        oracle = measures.correlation_set(milburn_evolve(p, pt["gamma"], pt["t"], rho0))
        closed = closedform.dynamics_psi2(p, pt["gamma"], pt["t"])
        for q in QUANTITIES:
            d = abs(getattr(closed, q) - getattr(oracle, q))
            if d > deltas[q] or not worst[q]:
                deltas[q], worst[q] = d, pt
            if d > DYN_TOL[q]:
                failures[q].append({"point": pt, "closedform": getattr(closed, q), "oracle": getattr(oracle, q)})
    comps = _components(deltas, worst, failures, DYN_TOL)
    return {"points": n, "components": comps, "passed": all(c.passed for c in comps.values())}


def check_psi1(grid: dict = PSI1_GRID) -> dict:
    """Adjudicate both variants of the psi1 formulas against the evolved state."""
    rho0 = bell_state("psi1")
    printed_max = dict.fromkeys(QUANTITIES, 0.0)
    corrected_max = dict.fromkeys(QUANTITIES, 0.0)
    printed_worst: dict = dict.fromkeys(QUANTITIES, {})
    radicand_flags = 0
    bounds_ok = True
    n = 0
    for pt in _product(grid):
        n += 1
        p = SpinParams(J=pt["J"], Jz=0.3, B=0.7, D=pt["D"])
        oracle = measures.correlation_set(milburn_evolve(p, pt["gamma"], pt["t"], rho0))
        if not all(-1e-9 <= v <= 1 + 1e-9 for v in oracle.values().values()):
            bounds_ok = False
        printed = closedform.dynamics_psi1(p, pt["gamma"], pt["t"], "printed")
        corrected = closedform.dynamics_psi1(p, pt["gamma"], pt["t"], "corrected")
        radicand_flags += bool(printed.flags)
        for q in QUANTITIES:
            dp = abs(getattr(printed, q) - getattr(oracle, q))
            dc = abs(getattr(corrected, q) - getattr(oracle, q))
            if dp > printed_max[q] or not printed_worst[q]:
                printed_max[q], printed_worst[q] = dp, pt
            corrected_max[q] = max(corrected_max[q], dc)
    verdicts = {}
    for q in QUANTITIES:
        if printed_max[q] <= PSI1_TOL:
            verdicts[q] = "agrees"
        elif q in PSI1_FLAGGED and corrected_max[q] <= PSI1_TOL:
            verdicts[q] = "misprint: " + PSI1_FLAGGED[q]
        else:
            verdicts[q] = "unexplained"
    return {
        "points": n,
        "tol": PSI1_TOL,
        "printed_max_delta": printed_max,
        "printed_worst_point": printed_worst,
        "corrected_max_delta": corrected_max,
        "verdicts": verdicts,
        "radicand_flagged_points": radicand_flags,
        "oracle_within_bounds": bounds_ok,
        "passed": bounds_ok and "unexplained" not in verdicts.values(),
    }


def run_verify(quick: bool = False) -> dict:
    thermal_grid = QUICK_THERMAL_GRID if quick else THERMAL_GRID
    report = {
        "thermal": check_thermal(thermal_grid, "corrected"),
        "thermal_printed": _printed_thermal_summary(thermal_grid),
        "psi2": check_psi2(),
        "psi1": check_psi1(QUICK_PSI1_GRID if quick else PSI1_GRID),
    }
    report["passed"] = report["thermal"]["passed"] and report["psi2"]["passed"] and report["psi1"]["passed"]
    return report


def _printed_thermal_summary(grid: dict) -> dict:
    """How far the thermal formulas as printed are from the repaired ones.

    Compared against the repaired closed forms (which the oracle check
    validates), so no second optimization pass is needed.
    """
    max_c = 0.0
    undefined = 0
    n = 0
    for pt in _product(grid):
        n += 1
        p = SpinParams(pt["J"], pt["Jz"], pt["B"], pt["D"])
        a = closedform.thermal_correlations(p, pt["T"], "printed")
        b = closedform.thermal_correlations(p, pt["T"], "corrected")
        max_c = max(max_c, abs(a.C - b.C))
        undefined += not (np.isfinite(a.CC) and np.isfinite(a.QD))
    return {"points": n, "max_C_deviation": max_c, "cc_qd_undefined_points": undefined}


def to_jsonable(obj):
    if isinstance(obj, ComponentCheck):
        return {**asdict(obj), "passed": obj.passed}
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def format_report(report: dict) -> str:
    lines = []
    th = report["thermal"]
    lines.append(f"thermal closed forms ({th['variant']}) vs oracle, {th['points']} points")
    for c in th["components"].values():
        lines.append(f"  {c.quantity:5s} max |delta| = {c.max_delta:.3e}  tol {c.tol:.0e}  "
                     f"{'PASS' if c.passed else 'FAIL'}  worst at {c.worst}")
        for f in c.failures[:5]:
            lines.append(f"      exceeds at {f['point']}: closedform {f['closedform']!r} oracle {f['oracle']!r}")
            lines.append(f"      intermediates {f['intermediates']}")
    tp = report["thermal_printed"]
    lines.append(f"thermal formulas as printed: max concurrence deviation {tp['max_C_deviation']:.3e}, "
                 f"CC/QD undefined at {tp['cc_qd_undefined_points']}/{tp['points']} points (informational)")
    p2 = report["psi2"]
    lines.append(f"psi2 dynamics vs evolved state, {p2['points']} points")
    for c in p2["components"].values():
        lines.append(f"  {c.quantity:5s} max |delta| = {c.max_delta:.3e}  tol {c.tol:.0e}  "
                     f"{'PASS' if c.passed else 'FAIL'}")
    p1 = report["psi1"]
    lines.append(f"psi1 dynamics vs evolved state, {p1['points']} points, tol {p1['tol']:.0e}")
    for q in QUANTITIES:
        lines.append(f"  {q:5s} printed max |delta| = {p1['printed_max_delta'][q]:.3e}  "
                     f"repaired max |delta| = {p1['corrected_max_delta'][q]:.3e}  -> {p1['verdicts'][q]}")
    lines.append(f"  negative C1 radicand (printed) at {p1['radicand_flagged_points']} points; "
                 f"oracle values within bounds: {p1['oracle_within_bounds']}")
    lines.append("RESULT: " + ("PASS" if report["passed"] else "FAIL"))
    return "\n".join(lines) + "\n"
