"""Parameter sweeps and figure presets.

A sweep evaluates the four correlation measures on a grid of model
parameters, either from the closed forms, from the numerical measures
applied to the density matrix, or both side by side.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import closedform, measures
from .model import SpinParams, bell_state, gibbs_state, ground_state, milburn_evolve

SPIN_NAMES = ("J", "Jz", "B", "D")
THERMAL_NAMES = SPIN_NAMES + ("T",)
DYNAMICS_NAMES = SPIN_NAMES + ("gamma", "t")
QUANTITIES = measures.CorrelationSet.QUANTITIES
ENGINES = ("closedform", "oracle", "both")
DEFAULT_RESOLUTION = 201
T_MIN = 0.02


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int = DEFAULT_RESOLUTION

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:min:max:count``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"axis must look like name:min:max:count, got {text!r}")
        name, lo, hi, n = parts
        try:
            return cls(name, float(lo), float(hi), int(n))
        except ValueError:
            raise ValueError(f"non-numeric bound or count in axis {text!r}") from None


@dataclass(frozen=True)
class SweepSpec:
    """What to evaluate and where.

    ``fixed`` assigns the parameters that do not vary. ``family`` is an
    optional discrete outer parameter (one curve per value, as in the
    figures). ``initial`` is ``"psi1"``, ``"psi2"`` or an explicit 4x4
    density matrix; it is only used in dynamics mode.
    """

    mode: str
    axes: tuple[Axis, ...]
    fixed: Mapping[str, float] = field(default_factory=dict)
    quantities: tuple[str, ...] = QUANTITIES
    engine: str = "closedform"
    initial: object = "psi1"
    ground_state: bool = False
    family: tuple[str, tuple[float, ...]] | None = None
    variant: str | None = None
    label: str = ""

    def validate(self, allow_point: bool = False) -> None:
        """Raise ValueError unless the spec is runnable.

        ``allow_point`` admits an empty axis list, which is how
        :func:`evaluate_point` describes a single evaluation.
        """
        if self.mode not in ("thermal", "dynamics"):
            raise ValueError(f"mode must be 'thermal' or 'dynamics', got {self.mode!r}")
        names = THERMAL_NAMES if self.mode == "thermal" else DYNAMICS_NAMES
        if len(self.axes) > 2 or (not self.axes and not allow_point):
            raise ValueError("a sweep needs one or two axes")
        swept = [a.name for a in self.axes]
        if self.family is not None:
            swept.append(self.family[0])
            if not self.family[1]:
                raise ValueError("family needs at least one value")
        if len(set(swept)) != len(swept):
            raise ValueError(f"axis names must be distinct, got {swept}")
        for n in list(swept) + list(self.fixed):
            if n not in names:
                raise ValueError(f"unknown {self.mode} parameter {n!r}; expected one of {names}")
        if set(swept) & set(self.fixed):
            raise ValueError(f"parameters both swept and fixed: {sorted(set(swept) & set(self.fixed))}")
        for a in self.axes:
            if a.count < 2:
                raise ValueError(f"axis {a.name} needs count >= 2")
        bad_q = set(self.quantities) - set(QUANTITIES)
        if bad_q or not self.quantities:
            raise ValueError(f"quantities must be a non-empty subset of {QUANTITIES}")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.variant is not None and self.variant not in closedform.VARIANTS:
            raise ValueError(f"variant must be one of {closedform.VARIANTS}")
        if self.mode == "thermal":
            has_T = "T" in swept or "T" in self.fixed
            if self.ground_state and has_T:
                raise ValueError("ground-state mode takes no temperature")
            if not self.ground_state and not has_T:
                raise ValueError("thermal sweeps need a temperature (or ground-state mode)")
            if self.ground_state and self.engine != "oracle":
                raise ValueError("ground-state mode has no closed form; use engine 'oracle'")
        else:
            for n in ("gamma", "t"):
                if n not in swept and n not in self.fixed:
                    raise ValueError(f"dynamics sweeps need {n}")
            if not isinstance(self.initial, str) and self.engine != "oracle":
                raise ValueError("closed forms exist only for psi1/psi2 initial states; use engine 'oracle'")

    def points(self):
        """Parameter assignments in lexicographic order (family, axis 1, axis 2)."""
        outer = [(self.family[0], v) for v in self.family[1]] if self.family else [None]
        grids = [[(a.name, float(v)) for v in a.values()] for a in self.axes]
        for fam in outer:
            for combo in itertools.product(*grids):
                pt = dict(self.fixed)
                if fam is not None:
                    pt[fam[0]] = float(fam[1])
                pt.update(combo)
                yield pt


@dataclass
class SweepResult:
    header: list[str]
    rows: list[list]

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    def array(self, name: str) -> np.ndarray:
        return np.array([np.nan if v is None or v == "" else v for v in self.column(name)], dtype=float)

    def records(self) -> list[dict]:
        return [dict(zip(self.header, r)) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)  # RFC 4180: minimal quoting, CRLF line ends
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.records(), indent=1) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")

    def extend(self, other: "SweepResult") -> None:
        if other.header != self.header:
            raise ValueError("cannot join sweep results with different columns")
        self.rows.extend(other.rows)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)  # shortest round-trip form, up to 17 significant digits
    return str(v)


def _initial_state(initial):
    return bell_state(initial) if isinstance(initial, str) else np.asarray(initial, dtype=complex)


def _evaluate(spec: SweepSpec, pt: Mapping[str, float], engine: str) -> measures.CorrelationSet:
    p = SpinParams(**{n: pt.get(n, 0.0) for n in SPIN_NAMES})
    if spec.mode == "thermal":
        if engine == "oracle":
            rho = ground_state(p) if spec.ground_state else gibbs_state(p, pt["T"])
            return measures.correlation_set(rho)
        return closedform.thermal_correlations(p, pt["T"], spec.variant or closedform.THERMAL_DEFAULT)
    if engine == "oracle":
        rho = milburn_evolve(p, pt["gamma"], pt["t"], _initial_state(spec.initial))
        return measures.correlation_set(rho)
    return closedform.dynamics(spec.initial, p, pt["gamma"], pt["t"], spec.variant or closedform.PSI1_DEFAULT)


def _input_names(spec: SweepSpec) -> list[str]:
    names = list(THERMAL_NAMES if spec.mode == "thermal" else DYNAMICS_NAMES)
    if spec.mode == "thermal" and spec.ground_state:
        names.remove("T")
    return names


def _header(spec: SweepSpec) -> list[str]:
    cols = _input_names(spec)
    for q in spec.quantities:
        if spec.engine == "both":
            cols += [f"{q}_closedform", f"{q}_oracle", f"{q}_delta"]
        else:
            cols.append(q)
    return cols + ["flags", "error"]


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate ``spec`` point by point.

    A point that fails (invalid parameters, a closed form outside its
    domain) becomes a row with empty values and a message in the ``error``
    column; the sweep carries on.
    """
    spec.validate()
    return _run(spec)


def evaluate_point(spec: SweepSpec) -> SweepResult:
    """Evaluate a spec without axes: one row, same columns as a sweep."""
    if spec.axes or spec.family:
        raise ValueError("a point evaluation takes no axes or family")
    spec.validate(allow_point=True)
    return _run(spec)


def _run(spec: SweepSpec) -> SweepResult:
    header = _header(spec)
    inputs = _input_names(spec)
    rows = []
    engines = ("closedform", "oracle") if spec.engine == "both" else (spec.engine,)
    for pt in spec.points():
        row: list = [float(pt.get(n, 0.0)) for n in inputs]
        vals, flags, errors = {}, [], []
        for eng in engines:
            try:
                cs = _evaluate(spec, pt, eng)
            except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
                errors.append(f"{eng}: {exc}")
                continue
            flags.extend(f"{eng}:{f}" for f in cs.flags)
            bad = [q for q in spec.quantities if not math.isfinite(getattr(cs, q))]
            if bad:
                errors.append(f"{eng}: non-finite {','.join(bad)} (formula outside its domain)")
                continue
            vals[eng] = cs
        for q in spec.quantities:
            got = [getattr(vals[e], q) if e in vals else None for e in engines]
            row.extend(got)
            if spec.engine == "both":
                row.append(abs(got[0] - got[1]) if None not in got else None)
        row.append(";".join(flags))
        row.append(" | ".join(errors))
        rows.append(row)
    return SweepResult(header, rows)


def _thermal(label, axes, fixed, family=None, quantities=QUANTITIES) -> SweepSpec:
    return SweepSpec("thermal", tuple(axes), dict(fixed), quantities=quantities, family=family, label=label)


def _dynamics(label, axes, fixed, initial, family=None) -> SweepSpec:
    return SweepSpec("dynamics", tuple(axes), dict(fixed), initial=initial, family=family, label=label)


def _presets(n: int) -> dict[str, list[SweepSpec]]:
    T_ax = lambda hi: Axis("T", T_MIN, hi, n)  # noqa: E731
    return {
        "fig1": [_thermal("fig1", [T_ax(2.0)], {"Jz": -0.5, "B": 0.0, "D": 0.0}, ("J", (0.3, 0.5, 1.0)))],
        "fig2": [_thermal("fig2", [Axis("Jz", -2.5, 2.5, n)], {"J": 1.0, "T": 0.5, "B": 0.0, "D": 0.0})],
        "fig3": [_thermal("fig3", [T_ax(4.0)], {"J": 1.0, "Jz": 1.0, "D": 0.0}, ("B", (0.0, 2.0, 4.0)))],
        "fig4": [
            _thermal("fig4:B-D", [Axis("B", 0, 4, n), Axis("D", 0, 4, n)], {"J": 0.1, "Jz": 0.1, "T": 0.5}, quantities=("QD",)),
            _thermal("fig4:B-J", [Axis("B", 0, 4, n), Axis("J", 0, 4, n)], {"Jz": 0.1, "D": 0.1, "T": 0.5}, quantities=("QD",)),
            _thermal("fig4:B-Jz", [Axis("B", 0, 4, n), Axis("Jz", 0, 4, n)], {"J": 0.1, "D": 0.1, "T": 0.5}, quantities=("QD",)),
        ],
        "fig5": [_thermal("fig5", [T_ax(4.0)], {"J": 1.0, "Jz": 1.0, "B": 0.0}, ("D", (0.0, 2.0, 4.0)))],
        "fig6": [
            _dynamics("fig6:J", [Axis("J", 0, 4, n)], {"D": 0.4, "Jz": 0.0, "B": 0.0, "gamma": 1.0, "t": 1.0}, "psi1"),
            _dynamics("fig6:D", [Axis("D", 0, 4, n)], {"J": 0.0, "Jz": 0.0, "B": 0.0, "gamma": 1.0, "t": 1.0}, "psi1"),
            _dynamics("fig6:B", [Axis("B", 0, 4, n)], {"J": 1.0, "D": 0.4, "Jz": 0.0, "gamma": 1.0, "t": 1.0}, "psi2"),
        ],
        "fig7a": [
            _dynamics("fig7a", [Axis("t", 0, 10, n)], {"J": 1.0, "D": 1.0, "Jz": 0.0, "B": 0.0}, "psi1",
                      ("gamma", (0.0, 0.1, 0.2, 0.3)))
        ],
        "fig7b": [
            _dynamics("fig7b", [Axis("t", 0, 3, n)], {"J": 1.0, "D": 1.0, "Jz": 0.0, "B": 1.0}, "psi2",
                      ("gamma", (0.1, 1.0, 2.0)))
        ],
    }


FIGURES = tuple(_presets(2))


def figure_preset(name: str, resolution: int = DEFAULT_RESOLUTION) -> list[SweepSpec]:
    """Sweep specifications (one per panel) reproducing a figure's data.

    Only the caption values are fixed by the source; axis ranges and any
    coupling a caption leaves open are chosen to cover the plotted regime.
    """
    presets = _presets(resolution)
    if name not in presets:
        raise ValueError(f"unknown figure {name!r}; valid presets: {', '.join(presets)}")
    return presets[name]


def run_figure(name: str, resolution: int = DEFAULT_RESOLUTION, engine: str = "closedform",
               variant: str | None = None) -> SweepResult:
    """Run every panel of a figure preset; the first column names the panel."""
    out = None
    for spec in figure_preset(name, resolution):
        spec = SweepSpec(**{**spec.__dict__, "engine": engine, "variant": variant})
        res = run_sweep(spec)
        res = SweepResult(["panel"] + res.header, [[spec.label] + r for r in res.rows])
        if out is None:
            out = res
        else:
            out.extend(res)
    return out


def slope_change_spikes(x: Sequence[float], y: Sequence[float], factor: float = 10.0) -> np.ndarray:
    """Grid points where a curve has a kink.

    The slope change ``|s_i - s_{i-1}|`` between neighbouring intervals is
    compared with its median along the curve; points exceeding ``factor``
    times the median are returned. A jump in the first derivative shows up
    here as an isolated spike of height ~ jump, against a smooth background
    of order ``h * f''``.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    s = np.diff(y) / np.diff(x)
    c = np.abs(np.diff(s))
    med = np.median(c)
    if med == 0:
        return x[1:-1][c > 0]
    return x[1:-1][c > factor * med]
