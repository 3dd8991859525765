"""Strict JSON scenario configuration.

A configuration is one JSON object::

    {
      "scenario": "damped-free",                      # optional, supplies defaults
      "bundle": {"kind": "trivial", "dim": 1},        # or {"kind": "moebius"}
      "hamiltonian": {"builtin": "damped-free", "params": {"lam": 0.5}},
      "initial": {"chart": "R", "x": [0], "p": [1], "z": 0},
      "integrator": {"method": "rk45", "abs_tol": 1e-9, "rel_tol": 1e-9},
      "duration": 10,
      "output": {"path": "out.csv", "format": "csv"}
    }

Exactly one of ``hamiltonian``, ``lagrangian`` or ``herglotz`` names the
side; its value is either ``{"builtin": name, "params": {...}}`` or
``{"expr": "...", "params": {...}}`` (expressions need a trivial bundle).
Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import atlas as A
from . import sections as S
from .errors import ConfigError, ContactTripleError
from .scenarios import SECTION_SIDES, build_section, get_scenario

SIDES = ("hamiltonian", "lagrangian", "herglotz")
TOP_KEYS = {"scenario", "bundle", "initial", "integrator", "duration", "output", *SIDES}
FIBER_KEYS = {"hamiltonian": ("p", "z"), "lagrangian": ("xd", "t"), "herglotz": ("xd", "z")}


@dataclass
class IntegratorConfig:
    method: str = "rk45"
    step: float = 0.01
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9


@dataclass
class OutputConfig:
    path: str | None = None
    format: str = "csv"


@dataclass
class ScenarioConfig:
    bundle: dict
    side: str
    section: dict
    chart: str
    state: np.ndarray
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    duration: float = 10.0
    output: OutputConfig = field(default_factory=OutputConfig)
    name: str = "scenario"

    @property
    def dim(self):
        return 1 if self.bundle["kind"] == "moebius" else int(self.bundle["dim"])

    def atlas(self):
        return A.moebius() if self.bundle["kind"] == "moebius" else A.trivial(self.dim)

    def build_section(self):
        spec = self.section
        if "builtin" in spec:
            return build_section(spec["builtin"], self.dim, spec.get("params"), self.side)
        try:
            return S.from_expr(self.side, spec["expr"], spec.get("params"), self.dim)
        except ContactTripleError as exc:
            raise ConfigError(f"bad expression: {exc}", f"{self.side}.expr") from exc


def _type_name(v):
    return type(v).__name__


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"expected an object, got {_type_name(obj)}", where or "<root>")
    for k in obj:
        if k not in allowed:
            prefix = f"{where}." if where else ""
            raise ConfigError(f"unknown key {k!r}", f"{prefix}{k}")


def _real(v, where, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {v!r}", where)
    if positive and v <= 0:
        raise ConfigError(f"must be > 0, got {v!r}", where)
    return float(v)


def _vector(v, n, where):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        v = [v]
    if not isinstance(v, list) or len(v) != n:
        raise ConfigError(f"expected a list of {n} numbers", where)
    return [_real(a, f"{where}[{i}]") for i, a in enumerate(v)]


def _parse_bundle(bundle):
    _check_keys(bundle, {"kind", "dim"}, "bundle")
    kind = bundle.get("kind", "trivial")
    if kind == "trivial":
        dim = bundle.get("dim", 1)
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ConfigError("expected a positive integer", "bundle.dim")
        return {"kind": "trivial", "dim": dim}
    if kind == "moebius":
        if bundle.get("dim", 1) != 1:
            raise ConfigError("the Möbius band has a one-dimensional base", "bundle.dim")
        return {"kind": "moebius", "dim": 1}
    raise ConfigError(f"unknown bundle kind {kind!r}", "bundle.kind")


def _parse_section(doc, sides, kind, dim):
    present = [s for s in sides if s in doc]
    if len(present) != 1:
        raise ConfigError(f"exactly one of {', '.join(map(repr, sides))} is required", "side")
    side = present[0]
    spec = doc[side]
    _check_keys(spec, {"builtin", "expr", "params"}, side)
    if ("builtin" in spec) == ("expr" in spec):
        raise ConfigError("give exactly one of 'builtin' or 'expr'", side)
    params = spec.get("params", {})
    _check_keys(params, set(params), f"{side}.params")
    params = {k: _real(v, f"{side}.params.{k}") for k, v in params.items()}
    if "builtin" in spec:
        bname = spec["builtin"]
        if SECTION_SIDES.get(bname) != side:
            raise ConfigError(f"{bname!r} is not a built-in {side}", f"{side}.builtin")
        if (bname == "moebius-hyperregular") != (kind == "moebius"):
            raise ConfigError(f"{bname!r} does not live on a {kind} bundle", "bundle.kind")
        section = {"builtin": bname, "params": params}
        build_section(bname, dim, params, side)
    else:
        if kind != "trivial":
            raise ConfigError("expression sections need a trivial bundle", "bundle.kind")
        if not isinstance(spec["expr"], str):
            raise ConfigError("expected a string", f"{side}.expr")
        section = {"expr": spec["expr"], "params": params}
        try:
            S.from_expr(side, spec["expr"], params, dim)
        except ContactTripleError as exc:
            raise ConfigError(f"bad expression: {exc}", f"{side}.expr") from exc
    if side == "herglotz" and kind != "trivial":
        raise ConfigError("Herglotz Lagrangians need a trivial bundle", "bundle.kind")
    return side, section


def parse_config(doc: dict, name: str = "scenario") -> ScenarioConfig:
    """Validate a decoded JSON document and build a :class:`ScenarioConfig`."""
    _check_keys(doc, TOP_KEYS, "")
    doc = dict(doc)
    if "scenario" in doc:
        if not isinstance(doc["scenario"], str):
            raise ConfigError("expected a scenario name", "scenario")
        sc = get_scenario(doc["scenario"])
        if not any(s in doc for s in SIDES):
            doc[sc.side] = {"builtin": sc.name, "params": dict(sc.params)}
        doc.setdefault("bundle", sc.bundle)
        doc.setdefault("initial", sc.initial)
        doc.setdefault("integrator", sc.integrator)
        doc.setdefault("duration", sc.duration)

    bundle = _parse_bundle(doc.get("bundle", {"kind": "trivial", "dim": 1}))
    kind, n = bundle["kind"], bundle["dim"]
    side, section = _parse_section(doc, SIDES, kind, n)

    if "initial" not in doc:
        raise ConfigError("missing initial state", "initial")
    init = doc["initial"]
    fk, lk = FIBER_KEYS[side]
    _check_keys(init, {"chart", "x", fk, lk}, "initial")
    for k in ("x", fk, lk):
        if k not in init:
            raise ConfigError(f"missing {k!r}", f"initial.{k}")
    state = np.array(
        _vector(init["x"], n, "initial.x") + _vector(init[fk], n, f"initial.{fk}") + [_real(init[lk], f"initial.{lk}")]
    )
    atlas = A.moebius() if kind == "moebius" else A.trivial(n)
    if "chart" in init:
        chart = init["chart"]
        if chart not in atlas.chart_names:
            raise ConfigError(f"unknown chart {chart!r}; charts are {list(atlas.chart_names)}", "initial.chart")
        if not atlas.chart(chart).contains(state[:n]):
            raise ConfigError(f"x={state[:n].tolist()} is outside chart {chart!r}", "initial.x")
    else:
        try:
            chart = atlas.home_chart(state[:n])
        except ContactTripleError as exc:
            raise ConfigError(str(exc), "initial.x") from exc

    integ = doc.get("integrator", {})
    _check_keys(integ, {"method", "step", "abs_tol", "rel_tol"}, "integrator")
    method = integ.get("method", "rk45")
    if method not in ("rk4", "rk45"):
        raise ConfigError(f"unknown method {method!r}", "integrator.method")
    if method == "rk4" and "step" not in integ:
        raise ConfigError("rk4 needs a step", "integrator.step")
    icfg = IntegratorConfig(
        method,
        _real(integ.get("step", 0.01), "integrator.step", positive=True),
        _real(integ.get("abs_tol", 1e-9), "integrator.abs_tol", positive=True),
        _real(integ.get("rel_tol", 1e-9), "integrator.rel_tol", positive=True),
    )

    if "duration" not in doc:
        raise ConfigError("missing duration", "duration")
    duration = _real(doc["duration"], "duration", positive=True)

    out = doc.get("output", {})
    _check_keys(out, {"path", "format"}, "output")
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt!r}", "output.format")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("expected a string", "output.path")

    return ScenarioConfig(bundle, side, section, chart, state, icfg, duration, OutputConfig(path, fmt), name)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", "path") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", f"line {exc.lineno}") from exc
    return parse_config(doc, path.stem)


def integrate(cfg: ScenarioConfig):
    """Integrate the configured scenario and return its :class:`Trajectory`."""
    from .integrate import integrate_section

    section = cfg.build_section()
    ic = cfg.integrator
    return integrate_section(
        section, cfg.chart, cfg.state, cfg.duration, ic.method, ic.step, ic.abs_tol, ic.rel_tol
    )


@dataclass
class LegendreConfig:
    bundle: dict
    side: str
    section: dict
    region: object = None
    samples: int = 125
    table_path: str | None = None
    table_points: int = 5

    def build_section(self):
        cfg = ScenarioConfig(self.bundle, self.side, self.section, "", np.zeros(1))
        return cfg.build_section()


def parse_legendre_config(doc: dict) -> LegendreConfig:
    """Schema for the ``legendre`` subcommand.

    ``{"bundle", "lagrangian" | "hamiltonian", "region"?: {"chart", "lower",
    "upper"}, "samples"?: int, "table"?: {"path", "points_per_axis"}}``
    where ``lower``/``upper`` span all 2n+1 chart coordinates.
    """
    from .legendre import Region

    _check_keys(doc, {"bundle", "lagrangian", "hamiltonian", "region", "samples", "table"}, "")
    bundle = _parse_bundle(doc.get("bundle", {"kind": "trivial", "dim": 1}))
    n = bundle["dim"]
    side, section = _parse_section(doc, ("lagrangian", "hamiltonian"), bundle["kind"], n)
    atlas = A.moebius() if bundle["kind"] == "moebius" else A.trivial(n)
    region = None
    if "region" in doc:
        reg = doc["region"]
        _check_keys(reg, {"chart", "lower", "upper"}, "region")
        for k in ("chart", "lower", "upper"):
            if k not in reg:
                raise ConfigError(f"missing {k!r}", f"region.{k}")
        lower = _vector(reg["lower"], 2 * n + 1, "region.lower")
        upper = _vector(reg["upper"], 2 * n + 1, "region.upper")
        if any(a >= b for a, b in zip(lower, upper)):
            raise ConfigError("lower must be below upper in every coordinate", "region")
        if reg["chart"] not in atlas.chart_names:
            raise ConfigError(f"unknown chart {reg['chart']!r}", "region.chart")
        region = Region(reg["chart"], tuple(lower), tuple(upper))
    samples = doc.get("samples", 125)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        raise ConfigError("expected an integer >= 2", "samples")
    table_path, points = None, 5
    if "table" in doc:
        tab = doc["table"]
        _check_keys(tab, {"path", "points_per_axis"}, "table")
        if not isinstance(tab.get("path"), str):
            raise ConfigError("expected a string", "table.path")
        table_path = tab["path"]
        points = tab.get("points_per_axis", 5)
        if isinstance(points, bool) or not isinstance(points, int) or points < 2:
            raise ConfigError("expected an integer >= 2", "table.points_per_axis")
    return LegendreConfig(bundle, side, section, region, samples, table_path, points)


def load_legendre_config(path) -> LegendreConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", "path") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", f"line {exc.lineno}") from exc
    return parse_legendre_config(doc)
