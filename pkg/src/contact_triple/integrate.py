"""Fixed-step RK4 and embedded Dormand-Prince RK45 with chart switching.

States are flat arrays in the layout of the section kind (see
:func:`dynamics.vector_field`).  After every accepted step the base point
is checked against the active chart's safe interior; when it has left it,
the state is carried to the other chart covering that point.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import atlas as A
from .dynamics import vector_field
from .errors import ChartExhausted, StepUnderflow

MIN_STEP = 1e-14

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array(_A[6] + [0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def columns(kind: str, n: int) -> list[str]:
    xs = [f"x{i}" for i in range(1, n + 1)]
    if kind == "hamiltonian":
        return xs + [f"p{i}" for i in range(1, n + 1)] + ["z"]
    last = "t" if kind == "lagrangian" else "z"
    return xs + [f"xd{i}" for i in range(1, n + 1)] + [last]


@dataclass
class SwitchEvent:
    s: float
    source: str
    target: str
    before: np.ndarray
    after: np.ndarray


@dataclass
class Trajectory:
    kind: str
    dim: int
    s: list = field(default_factory=list)
    charts: list = field(default_factory=list)
    states: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def append(self, s, chart, state):
        self.s.append(float(s))
        self.charts.append(chart)
        self.states.append(np.array(state, dtype=float))

    def __len__(self):
        return len(self.s)

    @property
    def final(self):
        return self.s[-1], self.charts[-1], self.states[-1]

    def array(self):
        return np.array(self.states)

    @property
    def columns(self):
        return columns(self.kind, self.dim)

    def write_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "chart"] + self.columns)
            for s, c, y in zip(self.s, self.charts, self.states):
                w.writerow([_fmt(s), c] + [_fmt(v) for v in y])
        events = path.with_name(path.stem + ".events.csv")
        with events.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "from", "to"])
            for e in self.events:
                w.writerow([_fmt(e.s), e.source, e.target])
        return path, events

    def to_json(self):
        return {
            "side": self.kind,
            "columns": ["s", "chart"] + self.columns,
            "samples": [
                {"s": s, "chart": c, "state": [float(v) for v in y]}
                for s, c, y in zip(self.s, self.charts, self.states)
            ],
            "events": [{"s": e.s, "from": e.source, "to": e.target} for e in self.events],
        }

    def write_json(self, path):
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), indent=1))
        return path


def _fmt(v):
    return format(float(v), ".17g")


def read_csv(path, kind, dim):
    """Inverse of :meth:`Trajectory.write_csv` (events file included when present)."""
    path = Path(path)
    traj = Trajectory(kind, dim)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    for row in rows[1:]:
        traj.append(float(row[0]), row[1], [float(v) for v in row[2:]])
    events = path.with_name(path.stem + ".events.csv")
    if events.exists():
        with events.open(newline="") as fh:
            for row in list(csv.reader(fh))[1:]:
                traj.events.append(SwitchEvent(float(row[0]), row[1], row[2], None, None))
    return traj


def transition_state(atlas, kind, chart, y, target):
    if kind == "hamiltonian":
        u = A.transition_contact(atlas, A.ContactCoords.from_array(chart, y), target)
        return u.as_array()
    if kind == "lagrangian":
        v = A.transition_atiyah(atlas, A.AtiyahCoords.from_array(chart, y), target)
        return v.as_array()
    raise ChartExhausted("Herglotz states cannot change chart")


def _maybe_switch(atlas, kind, s, chart, y, traj):
    n = atlas.dim
    x = y[:n]
    if atlas.chart(chart).safe_contains(x):
        return chart, y
    for o in atlas.overlaps_at(chart, x):
        y2 = transition_state(atlas, kind, chart, y, o.target)
        traj.events.append(SwitchEvent(float(s), chart, o.target, y.copy(), y2.copy()))
        return o.target, y2
    if not atlas.chart(chart).contains(x):
        raise ChartExhausted(f"x={x.tolist()} at s={s} lies outside chart {chart!r} and every overlap")
    return chart, y


def _in_chart(atlas, chart, y):
    return atlas.chart(chart).contains(y[: atlas.dim])


def rk4_step(f, chart, y, h):
    k1 = f(chart, y)
    k2 = f(chart, y + 0.5 * h * k1)
    k3 = f(chart, y + 0.5 * h * k2)
    k4 = f(chart, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def dopri_step(f, chart, y, h, k1=None):
    """One Dormand-Prince step; returns (y5, error estimate, last stage)."""
    k = [f(chart, y) if k1 is None else k1]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(f(chart, yi))
    K = np.array(k)
    y5 = y + h * (_B5 @ K)
    err = h * (_E @ K)
    return y5, err, k[6]


def integrate_section(
    section,
    chart,
    y0,
    duration,
    method="rk45",
    step=0.01,
    abs_tol=1e-9,
    rel_tol=1e-9,
    max_steps=1_000_000,
):
    """Integrate the dynamics of ``section`` from (chart, y0) over [0, duration]."""
    f = vector_field(section)
    atlas = section.atlas
    y = np.array(y0, dtype=float)
    traj = Trajectory(section.kind, atlas.dim)
    if not _in_chart(atlas, chart, y):
        raise ChartExhausted(f"initial point x={y[: atlas.dim].tolist()} is not inside chart {chart!r}")
    traj.append(0.0, chart, y)
    chart, y = _maybe_switch(atlas, section.kind, 0.0, chart, y, traj)
    if traj.events:
        traj.charts[-1], traj.states[-1] = chart, y.copy()
    if method == "rk4":
        _run_rk4(f, atlas, section.kind, chart, y, duration, step, traj, max_steps)
    elif method == "rk45":
        _run_rk45(f, atlas, section.kind, chart, y, duration, abs_tol, rel_tol, traj, max_steps, step)
    else:
        raise ValueError(f"unknown integrator {method!r}")
    return traj


def _run_rk4(f, atlas, kind, chart, y, duration, step, traj, max_steps):
    nsteps = max(1, int(math.ceil(duration / step - 1e-9)))
    if nsteps > max_steps:
        raise ValueError(f"{nsteps} steps exceed the limit {max_steps}")
    s = 0.0
    for i in range(nsteps):
        h = step if i < nsteps - 1 else duration - s
        y_new = rk4_step(f, chart, y, h)
        if not _in_chart(atlas, chart, y_new):
            raise ChartExhausted(f"step from s={s} left chart {chart!r}; reduce the step")
        s = duration if i == nsteps - 1 else s + h
        chart, y = _maybe_switch(atlas, kind, s, chart, y_new, traj)
        traj.append(s, chart, y)


def _run_rk45(f, atlas, kind, chart, y, duration, atol, rtol, traj, max_steps, h0):
    # PI controller with the usual exponents for an order-4 error estimate
    alpha, beta, safety = 0.7 / 5, 0.4 / 5, 0.9
    s = 0.0
    h = min(h0, duration)
    err_prev = 1.0
    k1 = None
    for _ in range(max_steps):
        if s >= duration:
            return
        last = s + h >= duration * (1 - 1e-15)
        if last:
            h = duration - s
        if h < MIN_STEP:
            raise StepUnderflow(f"step {h:.3e} below {MIN_STEP} at s={s}")
        y_new, err, k7 = dopri_step(f, chart, y, h, k1)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        en = float(np.sqrt(np.mean((err / scale) ** 2)))
        if not np.all(np.isfinite(y_new)) or not math.isfinite(en):
            en = math.inf
        if en <= 1.0 and _in_chart(atlas, chart, y_new):
            s = duration if last else s + h
            chart2, y = _maybe_switch(atlas, kind, s, chart, y_new, traj)
            k1 = k7 if chart2 == chart else None
            chart = chart2
            traj.append(s, chart, y)
            factor = safety * max(en, 1e-10) ** -alpha * err_prev**beta
            factor = min(5.0, max(0.2, factor))
            err_prev = max(en, 1e-4)
            h *= factor
        else:
            factor = 0.2 if not math.isfinite(en) else max(0.2, safety * en ** -(1 / 5))
            h *= min(factor, 0.5 if en <= 1.0 else 1.0)
    raise StepUnderflow(f"maximum number of steps {max_steps} reached at s={s}")
