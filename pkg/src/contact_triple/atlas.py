"""Chart atlases for line bundles and the coordinate transition laws.

A :class:`BundleAtlas` stores charts of the base manifold together with the
overlap components between them.  Each component carries an affine base
transition ``x' = A x + b`` and a nonvanishing cocycle ``phi(x)`` fixing the
change of the linear coordinate on the dual line bundle, ``z' = phi(x) z``.
Everything else (jets, Atiyah vectors, tangent vectors) is derived from
those two pieces of data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jet as J
from .errors import NotInOverlap

MARGIN = 1e-9
SAFE_FRACTION = 0.1


@dataclass(frozen=True)
class Chart:
    name: str
    lower: tuple
    upper: tuple

    def contains(self, x, margin=MARGIN):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= np.asarray(self.lower) + margin) and np.all(x < np.asarray(self.upper) - margin))

    def safe_contains(self, x):
        """Membership in the chart shrunk by 10% of its length at each finite end."""
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        width = hi - lo
        shrink = np.where(np.isfinite(width), SAFE_FRACTION * width, 0.0)
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= lo + shrink) and np.all(x <= hi - shrink))


@dataclass(frozen=True)
class Overlap:
    """One connected component of a chart overlap, in source-chart coordinates."""

    source: str
    target: str
    lower: tuple
    upper: tuple
    matrix: np.ndarray
    offset: np.ndarray
    cocycle: Callable[[Sequence], object]
    label: str = ""

    def contains(self, x, margin=MARGIN):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= np.asarray(self.lower) + margin) and np.all(x < np.asarray(self.upper) - margin))

    def base_map(self, x):
        return self.matrix @ np.asarray(x, dtype=float) + self.offset

    def cocycle_jet(self, x):
        return J.jet_of(self.cocycle, np.asarray(x, dtype=float))


@dataclass(frozen=True)
class BundleAtlas:
    dim: int
    charts: tuple
    overlaps: tuple = ()
    name: str = "custom"

    def chart(self, name):
        for c in self.charts:
            if c.name == name:
                return c
        raise KeyError(f"no chart named {name!r}")

    @property
    def chart_names(self):
        return tuple(c.name for c in self.charts)

    def overlaps_at(self, source, x):
        return [o for o in self.overlaps if o.source == source and o.contains(x)]

    def find_overlap(self, source, target, x):
        self.chart(target)
        for o in self.overlaps:
            if o.source == source and o.target == target and o.contains(x):
                return o
        raise NotInOverlap(f"x={np.asarray(x).tolist()} is not in an overlap of charts {source!r} -> {target!r}")

    def home_chart(self, x):
        """First chart whose domain contains x (used when a state names no chart)."""
        for c in self.charts:
            if c.contains(x):
                return c.name
        raise NotInOverlap(f"x={np.asarray(x).tolist()} lies in no chart")


def _identity_overlap(atlas, name):
    n = atlas.dim
    c = atlas.chart(name)
    return Overlap(name, name, c.lower, c.upper, np.eye(n), np.zeros(n), lambda x: 1.0, "identity")


def trivial(n: int = 1) -> BundleAtlas:
    """The trivial line bundle over R^n: one chart, cocycle identically 1."""
    inf = math.inf
    return BundleAtlas(n, (Chart("R", (-inf,) * n, (inf,) * n),), (), name="trivial")


def moebius() -> BundleAtlas:
    """The Möbius band over the circle with two charts O = ]0, pi[ and U = ]pi/2, 3pi/2[.

    The overlap has two components: on ]pi/2, pi[ the transition is the
    identity with cocycle +1, on ]0, pi/2[ (seen from O) the base shifts by pi
    and the fibre coordinate flips sign.
    """
    pi = math.pi
    one = np.eye(1)

    def plus(x):
        return 1.0

    def minus(x):
        return -1.0

    charts = (Chart("O", (0.0,), (pi,)), Chart("U", (pi / 2,), (3 * pi / 2,)))
    overlaps = (
        Overlap("O", "U", (pi / 2,), (pi,), one, np.zeros(1), plus, "O12^1"),
        Overlap("O", "U", (0.0,), (pi / 2,), one, np.array([pi]), minus, "O12^2"),
        Overlap("U", "O", (pi / 2,), (pi,), one, np.zeros(1), plus, "O12^1"),
        Overlap("U", "O", (pi,), (3 * pi / 2,), one, np.array([-pi]), minus, "O12^2"),
    )
    return BundleAtlas(1, charts, overlaps, name="moebius")


@dataclass(frozen=True)
class ContactCoords:
    """A point (x, p, z) of J^1 L* in a chart."""

    chart: str
    x: np.ndarray
    p: np.ndarray
    z: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "p", np.atleast_1d(np.asarray(self.p, dtype=float)))
        object.__setattr__(self, "z", float(self.z))

    def as_array(self):
        return np.concatenate([self.x, self.p, [self.z]])

    @classmethod
    def from_array(cls, chart, arr):
        n = (len(arr) - 1) // 2
        return cls(chart, arr[:n], arr[n : 2 * n], arr[2 * n])


@dataclass(frozen=True)
class AtiyahCoords:
    """A point (x, xdot, t) of the Atiyah algebroid A L^x in a chart."""

    chart: str
    x: np.ndarray
    xdot: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "xdot", np.atleast_1d(np.asarray(self.xdot, dtype=float)))
        object.__setattr__(self, "t", float(self.t))

    def as_array(self):
        return np.concatenate([self.x, self.xdot, [self.t]])

    @classmethod
    def from_array(cls, chart, arr):
        n = (len(arr) - 1) // 2
        return cls(chart, arr[:n], arr[n : 2 * n], arr[2 * n])


@dataclass(frozen=True)
class CoverCoords:
    """A point (x, tau, pi, z) of T* L^x; tau is the fibre coordinate of L^x."""

    chart: str
    x: np.ndarray
    tau: float
    pi: np.ndarray
    z: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "pi", np.atleast_1d(np.asarray(self.pi, dtype=float)))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "z", float(self.z))
        if self.tau == 0.0:
            raise ValueError("tau must be nonzero on L^x")

    def as_array(self):
        return np.concatenate([self.x, [self.tau], self.pi, [self.z]])


def _component(atlas, source, target, x):
    if source == target:
        return _identity_overlap(atlas, source)
    return atlas.find_overlap(source, target, x)


def transition_contact(atlas: BundleAtlas, u: ContactCoords, target: str) -> ContactCoords:
    """x' = A x + b,  z' = phi z,  p' = A^{-T} (z grad(phi) + phi p)."""
    o = _component(atlas, u.chart, target, u.x)
    phi = o.cocycle_jet(u.x)
    p_new = np.linalg.solve(o.matrix.T, u.z * phi.grad + phi.value * u.p)
    return ContactCoords(target, o.base_map(u.x), p_new, phi.value * u.z)


def transition_atiyah(atlas: BundleAtlas, v: AtiyahCoords, target: str) -> AtiyahCoords:
    """x' = A x + b,  xdot' = A xdot,  t' = t - grad(phi).xdot / phi."""
    o = _component(atlas, v.chart, target, v.x)
    phi = o.cocycle_jet(v.x)
    t_new = v.t - float(phi.grad @ v.xdot) / phi.value
    return AtiyahCoords(target, o.base_map(v.x), o.matrix @ v.xdot, t_new)


def transition_jacobian(atlas: BundleAtlas, u: ContactCoords, target: str) -> np.ndarray:
    """Exact Jacobian of :func:`transition_contact` in the ordering (x, p, z)."""
    n = atlas.dim
    o = _component(atlas, u.chart, target, u.x)
    phi = o.cocycle_jet(u.x)
    A = o.matrix
    AinvT = np.linalg.inv(A).T
    Jm = np.zeros((2 * n + 1, 2 * n + 1))
    Jm[:n, :n] = A
    Jm[n : 2 * n, :n] = AinvT @ (u.z * phi.hess + np.outer(u.p, phi.grad))
    Jm[n : 2 * n, n : 2 * n] = phi.value * AinvT
    Jm[n : 2 * n, 2 * n] = AinvT @ phi.grad
    Jm[2 * n, :n] = u.z * phi.grad
    Jm[2 * n, 2 * n] = phi.value
    return Jm


def pushforward_contact_tangent(atlas: BundleAtlas, u: ContactCoords, w, target: str):
    """Push a tangent vector w = (xdot, pdot, zdot) at u through the transition to ``target``.

    Returns the transformed components as a tuple (xdot', pdot', zdot').
    """
    n = atlas.dim
    xdot, pdot, zdot = w
    vec = np.concatenate([np.atleast_1d(xdot), np.atleast_1d(pdot), [float(zdot)]])
    out = transition_jacobian(atlas, u, target) @ vec
    return out[:n], out[n : 2 * n], float(out[2 * n])


@dataclass
class AtlasReport:
    cocycle_violation: float = 0.0
    inverse_violation: float = 0.0
    failures: list = field(default_factory=list)
    tolerance: float = 1e-12

    @property
    def max_violation(self):
        return max(self.cocycle_violation, self.inverse_violation)

    @property
    def passed(self):
        return not self.failures and self.max_violation <= self.tolerance


def _sample_box(lower, upper, samples, rng):
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    lo = np.where(np.isfinite(lo), lo, -10.0)
    hi = np.where(np.isfinite(hi), hi, 10.0)
    width = hi - lo
    # keep away from the open ends so that membership tests are unambiguous
    pad = 1e-6 * width + 2 * MARGIN
    return rng.uniform(lo + pad, hi - pad, size=(samples, len(lo)))


def validate_atlas(atlas: BundleAtlas, samples: int = 64, seed: int = 0) -> AtlasReport:
    """Check the cocycle identity and invertibility of every overlap on sampled points."""
    report = AtlasReport()
    rng = np.random.default_rng(seed)
    for o in atlas.overlaps:
        for x in _sample_box(o.lower, o.upper, samples, rng):
            y = o.base_map(x)
            back = [r for r in atlas.overlaps if r.source == o.target and r.target == o.source and r.contains(y)]
            if not back:
                report.failures.append(f"{o.source}->{o.target} [{o.label}]: no inverse component at x={x.tolist()}")
                break
            r = back[0]
            report.inverse_violation = max(report.inverse_violation, float(np.max(np.abs(r.base_map(y) - x))))
            prod = float(J.value_of(o.cocycle(list(x)))) * float(J.value_of(r.cocycle(list(y))))
            report.cocycle_violation = max(report.cocycle_violation, abs(prod - 1.0))
    return report
