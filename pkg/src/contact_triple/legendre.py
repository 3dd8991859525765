"""Contact Legendre maps, hyperregularity diagnostics and the Legendre transformation.

The Legendre map of a Lagrangian is its fibre derivative
(x, xdot, t) -> (x, l_xdot, l_t); that of a Hamiltonian is
(x, p, z) -> (x, h_p, h_z).  For hyperregular sections the transform

    h(u) = <u, lambda_l^{-1}(u)> - l(lambda_l^{-1}(u))

(and symmetrically for l from h) is evaluated pointwise by Newton's method,
with first and second derivatives supplied by implicit differentiation.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .atlas import AtiyahCoords, ContactCoords
from .dynamics import COND_LIMIT, condition_number, solve_regular
from .errors import NoConvergence, NotHyperregular, NumericalError
from .jet import Jet
from .sections import ScalarSection

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50
MEMO_QUANTUM = 1e-12


def _fiber(jt, n):
    return jt.grad[n:], jt.hess[n:, n:]


def legendre_from_lagrangian(l, v: AtiyahCoords) -> ContactCoords:
    n = len(v.x)
    g = l.jet(v.chart, v.as_array()).grad
    return ContactCoords(v.chart, v.x, g[n : 2 * n], g[2 * n])


def legendre_from_hamiltonian(h, u: ContactCoords) -> AtiyahCoords:
    n = len(u.x)
    g = h.jet(u.chart, u.as_array()).grad
    return AtiyahCoords(u.chart, u.x, g[n : 2 * n], g[2 * n])


def _newton_fiber(section, chart, x, target, guess):
    """Solve grad_fiber(section)(x, w) = target for w."""
    n = len(x)
    w = np.array(guess, dtype=float)
    scale = max(1.0, float(np.max(np.abs(target))))
    residual = math.inf
    for _ in range(NEWTON_MAXITER):
        jt = section.jet(chart, np.concatenate([x, w]))
        grad, hess = _fiber(jt, n)
        F = grad - target
        residual = float(np.max(np.abs(F)))
        if residual <= NEWTON_TOL * scale:
            return w, jt
        w = w - solve_regular(hess, F, "fibre Hessian")
    jt = section.jet(chart, np.concatenate([x, w]))
    residual = float(np.max(np.abs(_fiber(jt, n)[0] - target)))
    if residual <= NEWTON_TOL * scale:
        return w, jt
    raise NoConvergence(residual, NEWTON_MAXITER)


def invert_legendre(l, u: ContactCoords, guess: AtiyahCoords | None = None) -> AtiyahCoords:
    """lambda_l^{-1}(u) by Newton iteration on (l_xdot - p, l_t - z)."""
    target = np.concatenate([u.p, [u.z]])
    w0 = np.zeros_like(target) if guess is None else np.concatenate([guess.xdot, [guess.t]])
    w, _ = _newton_fiber(l, u.chart, u.x, target, w0)
    n = len(u.x)
    return AtiyahCoords(u.chart, u.x, w[:n], w[n])


def invert_hamiltonian_legendre(h, v: AtiyahCoords, guess: ContactCoords | None = None) -> ContactCoords:
    """lambda_h^{-1}(v) by Newton iteration on (h_p - xdot, h_z - t)."""
    target = np.concatenate([v.xdot, [v.t]])
    w0 = np.zeros_like(target) if guess is None else np.concatenate([guess.p, [guess.z]])
    w, _ = _newton_fiber(h, v.chart, v.x, target, w0)
    n = len(v.x)
    return ContactCoords(v.chart, v.x, w[:n], w[n])


class LegendreDualEvaluator:
    """Evaluates the Legendre transform of ``source`` in one chart.

    For a fibre point q the source is inverted at w = lambda^{-1}(q); then
    value = q.w - f, gradient (-f_x, w) and Hessian blocks
    g_qq = A^{-1}, g_qx = -A^{-1} f_wx, g_xx = -f_xx + f_xw A^{-1} f_wx with
    A = f_ww.  Results are memoized on a 1e-12 lattice; Newton is warm-started
    from the previous query.
    """

    def __init__(self, source, chart, memoize=True):
        self.source = source
        self.chart = chart
        self.memoize = memoize
        self._memo = {}
        self._last = None
        self._lock = threading.Lock()

    def _solve(self, point):
        point = np.asarray(point, dtype=float)
        n = (len(point) - 1) // 2
        key = None
        if self.memoize:
            key = tuple(int(round(v / MEMO_QUANTUM)) if abs(v) < 1e6 else v for v in point)
            with self._lock:
                hit = self._memo.get(key)
            if hit is not None:
                return hit
        x, q = point[:n], point[n:]
        with self._lock:
            last = self._last
        starts = [last] if last is not None else []
        starts.append(np.zeros(n + 1))
        err = None
        for w0 in starts:
            try:
                w, jt = _newton_fiber(self.source, self.chart, x, q, w0)
                break
            except NumericalError as exc:
                err = exc
        else:
            raise err
        out = (x, q, w, jt)
        with self._lock:
            self._last = w
            if key is not None:
                self._memo[key] = out
        return out

    def value(self, point):
        _, q, w, jt = self._solve(point)
        return float(q @ w - jt.value)

    def jet(self, point):
        x, q, w, jt = self._solve(point)
        n = len(x)
        g, H = jt.grad, jt.hess
        Hxx, Hxw, Hww = H[:n, :n], H[:n, n:], H[n:, n:]
        Ainv = np.linalg.inv(Hww)
        gqx = -Ainv @ Hxw.T
        hess = np.zeros((2 * n + 1, 2 * n + 1))
        hess[:n, :n] = -Hxx + Hxw @ Ainv @ Hxw.T
        hess[n:, n:] = 0.5 * (Ainv + Ainv.T)
        hess[n:, :n] = gqx
        hess[:n, n:] = gqx.T
        grad = np.concatenate([-g[:n], w])
        return Jet(q @ w - jt.value, grad, hess)


@dataclass(frozen=True)
class Region:
    """A box in the 2n+1 chart coordinates of a section."""

    chart: str
    lower: tuple
    upper: tuple


@dataclass
class LegendreDiagnostics:
    sampled_condition_max: float
    injectivity_violations: int
    samples: int
    verdict: str = ""

    def __post_init__(self):
        degenerate = self.sampled_condition_max > COND_LIMIT or self.injectivity_violations > 0
        self.verdict = "degenerate" if degenerate else "hyperregular-on-samples"

    @property
    def hyperregular(self):
        return self.verdict == "hyperregular-on-samples"


def default_regions(section, fiber_span=2.0):
    n = section.dim
    regions = []
    for c in section.atlas.charts:
        lo = np.asarray(c.lower, dtype=float)
        hi = np.asarray(c.upper, dtype=float)
        finite = np.isfinite(lo) & np.isfinite(hi)
        width = np.where(finite, hi - lo, 0.0)
        lo = np.where(finite, lo + 0.05 * width, -1.0)
        hi = np.where(finite, hi - 0.05 * width, 1.0)
        lower = tuple(lo) + (-fiber_span,) * (n + 1)
        upper = tuple(hi) + (fiber_span,) * (n + 1)
        regions.append(Region(c.name, lower, upper))
    return regions


def _grid(region, samples):
    d = len(region.lower)
    k = max(2, int(round(samples ** (1.0 / d))))
    axes = [np.linspace(a, b, k) for a, b in zip(region.lower, region.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def hyperregularity_probe(section, region: Region | None = None, samples: int = 125) -> LegendreDiagnostics:
    """Sampled necessary conditions for the Legendre map to be a diffeomorphism.

    Records the worst condition number of the fibre Hessian on a regular grid
    and counts grid points whose images land in an already occupied cell of
    size 1e-6 times the image diameter.
    """
    regions = [region] if region is not None else default_regions(section)
    n = section.dim
    cond_max = 0.0
    violations = 0
    total = 0
    for reg in regions:
        pts = _grid(reg, samples)
        images = np.empty_like(pts)
        for i, pt in enumerate(pts):
            jt = section.jet(reg.chart, pt)
            grad, hess = _fiber(jt, n)
            cond_max = max(cond_max, condition_number(hess))
            images[i, :n] = pt[:n]
            images[i, n:] = grad
        total += len(pts)
        diameter = float(np.linalg.norm(images.max(axis=0) - images.min(axis=0)))
        cell = 1e-6 * diameter if diameter > 0 else 1.0
        seen = set()
        for img in images:
            key = tuple(np.floor(img / cell).astype(np.int64))
            if key in seen:
                violations += 1
            seen.add(key)
    return LegendreDiagnostics(cond_max, violations, total)


def _transform(section, target_kind, region, samples, memoize):
    diag = hyperregularity_probe(section, region, samples)
    if not diag.hyperregular:
        raise NotHyperregular(
            f"{section.kind} section {section.name!r} is degenerate "
            f"(condition {diag.sampled_condition_max:.3e}, {diag.injectivity_violations} collisions)",
            diag,
        )
    evaluators = {c: LegendreDualEvaluator(section, c, memoize) for c in section.atlas.chart_names}
    return ScalarSection(target_kind, section.atlas, evaluators, f"legendre({section.name})")


def hamiltonian_from_lagrangian(l, region: Region | None = None, samples: int = 125, memoize=True) -> ScalarSection:
    """h(u) = Pi(lambda_l^{-1}(u), u) - l(lambda_l^{-1}(u)) for a hyperregular l."""
    if l.kind != "lagrangian":
        raise ValueError("expected a lagrangian section")
    return _transform(l, "hamiltonian", region, samples, memoize)


def lagrangian_from_hamiltonian(h, region: Region | None = None, samples: int = 125, memoize=True) -> ScalarSection:
    """l(v) = Pi(v, lambda_h^{-1}(v)) - h(lambda_h^{-1}(v)) for a hyperregular h."""
    if h.kind != "hamiltonian":
        raise ValueError("expected a hamiltonian section")
    return _transform(h, "lagrangian", region, samples, memoize)
