"""Scalar sections: contact Hamiltonians, Lagrangians and Herglotz Lagrangians.

A section is stored chart by chart.  In each chart it is an evaluator of
2n+1 real arguments ordered as

* hamiltonian: (x, p, z) on J^1 L*
* lagrangian:  (x, xdot, t) on A L^x
* herglotz:    (x, xdot, z) on T M x R (trivial bundles only)

and its values transform like the fibre coordinate of L*, value' = phi * value.
"""

from __future__ import annotations

import math
from typing import Callable, Mapping

import numpy as np

from . import atlas as A
from . import expr as E
from . import jet as J

KINDS = ("hamiltonian", "lagrangian", "herglotz")


class NativeEvaluator:
    """Wraps a callable written with +,-,*,/ and the functions of :mod:`jet`."""

    def __init__(self, fn: Callable):
        self.fn = fn

    def value(self, point):
        return float(J.value_of(self.fn(list(point))))

    def jet(self, point):
        return J.jet_of(self.fn, np.asarray(point, dtype=float))


class ScalarSection:
    def __init__(self, kind, atlas, evaluators: Mapping[str, object], name="section"):
        if kind not in KINDS:
            raise ValueError(f"unknown section kind {kind!r}")
        if kind == "herglotz" and atlas.overlaps:
            raise ValueError("Herglotz Lagrangians are only defined on trivial bundles")
        missing = set(atlas.chart_names) - set(evaluators)
        if missing:
            raise ValueError(f"section {name!r} has no evaluator for charts {sorted(missing)}")
        self.kind = kind
        self.atlas = atlas
        self.evaluators = {
            k: (v if hasattr(v, "jet") else NativeEvaluator(v)) for k, v in evaluators.items()
        }
        self.name = name

    @property
    def dim(self):
        return self.atlas.dim

    def __repr__(self):
        return f"ScalarSection({self.kind!r}, {self.name!r}, atlas={self.atlas.name!r})"

    def value(self, chart, point) -> float:
        return self.evaluators[chart].value(np.asarray(point, dtype=float))

    def jet(self, chart, point) -> J.Jet:
        """Value, gradient and Hessian over the 2n+1 chart arguments."""
        return self.evaluators[chart].jet(np.asarray(point, dtype=float))

    def __call__(self, chart, args):
        """Evaluate on arguments that may themselves be jets (chain rule applied)."""
        if not any(isinstance(a, J.Jet) for a in args):
            return self.value(chart, [float(a) for a in args])
        point = [J.value_of(a) for a in args]
        return self.jet(chart, point).compose(list(args))


def _quad(M, v):
    n = len(v)
    acc = 0.0
    for i in range(n):
        for j in range(n):
            if M[i][j] != 0.0:
                acc = acc + M[i][j] * v[i] * v[j]
    return acc


def _metric(metric, n):
    g = np.eye(n) if metric is None else np.asarray(metric, dtype=float)
    if g.shape != (n, n) or not np.allclose(g, g.T):
        raise ValueError("metric must be a symmetric n x n matrix")
    if np.any(np.linalg.eigvalsh(g) <= 0):
        raise ValueError("metric must be positive definite")
    return g


def _on_all_charts(atlas, fn):
    return {c: fn for c in atlas.chart_names}


def quadratic_lagrangian(n=1, metric=None, atlas=None) -> ScalarSection:
    """l(x, v, t) = (g(v, v) + t^2) / 2 for a constant metric g."""
    g = _metric(metric, n).tolist()
    atlas = atlas or A.trivial(n)

    def fn(a):
        v, t = a[n : 2 * n], a[2 * n]
        return 0.5 * (_quad(g, v) + t * t)

    return ScalarSection("lagrangian", atlas, _on_all_charts(atlas, fn), "quadratic-riemannian")


def quadratic_hamiltonian(n=1, metric=None, atlas=None) -> ScalarSection:
    """h(x, p, z) = (g^{-1}(p, p) + z^2) / 2, the Legendre dual of :func:`quadratic_lagrangian`."""
    ginv = np.linalg.inv(_metric(metric, n)).tolist()
    atlas = atlas or A.trivial(n)

    def fn(a):
        p, z = a[n : 2 * n], a[2 * n]
        return 0.5 * (_quad(ginv, p) + z * z)

    return ScalarSection("hamiltonian", atlas, _on_all_charts(atlas, fn), "quadratic")


def damped_hamiltonian(n=1, m=1.0, lam=0.5, metric=None) -> ScalarSection:
    """h(x, p, z) = |p|^2 / 2m + lam z: free motion with linear friction."""
    ginv = np.linalg.inv(_metric(metric, n)).tolist()
    m, lam = float(m), float(lam)
    atlas = A.trivial(n)

    def fn(a):
        p, z = a[n : 2 * n], a[2 * n]
        return _quad(ginv, p) / (2.0 * m) + lam * z

    return ScalarSection("hamiltonian", atlas, _on_all_charts(atlas, fn), "damped-free")


def damped_herglotz(n=1, m=1.0, lam=0.5, metric=None) -> ScalarSection:
    """Herglotz Lagrangian m |v|^2 / 2 - lam z of the damped free particle."""
    g = _metric(metric, n).tolist()
    m, lam = float(m), float(lam)
    atlas = A.trivial(n)

    def fn(a):
        v, z = a[n : 2 * n], a[2 * n]
        return 0.5 * m * _quad(g, v) - lam * z

    return ScalarSection("herglotz", atlas, _on_all_charts(atlas, fn), "damped-herglotz")


def moebius_form(a):
    """F1 = cos(x)/2 (v^2 - t^2) + sin(x) t v, the Lagrangian in chart O."""
    x, v, t = a
    return 0.5 * J.cos(x) * (v * v - t * t) + J.sin(x) * t * v


def moebius_form_shifted(a):
    """F2(y, v, t) = -F1(y - pi, v, t), the Lagrangian in chart U.

    Mathematically this is the same expression as F1; writing it through the
    shift makes F2(x + pi) = -F1(x) hold bit for bit whenever x + pi is exact.
    """
    y, v, t = a
    return -moebius_form([y - math.pi, v, t])


def moebius_lagrangian(atlas=None) -> ScalarSection:
    """Hyperregular Lagrangian on the Möbius band (charts O and U).

    On the overlap component where the base shifts by pi the value changes
    sign, exactly as the cocycle -1 requires.
    """
    atlas = atlas or A.moebius()
    return ScalarSection(
        "lagrangian", atlas, {"O": moebius_form, "U": moebius_form_shifted}, "moebius-hyperregular"
    )


def from_expr(kind: str, source: str, params: Mapping[str, float] | None = None, n: int = 1) -> ScalarSection:
    """Section on the trivial bundle over R^n defined by DSL text."""
    params = dict(params or {})
    e = E.parse(source, E.signature_for(kind, n), tuple(params))
    return from_parsed(kind, e, params, n)


def from_parsed(kind, e, params, n):
    atlas = A.trivial(n)
    ev = _ExprEvaluator(e, params)
    return ScalarSection(kind, atlas, {c: ev for c in atlas.chart_names}, str(e))


class _ExprEvaluator:
    def __init__(self, e, params):
        self.e = e
        self.fn = E.as_function(e, params)
        self.params = params

    def value(self, point):
        return float(J.value_of(self.fn([float(v) for v in point])))

    def jet(self, point):
        return J.jet_of(self.fn, np.asarray(point, dtype=float))


def check_compatibility(section: ScalarSection, samples: int = 64, seed: int = 0, span: float = 3.0) -> float:
    """Largest |value_j(transitioned arg) - phi * value_i(arg)| over sampled overlap points."""
    at = section.atlas
    n = at.dim
    rng = np.random.default_rng(seed)
    worst = 0.0
    for o in at.overlaps:
        for x in A._sample_box(o.lower, o.upper, samples, rng):
            fib = rng.uniform(-span, span, size=n)
            s = rng.uniform(-span, span)
            if section.kind == "hamiltonian":
                u = A.ContactCoords(o.source, x, fib, s)
                u2 = A.transition_contact(at, u, o.target)
                a1, a2 = u.as_array(), u2.as_array()
            else:
                v = A.AtiyahCoords(o.source, x, fib, s)
                v2 = A.transition_atiyah(at, v, o.target)
                a1, a2 = v.as_array(), v2.as_array()
            phi = float(J.value_of(o.cocycle(list(x))))
            diff = abs(section.value(o.target, a2) - phi * section.value(o.source, a1))
            worst = max(worst, diff)
    return worst


