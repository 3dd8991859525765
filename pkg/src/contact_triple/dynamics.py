"""Contact Hamiltonian fields, their homogeneous lifts, and Lagrangian/Herglotz dynamics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .atlas import AtiyahCoords, ContactCoords, CoverCoords
from .errors import SingularHessian
from .triple import ContactTangent

COND_LIMIT = 1e12


@dataclass(frozen=True)
class CoverTangent:
    """Components (xdot, taudot, pidot, zdot) of a vector on T*L^x."""

    base: CoverCoords
    xdot: np.ndarray
    taudot: float
    pidot: np.ndarray
    zdot: float


def _require(section, kind):
    if section.kind != kind:
        raise ValueError(f"expected a {kind} section, got {section.kind}")


def contact_field(h, u: ContactCoords) -> ContactTangent:
    """xdot = h_p,  pdot = -(h_x + p h_z),  zdot = p.h_p - h."""
    _require(h, "hamiltonian")
    n = len(u.x)
    jt = h.jet(u.chart, u.as_array())
    hx, hp, hz = jt.grad[:n], jt.grad[n : 2 * n], jt.grad[2 * n]
    return ContactTangent(u, hp.copy(), -(hx + u.p * hz), float(u.p @ hp - jt.value))


def lifted_field(h, c: CoverCoords) -> CoverTangent:
    """Hamiltonian vector field of H = tau h(x, pi/tau, z) for dz^dtau + dpi^dx."""
    _require(h, "hamiltonian")
    n = len(c.x)
    p = c.pi / c.tau
    jt = h.jet(c.chart, np.concatenate([c.x, p, [c.z]]))
    hx, hp, hz = jt.grad[:n], jt.grad[n : 2 * n], jt.grad[2 * n]
    return CoverTangent(c, hp.copy(), c.tau * hz, -c.tau * hx, float(p @ hp - jt.value))


def project_cover_tangent(w: CoverTangent) -> ContactTangent:
    """Push a cover vector through the derivative of (x, tau, pi, z) -> (x, pi/tau, z)."""
    c = w.base
    pdot = w.pidot / c.tau - c.pi * w.taudot / c.tau**2
    return ContactTangent(ContactCoords(c.chart, c.x, c.pi / c.tau, c.z), w.xdot, pdot, w.zdot)


def lagrangian_implicit(l, v: AtiyahCoords) -> ContactTangent:
    """The element of the Lagrangian dynamics over v (p, z from the fibre derivative)."""
    _require(l, "lagrangian")
    n = len(v.x)
    jt = l.jet(v.chart, v.as_array())
    lx, lv, lt = jt.grad[:n], jt.grad[n : 2 * n], jt.grad[2 * n]
    base = ContactCoords(v.chart, v.x, lv, lt)
    return ContactTangent(base, v.xdot.copy(), lx - v.t * lv, float(jt.value - v.t * lt))


def condition_number(H):
    """2-norm condition number; inf for exactly singular or non-finite matrices."""
    H = np.atleast_2d(H)
    if not np.all(np.isfinite(H)):
        return math.inf
    s = np.linalg.svd(H, compute_uv=False)
    if s[-1] == 0.0:
        return math.inf
    return float(s[0] / s[-1])


def solve_regular(H, rhs, what="Hessian"):
    """Dense LU solve with partial pivoting, refusing ill-conditioned systems."""
    cond = condition_number(H)
    if cond > COND_LIMIT:
        raise SingularHessian(f"{what} is singular (condition number {cond:.3e})", cond)
    return scipy.linalg.lu_solve(scipy.linalg.lu_factor(H), rhs)


def euler_lagrange_rhs(l, chart, state):
    """Accelerations (xddot, tdot) of the contact Euler-Lagrange equations at (x, xdot, t).

    Expands d/ds l_v = l_x - t l_v and d/ds l_t = l - t l_t along the curve
    and solves for the second derivatives with the (v, t)-Hessian of l.
    """
    _require(l, "lagrangian")
    state = np.asarray(state, dtype=float)
    n = (len(state) - 1) // 2
    jt = l.jet(chart, state)
    g, Hs = jt.grad, jt.hess
    x_, w_ = slice(0, n), slice(n, 2 * n + 1)
    xdot, t = state[n : 2 * n], state[2 * n]
    lx, lv, lt = g[:n], g[n : 2 * n], g[2 * n]
    target = np.concatenate([lx - t * lv, [jt.value - t * lt]])
    rhs = target - Hs[w_, x_] @ xdot
    acc = solve_regular(Hs[w_, w_], rhs, "(xdot, t)-Hessian")
    return acc[:n], float(acc[n])


def herglotz_rhs(lbar, chart, state):
    """(xddot, zdot) of the Herglotz equations at (x, xdot, z), with zdot = lbar substituted."""
    _require(lbar, "herglotz")
    state = np.asarray(state, dtype=float)
    n = (len(state) - 1) // 2
    jt = lbar.jet(chart, state)
    g, Hs = jt.grad, jt.hess
    xdot = state[n : 2 * n]
    lx, lv, lz = g[:n], g[n : 2 * n], g[2 * n]
    zdot = jt.value
    rhs = lx + lz * lv - Hs[n : 2 * n, :n] @ xdot - Hs[n : 2 * n, 2 * n] * zdot
    acc = solve_regular(Hs[n : 2 * n, n : 2 * n], rhs, "xdot-Hessian")
    return acc, float(zdot)


def vector_field(section):
    """First-order right-hand side f(chart, y) for the state layout of ``section.kind``.

    hamiltonian: y = (x, p, z); lagrangian: y = (x, xdot, t); herglotz: y = (x, xdot, z).
    """
    if section.kind == "hamiltonian":

        def f(chart, y):
            return contact_field(section, ContactCoords.from_array(chart, y)).velocity()

    elif section.kind == "lagrangian":

        def f(chart, y):
            n = (len(y) - 1) // 2
            acc, tdot = euler_lagrange_rhs(section, chart, y)
            return np.concatenate([y[n : 2 * n], acc, [tdot]])

    else:

        def f(chart, y):
            n = (len(y) - 1) // 2
            acc, zdot = herglotz_rhs(section, chart, y)
            return np.concatenate([y[n : 2 * n], acc, [zdot]])

    return f
