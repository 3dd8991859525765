"""Coordinate form of the maps in the contact Tulczyjew triple.

Hamiltonian side:  beta0 : A T*L^x -> J^1 L*_{T*L^x},   beta = anchor o beta0^{-1}
Lagrangian side:   alpha0: A T*L^x -> J^1 L*_{TL^x},    alpha = anchor o alpha0^{-1}
and R = beta0 o alpha0^{-1} linking the two jet bundles.

A T*L^x is represented by :class:`AtiyahTangent`, the 7-tuple
(x, p, z, xdot, pdot, zdot, t).  Its anchor simply forgets t.

alpha0 uses mu = zdot + t z and alpha uses zdot = mu - t mu_t; these are
the only signs compatible with R, beta and the Lagrangian dynamics.
``flip_mu_sign=True`` switches alpha0 to mu = zdot - t z, which exists so
the consistency checks can be shown to reject it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jet as J
from .atlas import AtiyahCoords, ContactCoords, CoverCoords
from .errors import BasePointMismatch, ChartMismatch


@dataclass(frozen=True)
class HamiltonianJet:
    """A point of J^1 L*_{T*L^x}: (x, p, z) plus (Zx, Zp, Zz, Z)."""

    base: ContactCoords
    Zx: np.ndarray
    Zp: np.ndarray
    Zz: float
    Z: float

    def as_array(self):
        return np.concatenate([self.base.as_array(), self.Zx, self.Zp, [self.Zz, self.Z]])


@dataclass(frozen=True)
class LagrangianJet:
    """A point of J^1 L*_{TL^x}: (x, xdot, t) plus (mu_x, mu_xdot, mu_t, mu)."""

    base: AtiyahCoords
    mux: np.ndarray
    muxd: np.ndarray
    mut: float
    mu: float

    def as_array(self):
        return np.concatenate([self.base.as_array(), self.mux, self.muxd, [self.mut, self.mu]])


@dataclass(frozen=True)
class ContactTangent:
    base: ContactCoords
    xdot: np.ndarray
    pdot: np.ndarray
    zdot: float

    def as_array(self):
        return np.concatenate([self.base.as_array(), self.xdot, self.pdot, [self.zdot]])

    def velocity(self):
        return np.concatenate([self.xdot, self.pdot, [self.zdot]])


@dataclass(frozen=True)
class AtiyahTangent:
    """Internal coordinates (x, p, z, xdot, pdot, zdot, t) on A T*L^x."""

    base: ContactCoords
    xdot: np.ndarray
    pdot: np.ndarray
    zdot: float
    t: float

    def as_array(self):
        return np.concatenate([self.base.as_array(), self.xdot, self.pdot, [self.zdot, self.t]])


def hamiltonian_jet(h, u: ContactCoords) -> HamiltonianJet:
    """First jet j^1 h(u) of a Hamiltonian section."""
    n = len(u.x)
    jt = h.jet(u.chart, u.as_array())
    g = jt.grad
    return HamiltonianJet(u, g[:n].copy(), g[n : 2 * n].copy(), float(g[2 * n]), jt.value)


def lagrangian_jet(l, v: AtiyahCoords) -> LagrangianJet:
    """First jet j^1 l(v) of a Lagrangian section."""
    n = len(v.x)
    jt = l.jet(v.chart, v.as_array())
    g = jt.grad
    return LagrangianJet(v, g[:n].copy(), g[n : 2 * n].copy(), float(g[2 * n]), jt.value)


def pairing(v: AtiyahCoords, u: ContactCoords, atol: float = 1e-12) -> float:
    """The L*-valued pairing xdot.p + t z, in the chart's trivialization."""
    if v.chart != u.chart:
        raise ChartMismatch(f"pairing of points in charts {v.chart!r} and {u.chart!r}")
    if v.x.shape != u.x.shape or np.max(np.abs(v.x - u.x)) > atol:
        raise BasePointMismatch(f"base points differ: {v.x.tolist()} vs {u.x.tolist()}")
    return float(v.xdot @ u.p + v.t * u.z)


def lift_hamiltonian(h, c: CoverCoords):
    """The 1-homogeneous function H = tau h(x, pi/tau, z) on T*L^x."""
    args = list(c.x) + list(c.pi / c.tau) + [c.z]
    return c.tau * h.value(c.chart, args)


def lift_hamiltonian_jet(h, c: CoverCoords) -> J.Jet:
    """H as a jet over the cover coordinates ordered (x, tau, pi, z)."""
    n = len(c.x)
    v = J.seed(c.as_array())
    xs, tau, pis, z = v[:n], v[n], v[n + 1 : 2 * n + 1], v[2 * n + 1]
    return tau * h(c.chart, xs + [p / tau for p in pis] + [z])


def project_cover(c: CoverCoords) -> ContactCoords:
    return ContactCoords(c.chart, c.x, c.pi / c.tau, c.z)


def anchor(a: AtiyahTangent) -> ContactTangent:
    return ContactTangent(a.base, a.xdot, a.pdot, a.zdot)


def beta(j: HamiltonianJet) -> ContactTangent:
    p = j.base.p
    return ContactTangent(j.base, j.Zp.copy(), -j.Zx - j.Zz * p, float(p @ j.Zp - j.Z))


def beta0(a: AtiyahTangent) -> HamiltonianJet:
    p, t = a.base.p, a.t
    return HamiltonianJet(a.base, -a.pdot - t * p, a.xdot.copy(), t, float(p @ a.xdot - a.zdot))


def beta0_inverse(j: HamiltonianJet) -> AtiyahTangent:
    p, t = j.base.p, j.Zz
    return AtiyahTangent(j.base, j.Zp.copy(), -j.Zx - t * p, float(p @ j.Zp - j.Z), t)


def alpha(j: LagrangianJet) -> ContactTangent:
    t = j.base.t
    base = ContactCoords(j.base.chart, j.base.x, j.muxd, j.mut)
    return ContactTangent(base, j.base.xdot.copy(), j.mux - t * j.muxd, j.mu - t * j.mut)


def alpha0(a: AtiyahTangent, flip_mu_sign: bool = False) -> LagrangianJet:
    p, z, t = a.base.p, a.base.z, a.t
    mu = a.zdot - t * z if flip_mu_sign else a.zdot + t * z
    base = AtiyahCoords(a.base.chart, a.base.x, a.xdot, t)
    return LagrangianJet(base, a.pdot + t * p, p.copy(), z, mu)


def alpha0_inverse(j: LagrangianJet) -> AtiyahTangent:
    t = j.base.t
    base = ContactCoords(j.base.chart, j.base.x, j.muxd, j.mut)
    return AtiyahTangent(base, j.base.xdot.copy(), j.mux - t * j.muxd, j.mu - t * j.mut, t)


def R_iso(j: LagrangianJet) -> HamiltonianJet:
    v = j.base
    base = ContactCoords(v.chart, v.x, j.muxd, j.mut)
    return HamiltonianJet(base, -j.mux, v.xdot.copy(), v.t, float(j.muxd @ v.xdot + v.t * j.mut - j.mu))


def symplectic_residual(h, c: CoverCoords, field=None) -> float:
    """Max-norm of omega(., X_H) - dH at c for omega = dz^dtau + dpi_i^dx^i.

    ``X_H`` is :func:`dynamics.lifted_field` unless ``field`` (a
    :class:`dynamics.CoverTangent`) is supplied.
    """
    from .dynamics import lifted_field

    X = field if field is not None else lifted_field(h, c)
    dH = lift_hamiltonian_jet(h, c).grad
    # omega(., X) in the ordering (x, tau, pi, z)
    contracted = np.concatenate([-X.pidot, [-X.zdot], X.xdot, [X.taudot]])
    return float(np.max(np.abs(contracted - dH)))
