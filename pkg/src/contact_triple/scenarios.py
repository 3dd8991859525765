"""Built-in sections and scenarios.

=====================  ===========  ==============================================
name                   side         default parameters and initial state
=====================  ===========  ==============================================
quadratic-riemannian   lagrangian   g = identity; chart R, x=0, xd=1, t=0
damped-free            hamiltonian  m=1, lam=0.5; chart R, x=0, p=1, z=0
damped-herglotz        herglotz     m=1, lam=0.5; chart R, x=0, xd=1, z=0
moebius-hyperregular   lagrangian   Möbius band; chart O, x=1.0, xd=1.0, t=0
=====================  ===========  ==============================================

Metric entries are passed as parameters ``g11, g12, ...`` (missing entries
default to the identity).  All scenarios default to rk45 over duration 10.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import sections as S
from .errors import ConfigError


@dataclass(frozen=True)
class Scenario:
    name: str
    side: str
    description: str
    params: dict
    bundle: dict
    initial: dict
    duration: float = 10.0
    integrator: dict = field(default_factory=lambda: {"method": "rk45"})


def _metric_from_params(n, params):
    g = np.eye(n)
    for i in range(n):
        for j in range(n):
            key = f"g{i + 1}{j + 1}"
            if key in params:
                g[i, j] = float(params[key])
                g[j, i] = float(params[key])
    return g


def _known(params, allowed, where):
    for k in params:
        if k not in allowed:
            raise ConfigError(f"unknown parameter {k!r} for {where}", f"{where}.params.{k}")


def build_section(name: str, n: int, params: dict | None = None, where: str | None = None):
    """Instantiate the built-in section ``name`` over an n-dimensional base.

    ``where`` prefixes the field named in a :class:`ConfigError`.
    """
    params = dict(params or {})
    where = where or name
    metric_keys = {f"g{i + 1}{j + 1}" for i in range(n) for j in range(n)}
    try:
        if name == "quadratic-riemannian":
            _known(params, metric_keys, where)
            return S.quadratic_lagrangian(n, _metric_from_params(n, params))
        if name == "quadratic-hamiltonian":
            _known(params, metric_keys, where)
            return S.quadratic_hamiltonian(n, _metric_from_params(n, params))
        if name == "damped-free":
            _known(params, metric_keys | {"m", "lam"}, where)
            return S.damped_hamiltonian(
                n, params.get("m", 1.0), params.get("lam", 0.5), _metric_from_params(n, params)
            )
        if name == "damped-herglotz":
            _known(params, metric_keys | {"m", "lam"}, where)
            return S.damped_herglotz(n, params.get("m", 1.0), params.get("lam", 0.5), _metric_from_params(n, params))
        if name == "moebius-hyperregular":
            _known(params, set(), where)
            if n != 1:
                raise ConfigError("the Möbius Lagrangian lives over a one-dimensional base", "bundle.dim")
            return S.moebius_lagrangian()
    except ValueError as exc:
        raise ConfigError(str(exc), f"{where}.params") from exc
    raise ConfigError(f"unknown built-in section {name!r}", "builtin")


SECTION_SIDES = {
    "quadratic-riemannian": "lagrangian",
    "quadratic-hamiltonian": "hamiltonian",
    "damped-free": "hamiltonian",
    "damped-herglotz": "herglotz",
    "moebius-hyperregular": "lagrangian",
}


_CATALOG = (
    Scenario(
        "quadratic-riemannian",
        "lagrangian",
        "l = (g(v, v) + t^2) / 2 for a constant metric g",
        {},
        {"kind": "trivial", "dim": 1},
        {"chart": "R", "x": [0.0], "xd": [1.0], "t": 0.0},
    ),
    Scenario(
        "damped-free",
        "hamiltonian",
        "h = |p|^2 / 2m + lam z, free motion with linear friction",
        {"m": 1.0, "lam": 0.5},
        {"kind": "trivial", "dim": 1},
        {"chart": "R", "x": [0.0], "p": [1.0], "z": 0.0},
    ),
    Scenario(
        "damped-herglotz",
        "herglotz",
        "lbar = m |v|^2 / 2 - lam z, the Herglotz form of damped-free",
        {"m": 1.0, "lam": 0.5},
        {"kind": "trivial", "dim": 1},
        {"chart": "R", "x": [0.0], "xd": [1.0], "z": 0.0},
    ),
    Scenario(
        "moebius-hyperregular",
        "lagrangian",
        "cos(x)/2 (v^2 - t^2) + sin(x) t v on the Möbius band",
        {},
        {"kind": "moebius"},
        {"chart": "O", "x": [1.0], "xd": [1.0], "t": 0.0},
    ),
)


def builtin_scenarios() -> tuple:
    return _CATALOG


def get_scenario(name: str) -> Scenario:
    for sc in _CATALOG:
        if sc.name == name:
            return sc
    raise ConfigError(f"unknown scenario {name!r}; choose from {[s.name for s in _CATALOG]}", "scenario")
