"""Invariant suites that can be run from the command line.

Every check reports the largest violation seen over its samples next to the
tolerance it is held to.  Randomness comes from :class:`rng.SplitMix64`
seeded with 0xC0FFEE, so reports are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import atlas as A
from . import dynamics as D
from . import legendre as L
from . import sections as S
from . import triple as T
from .rng import DEFAULT_SEED, SplitMix64

SUITES = ("diagrams", "homogeneity", "moebius", "legendre")


@dataclass
class Check:
    name: str
    max_violation: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.max_violation <= self.tolerance)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<52s} max={self.max_violation:.3e}  tol={self.tolerance:.0e}"


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, violation, tol):
        self.checks.append(Check(name, float(violation), tol))

    def render(self):
        lines = [c.line() for c in self.checks]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({sum(c.passed for c in self.checks)}/{len(self.checks)})")
        return "\n".join(lines)


def _maxdiff(a, b):
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def _rand_vec(rng, n, span=2.0):
    return rng.uniform(-span, span, n)


def random_atiyah_tangent(rng, n=2, chart="R", span=2.0):
    base = A.ContactCoords(chart, _rand_vec(rng, n, span), _rand_vec(rng, n, span), rng.uniform(-span, span))
    return T.AtiyahTangent(base, _rand_vec(rng, n, span), _rand_vec(rng, n, span), rng.uniform(-span, span), rng.uniform(-span, span))


def random_hamiltonian_jet(rng, n=2, span=2.0):
    base = A.ContactCoords("R", _rand_vec(rng, n, span), _rand_vec(rng, n, span), rng.uniform(-span, span))
    return T.HamiltonianJet(base, _rand_vec(rng, n, span), _rand_vec(rng, n, span), rng.uniform(-span, span), rng.uniform(-span, span))


def random_lagrangian_jet(rng, n=2, span=2.0):
    base = A.AtiyahCoords("R", _rand_vec(rng, n, span), _rand_vec(rng, n, span), rng.uniform(-span, span))
    return T.LagrangianJet(base, _rand_vec(rng, n, span), _rand_vec(rng, n, span), rng.uniform(-span, span), rng.uniform(-span, span))


def random_cover(rng, n, chart="R", span=2.0):
    tau = rng.sign() * rng.uniform(0.1, 5.0)
    return A.CoverCoords(chart, _rand_vec(rng, n, span), tau, _rand_vec(rng, n, span), rng.uniform(-span, span))


def builtin_hamiltonians(n=2):
    return [S.quadratic_hamiltonian(n, np.diag(np.arange(1.0, n + 1))), S.damped_hamiltonian(n)]


def suite_diagrams(report, rng, samples=1000, flip_mu_sign=False):
    worst = dict.fromkeys(["R", "beta", "alpha", "b0", "a0", "bfield", "afield"], 0.0)
    lags = [S.quadratic_lagrangian(2, [[2.0, 0.5], [0.5, 1.0]])]
    hams = builtin_hamiltonians(2)
    for _ in range(samples):
        a = random_atiyah_tangent(rng)
        lj = T.alpha0(a, flip_mu_sign)
        worst["R"] = max(worst["R"], _maxdiff(T.R_iso(lj).as_array(), T.beta0(a).as_array()))
        worst["alpha"] = max(worst["alpha"], _maxdiff(T.alpha(lj).as_array(), T.anchor(a).as_array()))
        worst["a0"] = max(worst["a0"], _maxdiff(T.alpha0(T.alpha0_inverse(lj), flip_mu_sign).as_array(), lj.as_array()))
        hj = random_hamiltonian_jet(rng)
        worst["beta"] = max(worst["beta"], _maxdiff(T.beta(hj).as_array(), T.anchor(T.beta0_inverse(hj)).as_array()))
        worst["b0"] = max(worst["b0"], _maxdiff(T.beta0(T.beta0_inverse(hj)).as_array(), hj.as_array()))
        u = A.ContactCoords("R", _rand_vec(rng, 2), _rand_vec(rng, 2), rng.uniform(-2, 2))
        for h in hams:
            worst["bfield"] = max(
                worst["bfield"],
                _maxdiff(T.beta(T.hamiltonian_jet(h, u)).as_array(), D.contact_field(h, u).as_array()),
            )
        v = A.AtiyahCoords("R", _rand_vec(rng, 2), _rand_vec(rng, 2), rng.uniform(-2, 2))
        for l in lags:
            worst["afield"] = max(
                worst["afield"],
                _maxdiff(T.alpha(T.lagrangian_jet(l, v)).as_array(), D.lagrangian_implicit(l, v).as_array()),
            )
    report.add("R o alpha0 = beta0", worst["R"], 1e-12)
    report.add("beta = anchor o beta0^-1", worst["beta"], 1e-12)
    report.add("alpha o alpha0 = anchor", worst["alpha"], 1e-12)
    report.add("beta0 o beta0^-1 = id", worst["b0"], 1e-12)
    report.add("alpha0 o alpha0^-1 = id", worst["a0"], 1e-12)
    report.add("beta(j1 h) = contact field", worst["bfield"], 1e-12)
    report.add("alpha(j1 l) = implicit Lagrangian dynamics", worst["afield"], 1e-12)


def suite_homogeneity(report, rng, samples=500):
    hams = builtin_hamiltonians(2)
    lift = field_h = proj = symp = 0.0
    for _ in range(samples):
        c = random_cover(rng, 2)
        for h in hams:
            H = T.lift_hamiltonian(h, c)
            for s in (-3.0, 0.5, 7.0):
                cs = A.CoverCoords("R", c.x, s * c.tau, s * c.pi, c.z)
                lift = max(lift, abs(T.lift_hamiltonian(h, cs) - s * H) / max(1.0, abs(s * H)))
            X = D.lifted_field(h, c)
            for s in (-2.0, 0.1):
                Xs = D.lifted_field(h, A.CoverCoords("R", c.x, s * c.tau, s * c.pi, c.z))
                field_h = max(
                    field_h,
                    _maxdiff(Xs.xdot, X.xdot),
                    abs(Xs.zdot - X.zdot),
                    abs(Xs.taudot - s * X.taudot),
                    _maxdiff(Xs.pidot, s * X.pidot),
                )
            pr = D.project_cover_tangent(X)
            cf = D.contact_field(h, T.project_cover(c))
            proj = max(proj, _maxdiff(pr.as_array(), cf.as_array()))
            symp = max(symp, T.symplectic_residual(h, c, X))
    report.add("lift is 1-homogeneous (relative)", lift, 1e-12)
    report.add("lifted field homogeneity", field_h, 1e-10)
    report.add("lifted field projects to contact field", proj, 1e-10)
    report.add("symplectic residual", symp, 1e-10)


def _moebius_x(rng, component):
    """A point of O in the overlap component 1 (]pi/2, pi[) or 2 (]0, pi/2[)."""
    lo, hi = (math.pi / 2, math.pi) if component == 1 else (0.0, math.pi / 2)
    pad = 1e-3
    return rng.uniform(lo + pad, hi - pad)


def moebius_hamiltonian():
    return L.hamiltonian_from_lagrangian(S.moebius_lagrangian())


def suite_moebius(report, rng, samples=100):
    atlas = A.moebius()
    rep = A.validate_atlas(atlas, samples=samples)
    report.add("cocycle identity", rep.cocycle_violation + (0.0 if not rep.failures else math.inf), 0.0)
    report.add("overlap maps invert each other", rep.inverse_violation, 1e-12)
    l = S.moebius_lagrangian(atlas)
    h = moebius_hamiltonian()
    pair = ortho = lam = equiv = sign = comp = 0.0
    for k in range(samples):
        comp_id = 1 + (k % 2)
        x = _moebius_x(rng, comp_id)
        v = A.AtiyahCoords("O", [x], [rng.uniform(-2, 2)], rng.uniform(-2, 2))
        u = A.ContactCoords("O", [x], [rng.uniform(-2, 2)], rng.uniform(-2, 2))
        phi = 1.0 if comp_id == 1 else -1.0
        v2 = A.transition_atiyah(atlas, v, "U")
        u2 = A.transition_contact(atlas, u, "U")
        pair = max(pair, abs(T.pairing(v2, u2) - phi * T.pairing(v, u)))
        Jm = l.jet("O", v.as_array()).hess[1:, 1:]
        ortho = max(ortho, float(np.max(np.abs(Jm.T @ Jm - np.eye(2)))))
        lam = max(
            lam,
            _maxdiff(
                A.transition_contact(atlas, L.legendre_from_lagrangian(l, v), "U").as_array(),
                L.legendre_from_lagrangian(l, v2).as_array(),
            ),
        )
        X1 = D.contact_field(h, u)
        pushed = A.pushforward_contact_tangent(atlas, u, (X1.xdot, X1.pdot, X1.zdot), "U")
        X2 = D.contact_field(h, u2)
        equiv = max(equiv, _maxdiff(np.concatenate([pushed[0], pushed[1], [pushed[2]]]), X2.velocity()))
        # y in U's copy of component 2; x = y - pi is exact there (Sterbenz)
        y = rng.uniform(math.pi + 1e-3, 1.5 * math.pi - 1e-3)
        xs = y - math.pi
        f1 = l.value("O", [xs, v.xdot[0], v.t])
        f2 = l.value("U", [y, v.xdot[0], v.t])
        sign = max(sign, abs(f2 + f1))
    comp = max(S.check_compatibility(l, samples), S.check_compatibility(h, samples // 4))
    report.add("pairing covariance Pi' = phi Pi", pair, 1e-12)
    report.add("Legendre Jacobian orthogonality", ortho, 1e-12)
    report.add("lambda_l chart compatibility", lam, 1e-10)
    report.add("contact field chart equivariance", equiv, 1e-10)
    report.add("F2(x + pi) = -F1(x)", sign, 0.0)
    report.add("section and transform chart compatibility", comp, 1e-9)


def suite_legendre(report, rng, samples=500):
    quad_l = S.quadratic_lagrangian(2, [[2.0, 0.5], [0.5, 1.0]])
    moeb_l = S.moebius_lagrangian()
    roundtrip = recon = dyn = 0.0
    for l in (quad_l, moeb_l):
        h = L.hamiltonian_from_lagrangian(l)
        l2 = L.lagrangian_from_hamiltonian(h)
        n = l.dim
        for k in range(samples):
            if l is moeb_l:
                chart = "O" if k % 2 == 0 else "U"
                c = l.atlas.chart(chart)
                x = [rng.uniform(c.lower[0] + 0.05, c.upper[0] - 0.05)]
            else:
                chart, x = "R", _rand_vec(rng, n)
            v = A.AtiyahCoords(chart, x, _rand_vec(rng, n), rng.uniform(-2, 2))
            u = L.legendre_from_lagrangian(l, v)
            back = L.legendre_from_hamiltonian(h, u)
            roundtrip = max(roundtrip, _maxdiff(back.as_array(), v.as_array()))
            if k < samples // 5:
                recon = max(recon, abs(l2.value(chart, v.as_array()) - l.value(chart, v.as_array())))
                dyn = max(dyn, _maxdiff(D.contact_field(h, u).as_array(), D.lagrangian_implicit(l, v).as_array()))
    report.add("lambda_h o lambda_l = id", roundtrip, 1e-10)
    report.add("l -> h -> l' reconstruction", recon, 1e-9)
    report.add("D_h = D_l at matched points", dyn, 1e-8)
    diag = L.hyperregularity_probe(S.damped_hamiltonian())
    report.add("damped Hamiltonian reported degenerate", 0.0 if diag.verdict == "degenerate" else 1.0, 0.0)


_RUNNERS = {
    "diagrams": suite_diagrams,
    "homogeneity": suite_homogeneity,
    "moebius": suite_moebius,
    "legendre": suite_legendre,
}


def verify(suite: str = "all", seed: int = DEFAULT_SEED, flip_mu_sign: bool = False) -> VerifyReport:
    """Run one suite (or all of them) and collect the checks into a report."""
    if suite != "all" and suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    names = SUITES if suite == "all" else (suite,)
    report = VerifyReport()
    rng = SplitMix64(seed)
    for name in names:
        if name == "diagrams":
            suite_diagrams(report, rng, flip_mu_sign=flip_mu_sign)
        else:
            _RUNNERS[name](report, rng)
    return report
