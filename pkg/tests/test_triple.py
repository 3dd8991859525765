import numpy as np
import numpy.testing as npt
import pytest

from contact_triple import atlas as A
from contact_triple import dynamics as D
from contact_triple import sections as S
from contact_triple import triple as T
from contact_triple.errors import BasePointMismatch, ChartMismatch


def atiyah_tangent(p, z, xd, pd, zd, t, x=0.0):
    return T.AtiyahTangent(A.ContactCoords("R", [x], [p], z), np.array([xd]), np.array([pd]), zd, t)


def zero_h():
    return S.from_expr("hamiltonian", "0")


def test_pairing_values():
    v = A.AtiyahCoords("R", [0.0, 0.0], [1.0, 0.0], 2.0)
    u = A.ContactCoords("R", [0.0, 0.0], [2.0, 3.0], 5.0)
    assert T.pairing(v, u) == 12.0
    assert T.pairing(A.AtiyahCoords("R", [0, 0], [0, 0], 0), u) == 0.0


def test_pairing_errors():
    with pytest.raises(ChartMismatch):
        T.pairing(A.AtiyahCoords("O", [1.0], [1.0], 0), A.ContactCoords("U", [1.0], [1.0], 0))
    with pytest.raises(BasePointMismatch):
        T.pairing(A.AtiyahCoords("R", [1.0], [1.0], 0), A.ContactCoords("R", [1.1], [1.0], 0))


def test_lift_and_project():
    h = S.from_expr("hamiltonian", "p1^2/2")
    c = A.CoverCoords("R", [0.0], 2.0, [4.0], 0.0)
    assert T.lift_hamiltonian(h, c) == 4.0
    assert T.lift_hamiltonian(zero_h(), c) == 0.0
    assert T.lift_hamiltonian(h, A.CoverCoords("R", [0.0], -6.0, [-12.0], 0.0)) == -3 * 4.0
    npt.assert_array_equal(T.project_cover(A.CoverCoords("R", [0.0], 2.0, [4.0], 5.0)).as_array(), [0, 2, 5])
    npt.assert_array_equal(T.project_cover(A.CoverCoords("R", [0.3], 1.0, [4.0], 5.0)).as_array(), [0.3, 4, 5])
    c = A.CoverCoords("R", [0.3], 1.5, [-2.0], 5.0)
    cs = A.CoverCoords("R", [0.3], -7 * 1.5, [14.0], 5.0)
    npt.assert_allclose(T.project_cover(cs).as_array(), T.project_cover(c).as_array(), rtol=1e-15)


def test_cover_rejects_zero_tau():
    with pytest.raises(ValueError):
        A.CoverCoords("R", [0.0], 0.0, [1.0], 0.0)


def test_beta_example():
    j = T.HamiltonianJet(A.ContactCoords("R", [0.0], [1.0], 0.0), np.array([2.0]), np.array([3.0]), 4.0, 5.0)
    npt.assert_array_equal(T.beta(j).velocity(), [3.0, -6.0, -2.0])
    zero = T.HamiltonianJet(A.ContactCoords("R", [0.0], [1.0], 0.0), np.zeros(1), np.zeros(1), 0.0, 0.0)
    npt.assert_array_equal(T.beta(zero).velocity(), [0, 0, 0])


def test_beta0_example_inverts_beta_example():
    a = atiyah_tangent(p=1, z=0, xd=3, pd=-6, zd=-2, t=4)
    j = T.beta0(a)
    npt.assert_array_equal([j.Zx[0], j.Zp[0], j.Zz, j.Z], [2, 3, 4, 5])
    assert np.all(T.beta0(atiyah_tangent(1, 0, 0, 0, 0, 0)).as_array()[3:] == 0)


def test_alpha_examples():
    v = A.AtiyahCoords("R", [0.0], [3.0], 4.0)
    j = T.LagrangianJet(v, np.array([5.0]), np.array([1.0]), 2.0, 6.0)
    out = T.alpha(j)
    npt.assert_array_equal(out.base.as_array(), [0, 1, 2])
    npt.assert_array_equal(out.velocity(), [3.0, 1.0, -2.0])
    zero = T.alpha(T.LagrangianJet(v, np.zeros(1), np.zeros(1), 0.0, 0.0))
    npt.assert_array_equal(zero.as_array(), [0, 0, 0, 3, 0, 0])


def test_alpha0_example():
    a = atiyah_tangent(p=1, z=2, xd=3, pd=1, zd=-2, t=4)
    j = T.alpha0(a)
    npt.assert_array_equal([j.mux[0], j.muxd[0], j.mut, j.mu], [5, 1, 2, 6])
    zero = T.alpha0(atiyah_tangent(0, 0, 0, 0, 0, 0))
    npt.assert_array_equal(zero.as_array()[3:], 0)
    # the rejected sign gives mu = zdot - t z
    assert T.alpha0(a, flip_mu_sign=True).mu == -10.0


def test_R_maps_alpha0_example_to_beta0_image():
    a = atiyah_tangent(p=1, z=2, xd=3, pd=1, zd=-2, t=4)
    r = T.R_iso(T.alpha0(a))
    npt.assert_array_equal(r.as_array(), T.beta0(a).as_array())
    npt.assert_array_equal([r.Zx[0], r.Zp[0], r.Zz, r.Z], [-5, 3, 4, 5])
    zero = T.R_iso(T.LagrangianJet(A.AtiyahCoords("R", [0.0], [0.0], 0.0), np.zeros(1), np.zeros(1), 0.0, 0.0))
    npt.assert_array_equal(zero.as_array(), 0)


def test_anchor_forgets_t():
    a = atiyah_tangent(p=1, z=2, xd=3, pd=1, zd=-2, t=99)
    npt.assert_array_equal(T.anchor(a).as_array(), [0, 1, 2, 3, 1, -2])
    b = atiyah_tangent(p=1, z=2, xd=-1, pd=4, zd=0.5, t=-3)
    s = T.AtiyahTangent(a.base, a.xdot + 2 * b.xdot, a.pdot + 2 * b.pdot, a.zdot + 2 * b.zdot, a.t + 2 * b.t)
    lin = T.anchor(a).velocity() + 2 * T.anchor(b).velocity()
    npt.assert_array_equal(T.anchor(s).velocity(), lin)


def test_symplectic_residual():
    rng = np.random.default_rng(0)
    h = S.damped_hamiltonian()
    for _ in range(20):
        c = A.CoverCoords("R", rng.uniform(-2, 2, 1), rng.choice([-1, 1]) * rng.uniform(0.1, 5), rng.uniform(-2, 2, 1), rng.uniform(-2, 2))
        assert T.symplectic_residual(h, c) <= 1e-10
        assert T.symplectic_residual(zero_h(), c) == 0.0
        X = D.lifted_field(h, c)
        bad = D.CoverTangent(c, X.xdot + 1.0, X.taudot, X.pidot, X.zdot)
        # the perturbation shows up one-for-one (up to rounding) in the pi-slot
        assert T.symplectic_residual(h, c, bad) >= 1.0 - 1e-12
