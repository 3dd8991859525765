import math

import numpy as np
import numpy.testing as npt
import pytest

from contact_triple import atlas as A
from contact_triple import dynamics as D
from contact_triple import legendre as L
from contact_triple import sections as S
from contact_triple import triple as T
from contact_triple.errors import SingularHessian
from contact_triple.integrate import rk4_step


def test_contact_field_examples():
    u = A.ContactCoords("R", [0.0], [2.0], 7.0)
    npt.assert_array_equal(D.contact_field(S.from_expr("hamiltonian", "0"), u).velocity(), [0, 0, 0])
    npt.assert_array_equal(D.contact_field(S.from_expr("hamiltonian", "p1^2/2"), u).velocity(), [2, 0, 2])
    damped = D.contact_field(S.damped_hamiltonian(), A.ContactCoords("R", [0.0], [1.0], 0.0))
    npt.assert_allclose(damped.velocity(), [1.0, -0.5, 0.5], rtol=1e-15)


def test_lifted_field_examples():
    c = A.CoverCoords("R", [0.0], 2.0, [4.0], 7.0)
    X = D.lifted_field(S.from_expr("hamiltonian", "p1^2/2"), c)
    npt.assert_array_equal([X.xdot[0], X.taudot, X.pidot[0], X.zdot], [2, 0, 0, 2])
    Z = D.lifted_field(S.from_expr("hamiltonian", "0"), c)
    npt.assert_array_equal([Z.xdot[0], Z.taudot, Z.pidot[0], Z.zdot], [0, 0, 0, 0])


def test_projection_of_lifted_field():
    rng = np.random.default_rng(2)
    h = S.from_expr("hamiltonian", "sin(x1)*p1^2 + z*p1 - cos(z)")
    for _ in range(50):
        c = A.CoverCoords("R", rng.uniform(-2, 2, 1), rng.choice([-1, 1]) * rng.uniform(0.1, 5), rng.uniform(-2, 2, 1), rng.uniform(-2, 2))
        pushed = D.project_cover_tangent(D.lifted_field(h, c))
        direct = D.contact_field(h, T.project_cover(c))
        npt.assert_allclose(pushed.as_array(), direct.as_array(), atol=1e-10)


def test_lagrangian_implicit_examples():
    zero = D.lagrangian_implicit(S.from_expr("lagrangian", "0"), A.AtiyahCoords("R", [0.3], [1.0], 2.0))
    npt.assert_array_equal(zero.as_array(), [0.3, 0, 0, 1.0, 0, 0])
    q = D.lagrangian_implicit(S.quadratic_lagrangian(), A.AtiyahCoords("R", [0.0], [3.0], 4.0))
    npt.assert_allclose(q.as_array(), [0.0, 3.0, 4.0, 3.0, -12.0, -3.5], rtol=1e-15)


def test_lagrangian_implicit_is_alpha_of_jet():
    rng = np.random.default_rng(4)
    l = S.from_expr("lagrangian", "cos(x1)*xd1^2 + t^2*exp(x1/3) + xd1*t")
    for _ in range(50):
        v = A.AtiyahCoords("R", rng.uniform(-2, 2, 1), rng.uniform(-2, 2, 1), rng.uniform(-2, 2))
        npt.assert_allclose(T.alpha(T.lagrangian_jet(l, v)).as_array(), D.lagrangian_implicit(l, v).as_array(), atol=1e-12)


def test_euler_lagrange_quadratic_example():
    acc, tdot = D.euler_lagrange_rhs(S.quadratic_lagrangian(), "R", [0.0, 1.0, 0.0])
    npt.assert_array_equal(acc, [0.0])
    assert tdot == 0.5


def test_euler_lagrange_t_degenerate():
    with pytest.raises(SingularHessian):
        D.euler_lagrange_rhs(S.from_expr("lagrangian", "xd1^2/2"), "R", [0.0, 1.0, 0.0])


@pytest.mark.parametrize("chart, x", [("O", 1.0), ("U", 3.5)])
def test_euler_lagrange_residual_moebius(chart, x):
    """Central differences of l_xdot and l_t along RK4 steps match the EL right sides to O(h^2)."""
    l = S.moebius_lagrangian()
    f = D.vector_field(l)
    y0 = np.array([x, 0.8, -0.3])

    def residual(h):
        yp, ym = rk4_step(f, chart, y0, h), rk4_step(f, chart, y0, -h)
        gp, gm = l.jet(chart, yp), l.jet(chart, ym)
        j0 = l.jet(chart, y0)
        lx, lv, lt = j0.grad
        t = y0[2]
        dv = (gp.grad[1] - gm.grad[1]) / (2 * h) - (lx - t * lv)
        dt = (gp.grad[2] - gm.grad[2]) / (2 * h) - (j0.value - t * lt)
        return max(abs(dv), abs(dt))

    r1, r2 = residual(1e-2), residual(5e-3)
    assert r1 < 1e-3
    assert 3.0 < r1 / r2 < 5.0


def test_herglotz_example():
    acc, zdot = D.herglotz_rhs(S.damped_herglotz(), "R", [0.0, 1.0, 0.0])
    npt.assert_allclose(acc, [-0.5], rtol=1e-15)
    assert zdot == 0.5


def test_herglotz_without_z_is_plain_euler_lagrange():
    lbar = S.from_expr("herglotz", "xd1^2/2 - cos(x1)")
    acc, zdot = D.herglotz_rhs(lbar, "R", [0.4, 1.3, 2.0])
    npt.assert_allclose(acc, [math.sin(0.4)], rtol=1e-14)
    assert zdot == pytest.approx(1.3**2 / 2 - math.cos(0.4), rel=1e-15)


def test_herglotz_singular():
    with pytest.raises(SingularHessian):
        D.herglotz_rhs(S.from_expr("herglotz", "x1 - z"), "R", [0.0, 1.0, 0.0])


def test_herglotz_rejects_nontrivial_bundle():
    with pytest.raises(ValueError):
        S.ScalarSection("herglotz", A.moebius(), {"O": S.moebius_form, "U": S.moebius_form})


def test_homogeneity_of_lifted_field():
    h = S.damped_hamiltonian(2)
    rng = np.random.default_rng(6)
    for _ in range(30):
        c = A.CoverCoords("R", rng.uniform(-2, 2, 2), rng.uniform(0.1, 5), rng.uniform(-2, 2, 2), rng.uniform(-2, 2))
        X = D.lifted_field(h, c)
        for s in (-2.0, 0.1):
            Xs = D.lifted_field(h, A.CoverCoords("R", c.x, s * c.tau, s * c.pi, c.z))
            npt.assert_allclose(Xs.xdot, X.xdot, atol=1e-12)
            npt.assert_allclose(Xs.zdot, X.zdot, atol=1e-12)
            npt.assert_allclose(Xs.taudot, s * X.taudot, atol=1e-12)
            npt.assert_allclose(Xs.pidot, s * X.pidot, atol=1e-12)


def test_moebius_field_equivariance():
    at = A.moebius()
    h = L.hamiltonian_from_lagrangian(S.moebius_lagrangian())
    rng = np.random.default_rng(8)
    for x in list(rng.uniform(0.05, 1.5, 10)) + list(rng.uniform(1.65, 3.1, 10)):
        u = A.ContactCoords("O", [x], rng.uniform(-2, 2, 1), rng.uniform(-2, 2))
        X = D.contact_field(h, u)
        pushed = A.pushforward_contact_tangent(at, u, (X.xdot, X.pdot, X.zdot), "U")
        X2 = D.contact_field(h, A.transition_contact(at, u, "U"))
        npt.assert_allclose(np.concatenate([pushed[0], pushed[1], [pushed[2]]]), X2.velocity(), atol=1e-10)


def test_wrong_kind_rejected():
    with pytest.raises(ValueError):
        D.contact_field(S.quadratic_lagrangian(), A.ContactCoords("R", [0.0], [0.0], 0.0))
