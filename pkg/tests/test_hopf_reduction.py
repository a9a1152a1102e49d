import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from qkahler import hopf_reduction as hr
from qkahler.algebra import PAULI, random_hermitian, random_state
from qkahler.hilbert_kaehler import (
    LinearVectorField,
    as_complex,
    as_real,
    canonical_structures,
    field_matrix,
    omega_matrix,
)


def bloch_oracle(z):
    """Bloch vector of the ray through z from the normalized density matrix."""
    z = np.asarray(z, dtype=complex)
    rho = np.outer(z, z.conj()) / np.vdot(z, z).real
    return np.array([0.5 * np.trace(rho @ s).real for s in PAULI[1:]])


def horizontal(x, rng):
    """Random vector at x orthogonal to Delta(x) and Gamma(x)."""
    v = hr.vertical_fields(2)
    basis = np.array([v.delta(x), v.gamma(x)]).T
    q, _ = np.linalg.qr(basis)
    u = rng.standard_normal(4)
    return u - q @ (q.T @ u)


def unit_x(rng):
    return as_real(random_state(2, rng, normalize=True))


# -------------------------------------------------------- vertical fields --


def test_vertical_fields_basic(rng):
    v = hr.vertical_fields(2)
    x = rng.standard_normal(4)
    np.testing.assert_allclose(v.delta(x), x)
    # Gamma is the Hermitian field of the identity: z -> -iz
    np.testing.assert_allclose(as_complex(v.gamma(x)), -1j * as_complex(x))
    np.testing.assert_allclose(v.gamma.matrix, field_matrix(np.eye(2)))
    np.testing.assert_array_equal(v.delta.bracket(v.gamma).matrix, 0)
    assert v.dim == 2


def test_connection_form_is_symplectic_dual_of_delta(rng):
    x = rng.standard_normal(4)
    theta = hr.Connection1Form(2)(x)
    q, p = x[:2], x[2:]
    np.testing.assert_allclose(theta, np.concatenate([p, -q]))
    # S(V)(X') = omega(X', V)
    u = rng.standard_normal(4)
    assert hr.symplectic_dual(x) @ u == pytest.approx(u @ omega_matrix(2) @ x)
    with pytest.raises(ValueError):
        hr.Connection1Form(3)(x)


# --------------------------------------------------------------- Pauli frame --


@given(seeds)
def test_pauli_functions_and_frame(seed):
    rng = np.random.default_rng(seed)
    z = random_state(2, rng)
    x = as_real(z)
    f = hr.pauli_frame()
    y = f.y(x)
    # y_j = <z, s_j z> / 2
    np.testing.assert_allclose(y, [0.5 * np.vdot(z, s @ z).real for s in PAULI[1:]], atol=1e-12)
    assert f.y_gamma(x) ** 2 == pytest.approx(y @ y, rel=1e-12)
    xs = f.vectors(x)
    np.testing.assert_allclose(xs @ xs.T, 2 * f.y_gamma(x) * np.eye(3), atol=1e-12)
    np.testing.assert_allclose(xs @ x, 0, atol=1e-12)
    # dy_k from finite differences
    eps = 1e-6
    fd = np.array([(f.y(x + eps * e) - f.y(x - eps * e)) / (2 * eps) for e in np.eye(4)]).T
    np.testing.assert_allclose(f.gradients(x), fd, atol=1e-8)


def test_pauli_frame_requires_two():
    with pytest.raises(ValueError):
        hr.pauli_frame(3)


# ---------------------------------------------------------- projectability --


def test_projectability_of_fields(rng):
    v = hr.vertical_fields(2)
    for f in hr.pauli_frame().fields + (v.delta, v.gamma):
        assert hr.is_projectable_field(f, v)
    assert not hr.is_projectable_field(LinearVectorField(rng.standard_normal((4, 4))), v)
    # every Hermitian field commutes with both vertical fields
    assert hr.is_projectable_field(LinearVectorField(field_matrix(random_hermitian(2, rng))), v)


def test_projectability_dichotomy(rng):
    v = hr.vertical_fields(2)
    cs = canonical_structures(2)
    rt = hr.rescaled_tensors(cs)
    assert not hr.is_projectable_tensor(cs.G, v)
    assert not hr.is_projectable_tensor(cs.Lambda, v)
    assert hr.is_projectable_tensor(rt.G, v, rng=rng)
    assert hr.is_projectable_tensor(rt.Lambda, v, rng=rng)
    with pytest.raises(ValueError):
        hr.is_projectable_tensor(cs.g, v)


def test_rescaled_needs_n2():
    with pytest.raises(ValueError):
        hr.rescaled_tensors(1)


def test_rescaled_lambda_fails_jacobi(rng):
    a, b, c, x = rng.standard_normal((4, 4))
    lam = canonical_structures(2).Lambda.matrix
    assert abs(hr.jacobiator(lambda p: lam, a, b, c, x)) < 1e-8
    assert abs(hr.jacobiator(hr.rescaled_tensors(2).Lambda, a, b, c, x)) > 1e-3


# ------------------------------------------------------------ decompositions --


@given(seeds)
def test_frame_decompositions(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(4)
    rt = hr.rescaled_tensors(2)
    np.testing.assert_allclose(hr.g_tilde_from_frame(x), rt.G(x), atol=1e-10)
    np.testing.assert_allclose(hr.lambda_tilde_from_frame(x), rt.Lambda(x), atol=1e-10)
    np.testing.assert_allclose(hr.j_tilde_from_frame(x), rt.J(x), atol=1e-10)
    np.testing.assert_allclose(hr.j_tilde_connection_form(x), rt.J(x), atol=1e-10)


def test_lambda_decomposition_needs_half(rng):
    # without the 1/2 on the eps term the identity fails
    x = rng.standard_normal(4)
    f = hr.pauli_frame()
    xs, y, yg = f.vectors(x), f.y(x), f.y_gamma(x)
    full = sum(hr.EPS[a, b, c] * y[a] * hr.wedge(xs[b], xs[c])
               for a in range(3) for b in range(3) for c in range(3))
    gam = hr.vertical_fields(2).gamma(x)
    target = yg * hr.rescaled_tensors(2).Lambda(x)
    np.testing.assert_allclose(0.5 * full + yg * hr.wedge(gam, x), target, atol=1e-10)
    assert np.max(np.abs(full + yg * hr.wedge(gam, x) - target)) > 1e-2


# ---------------------------------------------------------------- projection --


@given(seeds)
def test_project_point_matches_density_matrix(seed):
    z = random_state(2, np.random.default_rng(seed))
    pt = hr.project_point(z)
    np.testing.assert_allclose(pt.y, bloch_oracle(z), atol=1e-12)
    assert pt.y @ pt.y == pytest.approx(0.25, abs=1e-12)


def test_project_point_examples():
    np.testing.assert_allclose(hr.project_point(np.array([1, 0], complex)).y, [0, 0, 0.5])
    e = np.array([1, 1], complex) / np.sqrt(2)
    np.testing.assert_allclose(hr.project_point(e).y, [0.5, 0, 0], atol=1e-15)
    with pytest.raises(ValueError):
        hr.project_point(np.zeros(2, complex))
    with pytest.raises(ValueError):
        hr.project_point(np.ones(3, complex))


@given(seeds, st.floats(0, 2 * np.pi), st.floats(0.01, 100))
def test_gauge_invariance(seed, phase, scale):
    z = random_state(2, np.random.default_rng(seed))
    w = hr.gauge_action(z, phase, scale)
    np.testing.assert_allclose(hr.project_point(w).y, hr.project_point(z).y, atol=1e-12)
    for a, b in zip(hr.reduced_bivectors(as_real(w)), hr.reduced_bivectors(as_real(z))):
        np.testing.assert_allclose(a, b, atol=1e-10)


@given(seeds)
def test_lift_is_section(seed):
    y = hr.random_sphere_point(np.random.default_rng(seed))
    z = hr.lift_point(y)
    assert np.vdot(z, z).real == pytest.approx(1.0)
    np.testing.assert_allclose(hr.project_point(z).y, y, atol=1e-12)


def test_sphere_chart_validation():
    hr.SphereChart([0, 0, 0.5])
    with pytest.raises(ValueError):
        hr.SphereChart([0, 0, 1.0])
    with pytest.raises(ValueError):
        hr.SphereChart([0.5, 0])


@given(seeds)
def test_projection_jacobian_matches_fd(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(4)
    eps = 1e-6
    fd = np.array([(hr.project_point(x + eps * e).y - hr.project_point(x - eps * e).y) / (2 * eps)
                   for e in np.eye(4)]).T
    np.testing.assert_allclose(hr.projection_jacobian(x), fd, atol=1e-7)


@given(seeds)
def test_pushforward_fields(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(4)
    f = hr.pauli_frame()
    pf = hr.pushforward_fields(f, x)
    y = f.y(x)
    np.testing.assert_allclose(pf.tilde, hr.rotation_fields(y), atol=1e-10)
    np.testing.assert_allclose(pf.delta_tilde, 2 * y, atol=1e-10)
    np.testing.assert_allclose(pf.gamma_tilde, 0, atol=1e-10)
    np.testing.assert_allclose(pf.delta_sphere, 0, atol=1e-10)
    # R_j is the rotation about e_j: R_j(y) = 2 e_j x y
    ys = hr.project_point(x).y
    for j in range(3):
        np.testing.assert_allclose(pf.sphere[j], 2 * np.cross(np.eye(3)[j], ys), atol=1e-10)


# ---------------------------------------------------------------- S^2 data --


@given(seeds)
def test_sphere_tensors_match_formulas(seed):
    rng = np.random.default_rng(seed)
    sk = hr.sphere_kaehler()
    y = hr.random_sphere_point(rng)
    p = hr.tangent_projector(y)
    np.testing.assert_allclose(sk.metric(y), sk.metric_formula(y), atol=1e-10)
    np.testing.assert_allclose(sk.two_form(y), p @ sk.two_form_formula(y) @ p, atol=1e-10)
    np.testing.assert_allclose(sk.complex_structure(y) @ p, sk.complex_structure_formula(y) @ p,
                               atol=1e-10)
    gb, lb = sk.bivectors(y)
    np.testing.assert_allclose(gb, p, atol=1e-10)


@given(seeds)
def test_sphere_metric_from_horizontal_lift(seed):
    # g~ = g / |z|^2 on horizontal vectors; at |z| = 1 it is the Euclidean norm
    rng = np.random.default_rng(seed)
    x = unit_x(rng)
    u1, u2 = horizontal(x, rng), horizontal(x, rng)
    jac = hr.projection_jacobian(x)
    v1, v2 = jac @ u1, jac @ u2
    sk = hr.sphere_kaehler()
    y = hr.project_point(x).y
    assert v1 @ sk.metric(y) @ v2 == pytest.approx(u1 @ u2, abs=1e-10)
    assert v1 @ sk.two_form(y) @ v2 == pytest.approx(u1 @ omega_matrix(2) @ u2, abs=1e-10)
    j = canonical_structures(2).J.matrix
    np.testing.assert_allclose(jac @ (j @ u1), sk.complex_structure(y) @ v1, atol=1e-10)


def test_north_pole_values():
    sk = hr.sphere_kaehler()
    y = np.array([0, 0, 0.5])
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    assert sk.metric(y)[0, 0] == pytest.approx(1.0)
    assert e1 @ sk.two_form(y) @ e2 == pytest.approx(1.0)
    np.testing.assert_allclose(sk.complex_structure(y) @ e1, e2, atol=1e-12)


@given(seeds)
def test_sphere_compatibility(seed):
    rng = np.random.default_rng(seed)
    sk = hr.sphere_kaehler()
    y = hr.random_sphere_point(rng)
    u, v = hr.random_tangent(y, rng), hr.random_tangent(y, rng)
    g, w, j = sk.metric(y), sk.two_form(y), sk.complex_structure(y)
    assert (j @ u) @ g @ v == pytest.approx(u @ w @ v, abs=1e-10)
    assert (j @ u) @ g @ (j @ v) == pytest.approx(u @ g @ v, abs=1e-10)
    assert (j @ u) @ w @ (j @ v) == pytest.approx(u @ w @ v, abs=1e-10)
    np.testing.assert_allclose(j @ j @ u, -u, atol=1e-10)


def test_sphere_closed(rng):
    sk = hr.sphere_kaehler()
    for _ in range(20):
        assert sk.exterior_derivative(hr.random_sphere_point(rng)) <= 1e-6


def test_exterior_derivative_detects_non_closed():
    # sanity of the d operator: a non-closed extension must register
    class Bad(hr.SphereKaehler):
        def extended_two_form(self, y):
            y = np.asarray(y)
            return y[0] * hr.wedge(np.eye(3)[1], np.eye(3)[2])

    assert Bad().exterior_derivative(np.array([0.1, 0.2, 0.3])) == pytest.approx(1.0, abs=1e-8)
