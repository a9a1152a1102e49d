"""Seeded verification suites and the report they produce.

Every check draws its random inputs from a generator keyed by
``(seed, crc32(check_id), trial)``, so a check's numbers do not depend on
which other checks run or in what order.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import hopf_reduction as hr
from . import momentum_unfolding as mu_
from .algebra import (
    from_coordinates,
    generalized_pauli_basis,
    haar_unitary,
    random_hermitian,
    random_state,
    scalar,
)
from .hilbert_kaehler import (
    LinearVectorField,
    Tensor2,
    as_real,
    bracket_identities,
    canonical_structures,
    check_unitary_conditions,
    field_matrix,
    hamiltonian_function,
    hamiltonian_gradient,
    hermitian_field,
    lie_derivative,
    lie_derivative_fd,
    omega_matrix,
    quadratic_form,
    schrodinger_flow,
    unitary_algebra_rank,
)

SCHEMA_VERSION = "1"
SUITES = ("kahler", "reduction", "unfolding", "crosscheck")
FIXED_DIM = {"reduction": 2, "crosscheck": 2}
FD_TOL = 1e-6
MAX_DIM = 64


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    dim: int = 2
    trials: int = 100
    seed: int = 0
    tol: float = 1e-10
    suite: str = "all"
    out_path: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")
        if not 1 <= self.dim <= MAX_DIM:
            raise ConfigError(f"dim must lie in [1, {MAX_DIM}], got {self.dim}")
        if self.suite in FIXED_DIM and self.dim != FIXED_DIM[self.suite]:
            raise ConfigError(f"suite {self.suite!r} requires dim = {FIXED_DIM[self.suite]}")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not (np.isfinite(self.tol) and self.tol > 0):
            raise ConfigError("tol must be a positive finite number")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")


class Errors:
    """Running max of absolute and relative errors over a check's trials.

    The relative error divides by max(1, |lhs|, |rhs|) entrywise.
    """

    def __init__(self):
        self.max_abs = 0.0
        self.max_rel = 0.0

    def compare(self, lhs, rhs) -> None:
        lhs = np.asarray(lhs)
        rhs = np.asarray(rhs)
        if lhs.size == 0:
            return
        diff = np.abs(lhs - rhs)
        scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        self.max_abs = max(self.max_abs, float(np.max(diff)))
        self.max_rel = max(self.max_rel, float(np.max(diff / scale)))

    def zero(self, value) -> None:
        value = np.asarray(value)
        self.compare(value, np.zeros(value.shape))

    def flag(self, ok: bool) -> None:
        """Record a classification outcome: a miss counts as error 1."""
        self.zero(0.0 if ok else 1.0)


@dataclass(frozen=True)
class Check:
    check_id: str
    identity: str
    func: Callable[[int, np.random.Generator, Errors], None]
    zero_target: bool = True
    tol: float | None = None          # fixed tolerance overriding the run tolerance
    max_trials: int | None = None

    @property
    def suite(self) -> str:
        return self.check_id.split(".")[0]


REGISTRY: list[Check] = []


def check(check_id: str, identity: str, zero_target: bool = True, tol: float | None = None,
          max_trials: int | None = None):
    def deco(func):
        if any(c.check_id == check_id for c in REGISTRY):
            raise RuntimeError(f"duplicate check id {check_id}")
        REGISTRY.append(Check(check_id, identity, func, zero_target, tol, max_trials))
        return func
    return deco


def checks_for(suite: str) -> list[Check]:
    if suite == "all":
        return list(REGISTRY)
    return [c for c in REGISTRY if c.suite == suite]


def trial_rng(seed: int, check_id: str, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(check_id.encode()), trial])


def _span(rng, basis, count=None) -> np.ndarray:
    """Random real combination(s) of the matrices in ``basis``."""
    c = rng.standard_normal(len(basis) if count is None else (count, len(basis)))
    return np.tensordot(c, basis, axes=(-1, 0))


def _canonical_block(k: int) -> np.ndarray:
    z = np.zeros((k, k))
    return np.block([[z, -np.eye(k)], [np.eye(k), z]])


# ------------------------------------------------------------------ kahler --


@check("kahler.j_squared", "J^2 = -1")
def _(n, rng, err):
    j = canonical_structures(n).J.matrix
    err.zero(j @ j + np.eye(2 * n))


@check("kahler.compat_metric_form", "g(Ju, v) = omega(u, v)")
def _(n, rng, err):
    cs = canonical_structures(n)
    err.zero(cs.J.matrix.T @ cs.g.matrix - cs.omega.matrix)


@check("kahler.compat_metric_invariant", "g(Ju, Jv) = g(u, v)")
def _(n, rng, err):
    cs = canonical_structures(n)
    err.zero(cs.J.matrix.T @ cs.g.matrix @ cs.J.matrix - cs.g.matrix)


@check("kahler.compat_form_invariant", "omega(Ju, Jv) = omega(u, v)")
def _(n, rng, err):
    cs = canonical_structures(n)
    err.zero(cs.J.matrix.T @ cs.omega.matrix @ cs.J.matrix - cs.omega.matrix)


@check("kahler.contravariant_inverse", "G g = 1, Lambda omega = -1")
def _(n, rng, err):
    cs = canonical_structures(n)
    err.zero(cs.G.matrix @ cs.g.matrix - np.eye(2 * n))
    err.zero(cs.Lambda.matrix @ cs.omega.matrix + np.eye(2 * n))


@check("kahler.hermitian_lie_exact", "L_X g = L_X omega = L_X J = 0 for X = X_H, H Hermitian")
def _(n, rng, err):
    x = hermitian_field(random_hermitian(n, rng))
    cs = canonical_structures(n)
    for t in (cs.g, cs.omega, cs.J):
        err.zero(lie_derivative(x, t).matrix)


@check("kahler.hermitian_lie_fd",
       "L_X g = L_X omega = L_X J = 0 for X = X_H (flow finite differences)", tol=FD_TOL)
def _(n, rng, err):
    w = field_matrix(random_hermitian(n, rng))
    pt = rng.standard_normal(2 * n)
    cs = canonical_structures(n)
    for t in (cs.g, cs.omega, cs.J):
        err.zero(lie_derivative_fd(w, t, pt))


@check("kahler.lie_formula_oracle", "closed-form L_X T = d/dt phi_t^* T at t = 0",
       zero_target=False, tol=FD_TOL)
def _(n, rng, err):
    x = LinearVectorField(rng.standard_normal((2 * n, 2 * n)))
    pt = rng.standard_normal(2 * n)
    for var in ("covariant", "contravariant", "mixed"):
        t = Tensor2(rng.standard_normal((2 * n, 2 * n)), var)
        err.compare(lie_derivative(x, t).matrix, lie_derivative_fd(x.matrix, t, pt))


@check("kahler.non_block_rejected",
       "generic W violates the invariance conditions; X_H satisfies all of them")
def _(n, rng, err):
    w = rng.standard_normal((2 * n, 2 * n))
    err.flag(not any(check_unitary_conditions(w)))
    err.flag(not any(check_unitary_conditions(w, method="fd")))
    err.flag(all(check_unitary_conditions(field_matrix(random_hermitian(n, rng)))))


@check("kahler.hamiltonian_quadratic_form", "f_H = x^T M_H x / 2 = <z, Hz> / 2",
       zero_target=False)
def _(n, rng, err):
    h = random_hermitian(n, rng)
    z = random_state(n, rng)
    x = as_real(z)
    err.compare(0.5 * x @ quadratic_form(h) @ x, hamiltonian_function(h, z))
    err.compare(0.5 * np.vdot(z, h @ z).real, hamiltonian_function(h, z))


@check("kahler.hamiltonian_vector_field", "omega(X_H, .) = df_H", zero_target=False)
def _(n, rng, err):
    h = random_hermitian(n, rng)
    z = random_state(n, rng)
    err.compare((field_matrix(h) @ as_real(z)) @ omega_matrix(n), hamiltonian_gradient(h, z))


@check("kahler.bracket_omega", "omega(X_H1, X_H2) = f_{-i[H1, H2]}", zero_target=False)
def _(n, rng, err):
    b = bracket_identities(random_hermitian(n, rng), random_hermitian(n, rng),
                           random_state(n, rng))
    err.compare(b.lhs_omega, b.rhs_omega)


@check("kahler.bracket_g", "g(X_H1, X_H2) = f_{H1 H2 + H2 H1}", zero_target=False)
def _(n, rng, err):
    b = bracket_identities(random_hermitian(n, rng), random_hermitian(n, rng),
                           random_state(n, rng))
    err.compare(b.lhs_g, b.rhs_g)


@check("kahler.flow_generator", "i dz/dt = H z along the flow (central difference at t = 0)",
       zero_target=False, tol=FD_TOL)
def _(n, rng, err):
    h = random_hermitian(n, rng)
    z = random_state(n, rng)
    step = 1e-5
    fwd = schrodinger_flow(h, z, step).coords
    bwd = schrodinger_flow(h, z, -step).coords
    err.compare((fwd - bwd) / (2 * step), field_matrix(h) @ as_real(z))


@check("kahler.flow_norm", "|exp(-iHt) z|^2 = |z|^2", zero_target=False)
def _(n, rng, err):
    h = random_hermitian(n, rng)
    z = random_state(n, rng)
    err.compare(schrodinger_flow(h, z, rng.uniform(0, 10)).norm_sq, np.vdot(z, z).real)


@check("kahler.flow_composition", "phi_{t1 + t2} = phi_t2 o phi_t1", zero_target=False)
def _(n, rng, err):
    h = random_hermitian(n, rng)
    z = random_state(n, rng)
    t1, t2 = rng.uniform(-5, 5, 2)
    err.compare(schrodinger_flow(h, z, t1 + t2).coords,
                schrodinger_flow(h, schrodinger_flow(h, z, t1).z, t2).coords)


@check("kahler.unitary_algebra_dim", "dim of {W : L_W g = L_W omega = 0} = N^2",
       zero_target=False, max_trials=1)
def _(n, rng, err):
    err.compare(unitary_algebra_rank(n), n * n)


# --------------------------------------------------------------- reduction --


def _x4(rng) -> np.ndarray:
    return rng.standard_normal(4)


@check("reduction.vertical_fields", "[Delta, Gamma] = 0, Gamma = X_1, f_1 = |z|^2 / 2")
def _(n, rng, err):
    v = hr.vertical_fields(2)
    x = _x4(rng)
    err.zero(v.delta.bracket(v.gamma).matrix)
    err.zero(v.gamma.matrix - field_matrix(np.eye(2)))
    err.zero(hamiltonian_function(np.eye(2), x) - 0.5 * x @ x)


@check("reduction.pauli_functions",
       "y_gamma^2 = y_1^2 + y_2^2 + y_3^2, y = (q1 q2 + p1 p2, q1 p2 - q2 p1, "
       "(|z1|^2 - |z2|^2) / 2)", zero_target=False)
def _(n, rng, err):
    f = hr.pauli_frame()
    q1, q2, p1, p2 = x = _x4(rng)
    y = f.y(x)
    err.compare(f.y_gamma(x) ** 2, y @ y)
    err.compare(y, [q1 * q2 + p1 * p2, q1 * p2 - q2 * p1,
                    0.5 * (q1 ** 2 + p1 ** 2 - q2 ** 2 - p2 ** 2)])


@check("reduction.frame_orthogonality", "g(X_j, X_k) = 2 y_gamma d_jk, g(X_j, Delta) = 0",
       zero_target=False)
def _(n, rng, err):
    f = hr.pauli_frame()
    x = _x4(rng)
    xs = f.vectors(x)
    err.compare(xs @ xs.T, 2 * f.y_gamma(x) * np.eye(3))
    err.compare(xs @ x, np.zeros(3))
    err.compare(x @ x, 2 * f.y_gamma(x))


@check("reduction.frame_commutators", "[X_j, Delta] = [X_j, Gamma] = 0", max_trials=1)
def _(n, rng, err):
    v = hr.vertical_fields(2)
    for xj in hr.pauli_frame().fields:
        err.zero(xj.bracket(v.delta).matrix)
        err.zero(xj.bracket(v.gamma).matrix)


@check("reduction.field_projectability",
       "[Delta, V], [Gamma, V] vertical for V = X_j, Delta, Gamma; generic V fails")
def _(n, rng, err):
    v = hr.vertical_fields(2)
    for f in hr.pauli_frame().fields + (v.delta, v.gamma):
        err.flag(hr.is_projectable_field(f, v))
    err.flag(not hr.is_projectable_field(LinearVectorField(rng.standard_normal((4, 4))), v))


@check("reduction.tensor_projectability",
       "G, Lambda not projectable; |z|^2 G, |z|^2 Lambda projectable", max_trials=5)
def _(n, rng, err):
    v = hr.vertical_fields(2)
    cs = canonical_structures(2)
    rt = hr.rescaled_tensors(cs)
    pts = rng.standard_normal((3, 4))
    err.flag(not hr.is_projectable_tensor(cs.G, v))
    err.flag(not hr.is_projectable_tensor(cs.Lambda, v))
    err.flag(hr.is_projectable_tensor(rt.G, v, points=pts))
    err.flag(hr.is_projectable_tensor(rt.Lambda, v, points=pts))


@check("reduction.rescaled_not_poisson",
       "Jacobi identity holds for Lambda and fails for |z|^2 Lambda", max_trials=5)
def _(n, rng, err):
    a, b, c, x = rng.standard_normal((4, 4))
    lam = canonical_structures(2).Lambda.matrix
    err.flag(abs(hr.jacobiator(lambda p: lam, a, b, c, x)) < 1e-6)
    err.flag(abs(hr.jacobiator(hr.rescaled_tensors(2).Lambda, a, b, c, x)) > 1e-6)


@check("reduction.g_tilde_decomposition", "|z|^2 G = Delta (x) Delta + X_k (x) X_k",
       zero_target=False)
def _(n, rng, err):
    x = _x4(rng)
    err.compare(hr.g_tilde_from_frame(x), hr.rescaled_tensors(2).G(x))


@check("reduction.lambda_tilde_decomposition",
       "y_gamma |z|^2 Lambda = (1/2) eps_abc y_a X_b ^ X_c + y_gamma Gamma ^ Delta",
       zero_target=False)
def _(n, rng, err):
    x = _x4(rng)
    err.compare(hr.lambda_tilde_from_frame(x), hr.rescaled_tensors(2).Lambda(x))


@check("reduction.j_tilde_decomposition",
       "|z|^2 J = Delta (x) S(Delta) + X_k (x) S(X_k) = Delta (x) theta - X_k (x) dy_k",
       zero_target=False)
def _(n, rng, err):
    x = _x4(rng)
    jt = hr.rescaled_tensors(2).J(x)
    err.compare(hr.j_tilde_from_frame(x), jt)
    err.compare(hr.j_tilde_connection_form(x), jt)


@check("reduction.symplectic_duality",
       "S(Delta) = theta, S(X_k) = -dy_k, theta(Gamma) = |z|^2, theta(Delta) = 0",
       zero_target=False)
def _(n, rng, err):
    f = hr.pauli_frame()
    x = _x4(rng)
    theta = hr.Connection1Form(2)(x)
    err.compare(hr.symplectic_dual(x), theta)
    err.compare(np.array([hr.symplectic_dual(v) for v in f.vectors(x)]), -f.gradients(x))
    err.compare(theta @ hr.vertical_fields(2).gamma(x), x @ x)
    err.compare(theta @ x, 0.0)


@check("reduction.gauge_invariance",
       "pi(c z) = pi(z) and the reduced tensors are invariant for c in C_0", zero_target=False)
def _(n, rng, err):
    z = random_state(2, rng)
    w = hr.gauge_action(z, rng.uniform(0, 2 * np.pi), rng.uniform(0.2, 5.0))
    err.compare(hr.project_point(w).y, hr.project_point(z).y)
    for a, b in zip(hr.reduced_bivectors(as_real(w)), hr.reduced_bivectors(as_real(z))):
        err.compare(a, b)


@check("reduction.projected_fields",
       "pi_* X_j = 2 eps_jab y_a d_b, pi_* Gamma = 0, pi_* Delta = 0 on S^2, y_j R_j = 0")
def _(n, rng, err):
    f = hr.pauli_frame()
    x = _x4(rng)
    y = f.y(x)
    pf = hr.pushforward_fields(f, x)
    err.zero(pf.tilde - hr.rotation_fields(y))
    err.zero(pf.delta_tilde - 2 * y)
    err.zero(pf.gamma_tilde)
    err.zero(pf.delta_sphere)
    ys = hr.project_point(x).y
    err.zero(pf.sphere - hr.rotation_fields(ys))
    err.zero(ys @ hr.rotation_fields(ys))


def _eps_wedge(y, vecs) -> np.ndarray:
    return sum(hr.EPS[a, b, c] * y[a] * hr.wedge(vecs[b], vecs[c])
               for a in range(3) for b in range(3) for c in range(3))


@check("reduction.sphere_bivectors",
       "pi_*(|z|^2 G) = R_a (x) R_a = P_y, pi_*(|z|^2 Lambda) = eps_abc y_a R_b ^ R_c "
       "= eps_abc y_a d_b ^ d_c", zero_target=False)
def _(n, rng, err):
    y = hr.random_sphere_point(rng)
    gb, lb = hr.sphere_kaehler().bivectors(y)
    r = hr.rotation_fields(y)
    err.compare(gb, r.T @ r)
    err.compare(gb, hr.tangent_projector(y))
    err.compare(lb, _eps_wedge(y, r))
    err.compare(lb, _eps_wedge(y, np.eye(3)))


@check("reduction.sphere_metric", "g_S2 = dy_a (x) dy_a restricted to T S^2", zero_target=False)
def _(n, rng, err):
    sk = hr.sphere_kaehler()
    y = hr.random_sphere_point(rng)
    err.compare(sk.metric(y), sk.metric_formula(y))


@check("reduction.sphere_two_form", "omega_S2 = eps_abc y_a dy_b ^ dy_c restricted to T S^2",
       zero_target=False)
def _(n, rng, err):
    sk = hr.sphere_kaehler()
    y = hr.random_sphere_point(rng)
    p = hr.tangent_projector(y)
    err.compare(sk.two_form(y), p @ _eps_wedge(y, np.eye(3)) @ p)
    err.compare(sk.two_form(y), p @ sk.two_form_formula(y) @ p)


@check("reduction.sphere_complex_structure", "J_S2 v = (y / |y|) x v, J_S2^2 = -1 on T S^2",
       zero_target=False)
def _(n, rng, err):
    sk = hr.sphere_kaehler()
    y = hr.random_sphere_point(rng)
    p = hr.tangent_projector(y)
    j = sk.complex_structure(y)
    err.compare(j @ p, sk.complex_structure_formula(y) @ p)
    err.compare(j @ j @ p, -p)


@check("reduction.sphere_compatibility",
       "g_S2(J u, v) = omega_S2(u, v), g_S2(J u, J v) = g_S2(u, v), "
       "omega_S2(J u, J v) = omega_S2(u, v) on T S^2", zero_target=False)
def _(n, rng, err):
    sk = hr.sphere_kaehler()
    y = hr.random_sphere_point(rng)
    u, v = hr.random_tangent(y, rng), hr.random_tangent(y, rng)
    g, w, j = sk.metric(y), sk.two_form(y), sk.complex_structure(y)
    err.compare((j @ u) @ g @ v, u @ w @ v)
    err.compare((j @ u) @ g @ (j @ v), u @ g @ v)
    err.compare((j @ u) @ w @ (j @ v), u @ w @ v)


@check("reduction.sphere_closedness", "d omega_S2 = 0 (finite differences)", tol=FD_TOL)
def _(n, rng, err):
    err.zero(hr.sphere_kaehler().exterior_derivative(hr.random_sphere_point(rng)))


# --------------------------------------------------------------- unfolding --


@check("unfolding.basis_orthonormal", "Tr(s_a s_b) / 2 = d_ab for the generalized Pauli basis",
       max_trials=1)
def _(n, rng, err):
    b = generalized_pauli_basis(n)
    err.zero(mu_.gram(b) - np.eye(n * n))
    err.zero(b - np.conj(np.transpose(b, (0, 2, 1))))


@check("unfolding.momentum_coordinates",
       "y_a(mu(z)) = Tr(mu s_a) / 2 = f_{s_a}(z), mu = y_a s_a", zero_target=False)
def _(n, rng, err):
    z = random_state(n, rng)
    m = mu_.momentum_map(z)
    basis = generalized_pauli_basis(n)
    err.compare(m.coords, [hamiltonian_function(s, z) for s in basis])
    err.compare(from_coordinates(m.coords, basis), m.value)


@check("unfolding.momentum_rank_one",
       "mu(z) = |z><z|: mu^2 = |z|^2 mu, Tr mu = |z|^2, rank mu = 1", zero_target=False)
def _(n, rng, err):
    z = random_state(n, rng)
    m = mu_.momentum_map(z).value
    nz = np.vdot(z, z).real
    err.compare(m @ m, nz * m)
    err.compare(np.trace(m).real, nz)
    err.compare(np.linalg.matrix_rank(m, tol=1e-10 * nz), 1)


@check("unfolding.equivariance", "mu(U z) = U mu(z) U^dagger")
def _(n, rng, err):
    err.zero(mu_.equivariance_residual(haar_unitary(n, rng), random_state(n, rng)))


@check("unfolding.stabilizer", "U mu(z) U^dagger = mu(z) iff U z = e^{i a} z")
def _(n, rng, err):
    z = random_state(n, rng)
    u = mu_.stabilizer_unitary(z, rng)
    m = mu_.momentum_map(z).value
    err.zero(u @ m @ u.conj().T - m)
    uz = u @ z
    phase = np.vdot(z, uz) / np.vdot(z, z)
    err.zero(uz - phase * z)
    err.zero(abs(phase) - 1.0)


@check("unfolding.frame_brackets",
       "[phi_a, mu]_* = |z|^2 psi_a, [psi_a, mu]_* = -|z|^2 phi_a")
def _(n, rng, err):
    err.zero(mu_.frame_bracket_residual(mu_.build_orbit_frame(random_state(n, rng))))


@check("unfolding.frame_gram",
       "<phi_a, phi_b> = <psi_a, psi_b> = |z|^2 d_ab, <phi_a, psi_b> = 0", zero_target=False)
def _(n, rng, err):
    f = mu_.build_orbit_frame(random_state(n, rng))
    err.compare(mu_.gram(f.tangent_basis), f.norm_sq * np.eye(2 * (n - 1)))


@check("unfolding.frame_transverse",
       "<phi_a, mu> = <psi_a, mu> = <phi_a, 1> = <psi_a, 1> = 0")
def _(n, rng, err):
    f = mu_.build_orbit_frame(random_state(n, rng))
    for a in f.tangent_basis:
        err.zero(scalar(a, f.mu))
        err.zero(scalar(a, np.eye(n)))


@check("unfolding.frame_duality",
       "phi^_a([psi_b, mu]_*) = -|z|^4 d_ab, psi^_a([phi_b, mu]_*) = |z|^4 d_ab, "
       "phi^_a([phi_b, mu]_*) = psi^_a([psi_b, mu]_*) = 0 with A^(W_B) = Tr(AB) / 2",
       zero_target=False)
def _(n, rng, err):
    f = mu_.build_orbit_frame(random_state(n, rng))
    d = mu_.frame_duality(f)
    eye = f.norm_sq ** 2 * np.eye(n - 1)
    err.compare(d.phi_on_psi, -eye)
    err.compare(d.psi_on_phi, eye)
    err.compare(d.phi_on_phi, 0 * eye)
    err.compare(d.psi_on_psi, 0 * eye)


@check("unfolding.pushforward_formula",
       "mu_*G(A^, B^) = f_{AB + BA} = G(df_A, df_B), "
       "mu_*Lambda(A^, B^) = f_{[A, B]_*} = Lambda(df_A, df_B)", zero_target=False)
def _(n, rng, err):
    z = random_state(n, rng)
    a, b = random_hermitian(n, rng), random_hermitian(n, rng)
    err.compare(mu_.pushforward_tensors(z, a, b), mu_.pushforward_tensors_direct(z, a, b))


@check("unfolding.pushforward_frame_blocks",
       "mu_*G = |z|^4 (phi^ (x) phi^ + psi^ (x) psi^), mu_*Lambda = |z|^4 psi^ ^ phi^ "
       "on the frame 1-forms", zero_target=False)
def _(n, rng, err):
    f = mu_.build_orbit_frame(random_state(n, rng))
    gb, lb = mu_.pushforward_blocks(f)
    tb = f.tangent_basis
    if len(tb):
        i, j = rng.integers(len(tb), size=2)
        err.compare(mu_.pushforward_tensors(f.z, tb[i], tb[j]),
                    (gb.full()[i, j], lb.full(antisymmetric=True)[i, j]))
    s = f.norm_sq ** 2
    err.compare(gb.full(), s * np.eye(2 * (n - 1)))
    err.compare(lb.full(antisymmetric=True), s * _canonical_block(n - 1))


@check("unfolding.orbit_metric",
       "g(W_phi_a, W_phi_b) = g(W_psi_a, W_psi_b) = d_ab, g(W_phi_a, W_psi_b) = 0, "
       "g(X, Y) = <X, Y> / Tr rho", zero_target=False)
def _(n, rng, err):
    ok = mu_.orbit_kaehler(random_state(n, rng))
    tb = ok.frame.tangent_basis
    g = ok.metric_matrix
    err.compare(g, np.eye(2 * (n - 1)))
    err.compare(mu_.frame_values(ok.frame.mu, tb)[0], g)
    if len(tb):
        i, j = rng.integers(len(tb), size=2)
        err.compare(ok.metric(tb[i], tb[j]), g[i, j])


@check("unfolding.orbit_two_form",
       "omega(W_psi_a, W_phi_b) = d_ab, omega(W_phi, W_phi) = omega(W_psi, W_psi) = 0, "
       "omega(X, Y) = -<[X, rho]_*, Y> / (Tr rho)^2", zero_target=False)
def _(n, rng, err):
    ok = mu_.orbit_kaehler(random_state(n, rng))
    tb = ok.frame.tangent_basis
    w = ok.two_form_matrix
    err.compare(w, _canonical_block(n - 1))
    err.compare(mu_.frame_values(ok.frame.mu, tb)[1], w)
    if len(tb):
        i, j = rng.integers(len(tb), size=2)
        err.compare(ok.two_form(tb[i], tb[j]), w[i, j])


@check("unfolding.complex_structure_square", "J~^2 = -|z|^4 on the frame", zero_target=False)
def _(n, rng, err):
    ok = mu_.orbit_kaehler(random_state(n, rng))
    j = ok.complex_structure_matrix
    err.compare(j @ j, -ok.frame.norm_sq ** 2 * np.eye(j.shape[0]))


@check("unfolding.complex_structure_action",
       "J~ W_phi_a = -|z|^2 W_psi_a, J~ W_psi_a = |z|^2 W_phi_a, J~ X = -[X, rho]_*",
       zero_target=False)
def _(n, rng, err):
    ok = mu_.orbit_kaehler(random_state(n, rng))
    f = ok.frame
    tb = f.tangent_basis
    jm = ok.complex_structure_matrix
    for i, a in enumerate(tb):
        err.compare(ok.complex_structure(a), np.tensordot(jm[:, i], tb, axes=(0, 0)))
    for p, s in zip(f.phis, f.psis):
        err.compare(ok.complex_structure(p), -f.norm_sq * s)
        err.compare(ok.complex_structure(s), f.norm_sq * p)


@check("unfolding.kaehler_compatibility",
       "g(J X, Y) = omega(X, Y), J^2 = -1 on the orbit through a unit z", zero_target=False)
def _(n, rng, err):
    ok = mu_.orbit_kaehler(random_state(n, rng, normalize=True))
    tb = ok.frame.tangent_basis
    if len(tb) == 0:
        return
    x, y = _span(rng, tb, 2)
    err.compare(ok.metric(ok.complex_structure(x), y), ok.two_form(x, y))
    err.compare(ok.complex_structure(ok.complex_structure(x)), -x)


@check("unfolding.gauge_covariance",
       "frame matrices and frame-free values independent of the orthonormal choice of e_a",
       zero_target=False)
def _(n, rng, err):
    z = random_state(n, rng)
    a = mu_.orbit_kaehler(z)
    b = mu_.orbit_kaehler(z, seed=int(rng.integers(2 ** 31)))
    err.compare(a.metric_matrix, b.metric_matrix)
    err.compare(a.two_form_matrix, b.two_form_matrix)
    err.compare(a.complex_structure_matrix, b.complex_structure_matrix)
    tb = a.frame.tangent_basis
    if len(tb) == 0:
        return
    x, y = _span(rng, tb, 2)
    ca, cb = a.frame_coordinates(x), b.frame_coordinates(x)
    da, db = a.frame_coordinates(y), b.frame_coordinates(y)
    err.compare(ca @ a.metric_matrix @ da, cb @ b.metric_matrix @ db)
    err.compare(ca @ a.two_form_matrix @ da, cb @ b.two_form_matrix @ db)


@check("unfolding.tangent_dimension", "dim T_mu O = 2(N - 1)", zero_target=False)
def _(n, rng, err):
    err.compare(mu_.orbit_tangent_rank(random_state(n, rng)), 2 * (n - 1))


@check("unfolding.orbit_closedness", "d omega = 0 on the orbit (finite differences)",
       tol=FD_TOL, max_trials=10)
def _(n, rng, err):
    z = random_state(n, rng)
    tb = mu_.build_orbit_frame(z).tangent_basis
    if len(tb) < 3:
        err.zero(0.0)
        return
    err.zero(mu_.orbit_closedness(z, generators=_span(rng, tb, 3)))


# -------------------------------------------------------------- crosscheck --


def _unit2(rng) -> np.ndarray:
    return random_state(2, rng, normalize=True)


@check("crosscheck.literal_frame",
       "e = (z2, -z1): phi = 2(y1 s3 - y3 s1), psi = 2(y_gamma s2 + y2 s0)")
def _(n, rng, err):
    err.zero(mu_.n2_crosscheck(_unit2(rng)).literal_frame_dev)


@check("crosscheck.unfolding_fields",
       "mu_*(-X_2) = W_phi, mu_*(2(y2 Delta - y3 X_1 + y1 X_3)) = W_psi")
def _(n, rng, err):
    c = mu_.n2_crosscheck(_unit2(rng))
    err.zero(c.w_phi_dev)
    err.zero(c.w_psi_dev)


@check("crosscheck.metric_values",
       "g(V_phi, V_phi) = g(V_psi, V_psi) = 1, g(V_psi, V_phi) = 0", zero_target=False)
def _(n, rng, err):
    c = mu_.n2_crosscheck(_unit2(rng))
    err.compare([c.g_phi_phi, c.g_psi_psi, c.g_psi_phi], [1.0, 1.0, 0.0])


@check("crosscheck.symplectic_value", "omega(V_psi, V_phi) = 1", zero_target=False)
def _(n, rng, err):
    err.compare(mu_.n2_crosscheck(_unit2(rng)).omega_psi_phi, 1.0)


@check("crosscheck.j_gamma_delta", "J(Gamma) = Delta")
def _(n, rng, err):
    err.zero(mu_.n2_crosscheck(_unit2(rng)).j_gamma_delta_dev)


@check("crosscheck.j_tilde", "J~(W_phi) = -W_psi at |z| = 1 and mu_*(J V_phi) = -W_psi")
def _(n, rng, err):
    c = mu_.n2_crosscheck(_unit2(rng))
    err.zero(c.j_tilde_dev)
    err.zero(c.j_tilde_literal_dev)


@check("crosscheck.fubini_study",
       "unfolding metric <X, Y> / Tr rho = reduced sphere metric in Pauli coordinates")
def _(n, rng, err):
    err.zero(mu_.fubini_study_compare(_unit2(rng), n_pairs=10, rng=rng))


# ------------------------------------------------------------------ runner --


@dataclass
class CheckRecord:
    check_id: str
    suite: str
    identity: str
    dim: int
    n_trials: int
    max_abs_err: float
    max_rel_err: float
    tol: float
    metric: str          # which error is compared against tol: "abs" or "rel"
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


@dataclass
class Report:
    config: RunConfig
    records: list
    version: str
    wall_time_ms: float | None = None

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list:
        return [r.check_id for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "version": self.version,
            "config": asdict(self.config),
            "checks": [r.to_dict() for r in self.records],
            "n_checks": len(self.records),
            "n_failed": len(self.failures),
            "all_passed": self.all_passed,
            "wall_time_ms": self.wall_time_ms,
        }


def run_check(c: Check, config: RunConfig) -> CheckRecord:
    n = FIXED_DIM.get(c.suite, config.dim)
    trials = config.trials if c.max_trials is None else min(config.trials, c.max_trials)
    tol = config.tol if c.tol is None else c.tol
    err = Errors()
    for k in range(trials):
        c.func(n, trial_rng(config.seed, c.check_id, k), err)
    measured = err.max_abs if c.zero_target else err.max_rel
    return CheckRecord(c.check_id, c.suite, c.identity, n, trials, err.max_abs, err.max_rel,
                       tol, "abs" if c.zero_target else "rel", bool(measured <= tol))


def run_suite(config: RunConfig, timing: bool = False, log=None) -> Report:
    """Run every check of ``config.suite`` and collect the records.

    Reduction and cross-check checks always run at N = 2; under
    ``suite="all"`` the kahler and unfolding checks use ``config.dim``.
    """
    from . import __version__

    config.validate()
    t0 = time.perf_counter()
    records = []
    for c in checks_for(config.suite):
        rec = run_check(c, config)
        if log is not None:
            log.debug("%s abs=%.3e rel=%.3e tol=%.1e %s", rec.check_id, rec.max_abs_err,
                      rec.max_rel_err, rec.tol, "pass" if rec.passed else "FAIL")
        records.append(rec)
    wall = (time.perf_counter() - t0) * 1e3 if timing else None
    return Report(config, records, __version__, wall)
