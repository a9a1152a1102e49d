"""Reduction of the canonical structure along C^N_0 -> P(C^N).

The vertical fields are the Euler field (dilations) and the phase rotation.
For N = 2 the Pauli fields X_j and their quadratic functions y_j give the
two-stage projection R^4_0 -> R^3_0 -> S^2, and the rescaled tensors
|z|^2 G, |z|^2 Lambda push down to the Kähler structure of the sphere.

Wedge products are unnormalized: u ^ v = u (x) v - v (x) u.  Sphere tensors
live in the ambient y-chart of R^3 and are restricted with the tangent
projector P = I - y y^T / |y|^2.

Constants fixed by direct evaluation (the pushforward Jacobian route):

    |z|^2 Lambda           = (1/2) eps_abc y_a X_b ^ X_c / y_gamma + Gamma ^ Delta
    pi_*(|z|^2 G)          = R_a (x) R_a = P                       (y_gamma = 1/2)
    pi_*(|z|^2 Lambda)     = eps_abc y_a R_b ^ R_c = eps_abc y_a d_b ^ d_c
    metric on S^2          = dy_a (x) dy_a restricted to the tangent plane
    two-form on S^2        = eps_abc y_a dy_b ^ dy_c, i.e. (u, v) -> 2 y.(u x v)
    complex structure      = u -> (y / |y|) x u
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .algebra import PAULI
from .hilbert_kaehler import (
    CanonicalStructures,
    LinearVectorField,
    Tensor2,
    as_complex,
    as_real,
    canonical_structures,
    hermitian_field,
    lie_derivative,
    lie_derivative_fd,
    omega_matrix,
    quadratic_form,
)

EPS = np.zeros((3, 3, 3))
EPS[0, 1, 2] = EPS[1, 2, 0] = EPS[2, 0, 1] = 1.0
EPS[0, 2, 1] = EPS[2, 1, 0] = EPS[1, 0, 2] = -1.0


def wedge(u, v) -> np.ndarray:
    return np.outer(u, v) - np.outer(v, u)


def cross_matrix(v) -> np.ndarray:
    """Matrix of u -> v x u."""
    return -np.einsum("ijk,k->ij", EPS, np.asarray(v, dtype=float))


def _nonzero(x) -> np.ndarray:
    x = as_real(x)
    if not np.any(x):
        raise ValueError("the reduction is undefined at z = 0")
    return x


# ---------------------------------------------------------------- vertical --


@dataclass(frozen=True)
class VerticalPair:
    delta: LinearVectorField
    gamma: LinearVectorField

    @property
    def dim(self) -> int:
        return self.delta.dim // 2


def vertical_fields(n: int) -> VerticalPair:
    """Euler field Delta = x and phase rotation Gamma = -J(Delta)."""
    cs = canonical_structures(n)
    return VerticalPair(
        delta=LinearVectorField(np.eye(2 * n)),
        gamma=LinearVectorField(-cs.J.matrix, is_hermitian=True),
    )


def symplectic_dual(v) -> np.ndarray:
    """Covector S(V) with omega(X', V) = S(V)(X') for all X'."""
    v = np.asarray(v, dtype=float)
    return omega_matrix(v.size // 2) @ v


@dataclass(frozen=True)
class Connection1Form:
    """theta = p_a dq_a - q_a dp_a, equal to S(Delta)."""

    dim: int

    def __call__(self, x) -> np.ndarray:
        x = as_real(x)
        if x.size != 2 * self.dim:
            raise ValueError("dimension mismatch")
        return symplectic_dual(x)


# ------------------------------------------------------------ Pauli frame --


@dataclass(frozen=True)
class PauliFrame:
    """Hermitian fields of the Pauli matrices on R^4 and their functions y_j."""

    fields: tuple

    def y(self, x) -> np.ndarray:
        x = as_real(x)
        return np.array([0.5 * x @ quadratic_form(s) @ x for s in PAULI[1:]])

    def y_gamma(self, x) -> float:
        x = as_real(x)
        return 0.5 * float(x @ x)

    def vectors(self, x) -> np.ndarray:
        """Rows X_1(x), X_2(x), X_3(x)."""
        x = as_real(x)
        return np.array([f(x) for f in self.fields])

    def gradients(self, x) -> np.ndarray:
        """Rows dy_1, dy_2, dy_3 at x; this is the Jacobian of x -> y."""
        x = as_real(x)
        return np.array([quadratic_form(s) @ x for s in PAULI[1:]])


def pauli_frame(n: int = 2) -> PauliFrame:
    if n != 2:
        raise ValueError("the Pauli frame exists only for N = 2")
    return PauliFrame(tuple(hermitian_field(s) for s in PAULI[1:]))


# ---------------------------------------------------------- projectability --


def _span_residual(c, basis) -> float:
    a = np.array([b.ravel() for b in basis]).T
    coef, *_ = np.linalg.lstsq(a, c.ravel(), rcond=None)
    return float(np.max(np.abs(a @ coef - c.ravel())))


def projectability_residual(x: LinearVectorField, v: VerticalPair) -> float:
    """Distance of [W, Delta] and [W, Gamma] from span{Delta, Gamma}."""
    w = x.matrix
    if w.shape != v.delta.matrix.shape:
        raise ValueError("dimension mismatch")
    basis = (v.delta.matrix, v.gamma.matrix)
    res = 0.0
    for vert in basis:
        res = max(res, _span_residual(w @ vert - vert @ w, basis))
    return res


def is_projectable_field(x: LinearVectorField, v: VerticalPair, tol: float = 1e-10) -> bool:
    scale = max(1.0, float(np.max(np.abs(x.matrix))))
    return projectability_residual(x, v) <= tol * scale


@dataclass(frozen=True)
class RescaledTensor:
    """The position-dependent tensor |x|^2 T for a constant tensor T."""

    base: Tensor2

    @property
    def variance(self) -> str:
        return self.base.variance

    def __call__(self, x) -> np.ndarray:
        x = _nonzero(x)
        return float(x @ x) * np.asarray(self.base.matrix)

    def at(self, x) -> Tensor2:
        return Tensor2(self(x), self.base.variance, self.base.symmetry)


class RescaledTensors(NamedTuple):
    G: RescaledTensor
    Lambda: RescaledTensor
    J: RescaledTensor


def rescaled_tensors(structures: CanonicalStructures | int) -> RescaledTensors:
    cs = canonical_structures(structures) if isinstance(structures, int) else structures
    if cs.G.dim < 4:
        raise ValueError("rescaled tensors need N >= 2")
    return RescaledTensors(RescaledTensor(cs.G), RescaledTensor(cs.Lambda), RescaledTensor(cs.J))


def is_projectable_tensor(t, v: VerticalPair, points=None, tol: float = 1e-6,
                          rng: np.random.Generator | None = None) -> bool:
    """True iff the Lie derivatives of ``t`` along Delta and Gamma vanish.

    Constant tensors use the exact formula; position-dependent ones
    (e.g. :class:`RescaledTensor` or any callable with a ``variance``
    attribute) use the flow finite-difference derivative at sample points.
    """
    variance = t.variance
    if variance != "contravariant":
        raise ValueError("projectability is defined here for contravariant tensors")
    if isinstance(t, Tensor2):
        scale = max(1.0, float(np.max(np.abs(t.matrix))))
        return all(
            np.max(np.abs(lie_derivative(f, t).matrix)) <= tol * scale
            for f in (v.delta, v.gamma)
        )
    if points is None:
        rng = rng or np.random.default_rng(0)
        points = rng.standard_normal((5, v.delta.dim))
    for x in points:
        scale = max(1.0, float(np.max(np.abs(t(x)))))
        for f in (v.delta, v.gamma):
            if np.max(np.abs(lie_derivative_fd(f, t, x, variance))) > tol * scale:
                return False
    return True


def jacobiator(bivector: Callable, a, b, c, x, h: float = 1e-5) -> float:
    """Jacobi sum of {f, g} = P(df, dg) for the linear functions a.x, b.x, c.x."""
    x = as_real(x)

    def bracket_grad(u, w):
        grad = np.empty(x.size)
        for i in range(x.size):
            e = np.zeros(x.size)
            e[i] = h
            grad[i] = (u @ bivector(x + e) @ w - u @ bivector(x - e) @ w) / (2 * h)
        return grad

    p = bivector(x)
    total = 0.0
    for f, g, k in ((a, b, c), (b, c, a), (c, a, b)):
        total += np.asarray(f) @ p @ bracket_grad(np.asarray(g), np.asarray(k))
    return float(total)


# ----------------------------------------------------- frame decompositions --


def g_tilde_from_frame(x, frame: PauliFrame | None = None) -> np.ndarray:
    """Delta (x) Delta + X_j (x) X_j."""
    frame = frame or pauli_frame()
    x = _nonzero(x)
    xs = frame.vectors(x)
    return np.outer(x, x) + sum(np.outer(v, v) for v in xs)


def lambda_tilde_from_frame(x, frame: PauliFrame | None = None) -> np.ndarray:
    """[(1/2) eps_abc y_a X_b ^ X_c + y_gamma Gamma ^ Delta] / y_gamma."""
    frame = frame or pauli_frame()
    x = _nonzero(x)
    xs = frame.vectors(x)
    y = frame.y(x)
    yg = frame.y_gamma(x)
    gamma = vertical_fields(2).gamma(x)
    tot = 0.5 * np.einsum("abc,a,bcij->ij", EPS, y,
                          np.array([[wedge(u, w) for w in xs] for u in xs]))
    return (tot + yg * wedge(gamma, x)) / yg


def j_tilde_from_frame(x, frame: PauliFrame | None = None) -> np.ndarray:
    """Delta (x) S(Delta) + X_k (x) S(X_k) as a (1,1) matrix."""
    frame = frame or pauli_frame()
    x = _nonzero(x)
    out = np.outer(x, symplectic_dual(x))
    for v in frame.vectors(x):
        out += np.outer(v, symplectic_dual(v))
    return out


def j_tilde_connection_form(x, frame: PauliFrame | None = None) -> np.ndarray:
    """Delta (x) theta - X_k (x) dy_k."""
    frame = frame or pauli_frame()
    x = _nonzero(x)
    out = np.outer(x, Connection1Form(2)(x))
    for v, dy in zip(frame.vectors(x), frame.gradients(x)):
        out -= np.outer(v, dy)
    return out


# ------------------------------------------------------------- projection --


@dataclass(frozen=True)
class SphereChart:
    """A point of the sphere |y| = y_gamma in the ambient y-chart."""

    y: np.ndarray
    y_gamma: float = 0.5

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        if y.shape != (3,):
            raise ValueError("sphere points have three coordinates")
        if abs(y @ y - self.y_gamma ** 2) > 1e-10 * max(1.0, self.y_gamma ** 2):
            raise ValueError("point is not on the sphere |y| = y_gamma")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)


def project_point(z, y_gamma: float = 0.5) -> SphereChart:
    """Bloch-sphere point of the ray through z."""
    x = _nonzero(z)
    if x.size != 4:
        raise ValueError("project_point needs N = 2")
    frame = pauli_frame()
    y = frame.y(x) * (y_gamma / frame.y_gamma(x))
    # renormalize against rounding so the chart invariant holds exactly
    y = y * (y_gamma / np.linalg.norm(y))
    return SphereChart(y, y_gamma)


def lift_point(y, y_gamma: float = 0.5) -> np.ndarray:
    """A z with |z|^2 = 2 y_gamma projecting onto y (a local section)."""
    y = np.asarray(y.y if isinstance(y, SphereChart) else y, dtype=float)
    n = y / np.linalg.norm(y)
    if n[2] >= 0:
        z1 = np.sqrt((1 + n[2]) / 2)
        z = np.array([z1, (n[0] + 1j * n[1]) / (2 * z1)])
    else:
        z2 = np.sqrt((1 - n[2]) / 2)
        z = np.array([(n[0] - 1j * n[1]) / (2 * z2), z2])
    return z * np.sqrt(2 * y_gamma)


def radial_jacobian(y, y_gamma: float = 0.5) -> np.ndarray:
    """Jacobian of y -> y_gamma y / |y| (the projection along the Euler field)."""
    y = np.asarray(y, dtype=float)
    r = np.linalg.norm(y)
    n = y / r
    return (y_gamma / r) * (np.eye(3) - np.outer(n, n))


def projection_jacobian(x, y_gamma: float = 0.5) -> np.ndarray:
    """Jacobian at x of R^4_0 -> R^3_0 -> S^2."""
    frame = pauli_frame()
    x = _nonzero(x)
    return radial_jacobian(frame.y(x), y_gamma) @ frame.gradients(x)


def rotation_fields(y) -> np.ndarray:
    """Rows R_j = 2 eps_jab y_a d/dy_b."""
    return 2 * np.einsum("jab,a->jb", EPS, np.asarray(y, dtype=float))


class ProjectedFields(NamedTuple):
    tilde: np.ndarray          # rows pi^Gamma_* X_j on R^3_0
    sphere: np.ndarray         # rows pi_* X_j on S^2
    delta_tilde: np.ndarray    # pi^Gamma_* Delta
    delta_sphere: np.ndarray   # pi_* Delta
    gamma_tilde: np.ndarray    # pi^Gamma_* Gamma


def pushforward_fields(frame: PauliFrame, x, y_gamma: float = 0.5) -> ProjectedFields:
    """Push the frame and the vertical fields through the projection Jacobians."""
    x = _nonzero(x)
    jac = frame.gradients(x)
    full = projection_jacobian(x, y_gamma)
    v = vertical_fields(2)
    xs = frame.vectors(x)
    return ProjectedFields(
        tilde=xs @ jac.T,
        sphere=xs @ full.T,
        delta_tilde=jac @ v.delta(x),
        delta_sphere=full @ v.delta(x),
        gamma_tilde=jac @ v.gamma(x),
    )


def reduced_bivectors(x, y_gamma: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """pi_*(|z|^2 G) and pi_*(|z|^2 Lambda) at the image of x, in the y-chart."""
    x = _nonzero(x)
    t = rescaled_tensors(2)
    jac = projection_jacobian(x, y_gamma)
    return jac @ t.G(x) @ jac.T, jac @ t.Lambda(x) @ jac.T


def invert_symmetric(m) -> np.ndarray:
    """Covariant form of a contravariant symmetric tensor (on its support)."""
    return np.linalg.pinv(m, hermitian=True)


def invert_bivector(m) -> np.ndarray:
    """Covariant 2-form w with w(D_a, D_b) = P(a, b), D = P^T a."""
    return np.linalg.pinv(m).T


def tangent_projector(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return np.eye(3) - np.outer(y, y) / (y @ y)


@dataclass(frozen=True)
class SphereKaehler:
    """Metric, two-form and complex structure induced on S^2.

    The evaluators go through the reduction: lift y to C^2_0, push the
    rescaled tensors down with the projection Jacobian and invert on the
    tangent plane.  The ``*_formula`` methods give the closed forms.
    """

    y_gamma: float = 0.5

    def _point(self, y):
        return np.asarray(y.y if isinstance(y, SphereChart) else y, dtype=float)

    def bivectors(self, y):
        return reduced_bivectors(as_real(lift_point(self._point(y), self.y_gamma)), self.y_gamma)

    def metric(self, y) -> np.ndarray:
        return invert_symmetric(self.bivectors(y)[0])

    def two_form(self, y) -> np.ndarray:
        return invert_bivector(self.bivectors(y)[1])

    def complex_structure(self, y) -> np.ndarray:
        """The (1,1) tensor sending pi_*(X_k) to the tangent part of d/dy_k."""
        y = self._point(y)
        x = as_real(lift_point(y, self.y_gamma))
        r = pushforward_fields(pauli_frame(), x, self.y_gamma).sphere.T
        return tangent_projector(y) @ np.linalg.pinv(r)

    def metric_formula(self, y) -> np.ndarray:
        return tangent_projector(self._point(y))

    def two_form_formula(self, y) -> np.ndarray:
        y = self._point(y)
        return np.einsum("abc,a->bc", EPS, y) * 2

    def complex_structure_formula(self, y) -> np.ndarray:
        y = self._point(y)
        return cross_matrix(y / np.linalg.norm(y))

    def extended_two_form(self, y) -> np.ndarray:
        """Pullback of the two-form to R^3_0 along the radial projection."""
        y = np.asarray(y, dtype=float)
        yp = y * (self.y_gamma / np.linalg.norm(y))
        jac = radial_jacobian(y, self.y_gamma)
        return jac.T @ self.two_form(yp) @ jac

    def exterior_derivative(self, y, h: float = 1e-3) -> float:
        """|d w|(e1, e2, e3) of the extended two-form.

        Central differences with one Richardson step.
        """
        y = np.asarray(y, dtype=float)

        def deriv(step):
            d = np.empty((3, 3, 3))
            for k in range(3):
                e = np.zeros(3)
                e[k] = step
                d[k] = (self.extended_two_form(y + e) - self.extended_two_form(y - e)) / (2 * step)
            return d

        d = (4 * deriv(h / 2) - deriv(h)) / 3
        # d_i w_jk + d_j w_ki + d_k w_ij at (i, j, k) = (0, 1, 2)
        return float(abs(d[0, 1, 2] + d[1, 2, 0] + d[2, 0, 1]))


def sphere_kaehler(y_gamma: float = 0.5) -> SphereKaehler:
    return SphereKaehler(y_gamma)


def random_sphere_point(rng: np.random.Generator, y_gamma: float = 0.5) -> np.ndarray:
    v = rng.standard_normal(3)
    return y_gamma * v / np.linalg.norm(v)


def random_tangent(y, rng: np.random.Generator) -> np.ndarray:
    return tangent_projector(y) @ rng.standard_normal(3)


def gauge_action(z, phase: float, scale: float) -> np.ndarray:
    """z -> scale * exp(i phase) * z."""
    return scale * np.exp(1j * phase) * as_complex(z)
