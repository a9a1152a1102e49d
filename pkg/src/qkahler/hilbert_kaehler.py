"""Canonical Kähler structure on C^N viewed as R^2N.

Chart ordering is x = (q_1..q_N, p_1..p_N) with z_a = q_a + i p_a.  With this
ordering

    g     = identity                      (covariant, symmetric)
    omega = [[0, I], [-I, 0]]             (covariant, antisymmetric)
    J     = [[0, -I], [I, 0]]             (mixed; J(d/dq_a) = d/dp_a)
    G     = g^-1 = identity               (contravariant)
    Lambda = d/dq_a ^ d/dp_a = omega      (contravariant; Lambda = -omega^-1)

and g(Ju, v) = omega(u, v), i.e. J^T g = omega as matrices.

A Hermitian matrix H = B + iA defines the linear field X_H(x) = W x with
W = [[A, B], [-B, A]]; its flow is z -> exp(-iHt) z and its Hamiltonian
function is f_H(z) = 1/2 <z|H z>, with i_{X_H} omega = d f_H.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy.linalg import expm

from .algebra import TOL_SYM, as_hermitian

VARIANCES = ("covariant", "contravariant", "mixed")
SYMMETRIES = ("symmetric", "antisymmetric", "none")


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HilbertPoint:
    """A vector of C^N stored through its real chart (q, p)."""

    coords: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coords)
        if c.ndim != 1 or c.size == 0 or c.size % 2:
            raise ValueError("coords must be a non-empty vector of even length 2N")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_complex(cls, z) -> "HilbertPoint":
        z = np.asarray(z, dtype=complex).ravel()
        return cls(np.concatenate([z.real, z.imag]))

    @property
    def dim(self) -> int:
        return self.coords.size // 2

    @property
    def q(self) -> np.ndarray:
        return self.coords[: self.dim]

    @property
    def p(self) -> np.ndarray:
        return self.coords[self.dim:]

    @property
    def z(self) -> np.ndarray:
        return self.q + 1j * self.p

    @property
    def norm_sq(self) -> float:
        return float(self.coords @ self.coords)


PointLike = Union[HilbertPoint, np.ndarray]


def as_complex(z) -> np.ndarray:
    """Amplitudes of ``z``.

    Real arrays are read as chart coordinates (q, p); complex arrays as
    amplitudes.
    """
    if isinstance(z, HilbertPoint):
        return z.z
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return z.astype(complex).ravel()
    return HilbertPoint(z).z


def as_real(z) -> np.ndarray:
    """Chart coordinates (q, p) of ``z`` (see :func:`as_complex`)."""
    if isinstance(z, HilbertPoint):
        return np.asarray(z.coords)
    z = np.asarray(z)
    if np.iscomplexobj(z):
        z = z.ravel()
        return np.concatenate([z.real, z.imag])
    return z.astype(float).ravel()


@dataclass(frozen=True)
class Tensor2:
    """Rank-2 tensor with constant components in the (q, p) chart."""

    matrix: np.ndarray
    variance: str
    symmetry: str = "none"

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Tensor2 needs a square matrix")
        if self.variance not in VARIANCES:
            raise ValueError(f"unknown variance {self.variance!r}")
        if self.symmetry not in SYMMETRIES:
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        if self.symmetry != "none" and self.variance == "mixed":
            raise ValueError("symmetry flags only apply to covariant/contravariant tensors")
        sign = {"symmetric": 1.0, "antisymmetric": -1.0}.get(self.symmetry)
        if sign is not None:
            scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
            if np.max(np.abs(m - sign * m.T)) > 1e-10 * scale:
                raise ValueError(f"matrix is not {self.symmetry}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, u, v=None):
        """Evaluate on a pair (covariant/contravariant) or act on a vector (mixed)."""
        if v is None:
            if self.variance != "mixed":
                raise TypeError("only mixed tensors act on a single vector")
            return self.matrix @ np.asarray(u)
        return float(np.asarray(u) @ self.matrix @ np.asarray(v))


@dataclass(frozen=True)
class LinearVectorField:
    """The linear vector field x -> W x on R^2N."""

    matrix: np.ndarray
    is_hermitian: bool = False

    def __post_init__(self):
        w = _frozen(self.matrix)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2:
            raise ValueError("field matrix must be 2N x 2N")
        if self.is_hermitian and not is_unitary_block(w):
            raise ValueError("matrix does not have the block form [[A, B], [-B, A]]")
        object.__setattr__(self, "matrix", w)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ as_real(x)

    def bracket(self, other: "LinearVectorField") -> "LinearVectorField":
        """Lie bracket [X_W, X_V] = X_{VW - WV}."""
        return LinearVectorField(other.matrix @ self.matrix - self.matrix @ other.matrix)


def is_unitary_block(w, tol: float = 1e-12) -> bool:
    w = np.asarray(w, dtype=float)
    n = w.shape[0] // 2
    a, b = w[:n, :n], w[:n, n:]
    scale = max(1.0, float(np.max(np.abs(w))))
    return bool(
        np.allclose(w[n:, n:], a, atol=tol * scale, rtol=0)
        and np.allclose(w[n:, :n], -b, atol=tol * scale, rtol=0)
        and np.allclose(a, -a.T, atol=tol * scale, rtol=0)
        and np.allclose(b, b.T, atol=tol * scale, rtol=0)
    )


class CanonicalStructures(NamedTuple):
    g: Tensor2
    omega: Tensor2
    J: Tensor2
    G: Tensor2
    Lambda: Tensor2


def omega_matrix(n: int) -> np.ndarray:
    z, e = np.zeros((n, n)), np.eye(n)
    return np.block([[z, e], [-e, z]])


def canonical_structures(n: int) -> CanonicalStructures:
    if int(n) != n or n < 1:
        raise ValueError("N must be a positive integer")
    n = int(n)
    om = omega_matrix(n)
    eye = np.eye(2 * n)
    return CanonicalStructures(
        g=Tensor2(eye, "covariant", "symmetric"),
        omega=Tensor2(om, "covariant", "antisymmetric"),
        J=Tensor2(om.T, "mixed"),
        G=Tensor2(eye, "contravariant", "symmetric"),
        Lambda=Tensor2(om, "contravariant", "antisymmetric"),
    )


def field_matrix(h) -> np.ndarray:
    """Real 2N x 2N generator [[A, B], [-B, A]] of a Hermitian H = B + iA."""
    h = as_hermitian(h)
    a, b = h.imag, h.real
    return np.block([[a, b], [-b, a]])


def hermitian_field(h) -> LinearVectorField:
    return LinearVectorField(field_matrix(h), is_hermitian=True)


def matrix_from_field(w) -> np.ndarray:
    """Inverse of :func:`field_matrix` for block-form generators."""
    w = np.asarray(w.matrix if isinstance(w, LinearVectorField) else w, dtype=float)
    n = w.shape[0] // 2
    return w[:n, n:] + 1j * w[:n, :n]


def quadratic_form(h) -> np.ndarray:
    """Real symmetric M with f_H(x) = 1/2 x^T M x, M = [[B, -A], [A, B]]."""
    h = as_hermitian(h)
    a, b = h.imag, h.real
    return np.block([[b, -a], [a, b]])


def hamiltonian_function(h, z) -> float:
    """f_H(z) = 1/2 <z|H z> (real for Hermitian H)."""
    h = as_hermitian(h)
    zc = as_complex(z)
    if zc.size != h.shape[0]:
        raise ValueError("dimension mismatch between H and z")
    return float(0.5 * np.vdot(zc, h @ zc).real)


def hamiltonian_gradient(h, z) -> np.ndarray:
    """d f_H at z as a covector in the (q, p) chart."""
    return quadratic_form(h) @ as_real(z)


def _matrix_of(t):
    return t.matrix if isinstance(t, (Tensor2, LinearVectorField)) else np.asarray(t, float)


def lie_derivative(x: LinearVectorField, t: Tensor2) -> Tensor2:
    """Exact Lie derivative of a constant tensor along a linear field.

    covariant:      W^T T + T W
    contravariant:  -(W T + T W^T)
    mixed:          T W - W T
    """
    w = _matrix_of(x)
    m = t.matrix
    if w.shape != m.shape:
        raise ValueError("dimension mismatch")
    if t.variance == "covariant":
        out = w.T @ m + m @ w
    elif t.variance == "contravariant":
        out = -(w @ m + m @ w.T)
    else:
        out = m @ w - w @ m
    return Tensor2(out, t.variance, t.symmetry)


TensorFieldLike = Union[Tensor2, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def _pullback(phi, phi_inv, val, variance):
    if variance == "covariant":
        return phi.T @ val @ phi
    if variance == "contravariant":
        return phi_inv @ val @ phi_inv.T
    return phi_inv @ val @ phi


def lie_derivative_fd(w, field_: TensorFieldLike, x, variance: str | None = None,
                      h: float = 1e-5) -> np.ndarray:
    """Finite-difference Lie derivative from the flow definition.

    Differentiates t -> (phi_t^* T)_x at t = 0, where phi_t = exp(tW) is the
    flow of the linear field, using central differences with one Richardson
    extrapolation step.  ``field_`` may be a constant tensor or a callable
    returning the component matrix at a point, so position-dependent tensors
    are supported.
    """
    w = _matrix_of(w)
    x = as_real(x)
    if isinstance(field_, Tensor2):
        variance = variance or field_.variance
        const = field_.matrix
        value = lambda _y: const
    elif callable(field_):
        value = field_
    else:
        const = np.asarray(field_, dtype=float)
        value = lambda _y: const
    if variance not in VARIANCES:
        raise ValueError("variance required for raw tensor fields")

    def pulled(t):
        phi = expm(t * w)
        return _pullback(phi, expm(-t * w), np.asarray(value(phi @ x)), variance)

    def central(s):
        return (pulled(s) - pulled(-s)) / (2 * s)

    return (4 * central(h / 2) - central(h)) / 3


class UnitaryFlags(NamedTuple):
    jg: bool
    jomega: bool
    gomega: bool


def lie_derivative_norms(w, method: str = "exact", x=None) -> tuple[float, float, float]:
    """Max-abs of (L_W g, L_W omega, L_W J)."""
    w = _matrix_of(w)
    cs = canonical_structures(w.shape[0] // 2)
    out = []
    for t in (cs.g, cs.omega, cs.J):
        if method == "exact":
            d = lie_derivative(LinearVectorField(w), t).matrix
        elif method == "fd":
            pt = np.ones(w.shape[0]) if x is None else as_real(x)
            d = lie_derivative_fd(w, t, pt)
        else:
            raise ValueError(f"unknown method {method!r}")
        out.append(float(np.max(np.abs(d))))
    return tuple(out)


def check_unitary_conditions(w, tol: float | None = None, method: str = "exact",
                             x=None) -> UnitaryFlags:
    """Which pairs of (L g, L omega, L J) vanish along the linear field ``w``.

    The default tolerance is 1e-12 for the exact formulas and 1e-6 for the
    finite-difference oracle, scaled by max(1, |W|).
    """
    w = _matrix_of(w)
    if tol is None:
        tol = 1e-12 if method == "exact" else 1e-6
    tol = tol * max(1.0, float(np.max(np.abs(w))))
    lg, lw, lj = (v <= tol for v in lie_derivative_norms(w, method, x))
    return UnitaryFlags(jg=lj and lg, jomega=lj and lw, gomega=lg and lw)


class BracketValues(NamedTuple):
    lhs_omega: float
    rhs_omega: float
    lhs_g: float
    rhs_g: float


def bracket_identities(h1, h2, z) -> BracketValues:
    """Both sides of omega(X1, X2) = f_{-i[H1,H2]} and g(X1, X2) = f_{H1H2+H2H1}.

    Left-hand sides are evaluated in the real chart, right-hand sides on
    the complex amplitudes.
    """
    h1 = as_hermitian(h1)
    h2 = as_hermitian(h2)
    x = as_real(z)
    n = h1.shape[0]
    if h2.shape[0] != n or x.size != 2 * n:
        raise ValueError("dimension mismatch")
    u = field_matrix(h1) @ x
    v = field_matrix(h2) @ x
    comm = -1j * (h1 @ h2 - h2 @ h1)
    anti = h1 @ h2 + h2 @ h1
    return BracketValues(
        lhs_omega=float(u @ omega_matrix(n) @ v),
        rhs_omega=hamiltonian_function((comm + comm.conj().T) / 2, z),
        lhs_g=float(u @ v),
        rhs_g=hamiltonian_function((anti + anti.conj().T) / 2, z),
    )


def propagator(h, t: float) -> np.ndarray:
    """exp(-iHt) from the Hermitian eigendecomposition."""
    h = as_hermitian(h)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def schrodinger_flow(h, z0, t: float) -> HilbertPoint:
    zc = as_complex(z0)
    u = propagator(h, t)
    if u.shape[0] != zc.size:
        raise ValueError("dimension mismatch between H and z0")
    return HilbertPoint.from_complex(u @ zc)


def unitary_algebra_rank(n: int) -> int:
    """Real dimension of {W : L_W g = 0, L_W omega = 0}.

    With g = 1 the first condition makes W skew, and then the second says W
    commutes with Omega.  W -> (W + Omega W Omega^T)/2 is the orthogonal
    projector onto that commutant inside the skew matrices, so the dimension
    is its trace over an orthonormal skew basis.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    om = omega_matrix(n)
    d = 2 * n
    total = 0.0
    for i in range(d):
        for j in range(i + 1, d):
            # E = (e_i e_j^T - e_j e_i^T)/sqrt(2); <E, Om E Om^T> in closed index form
            c = om[:, i][:, None] * om[:, j][None, :]
            conj = (c - c.T) / np.sqrt(2.0)
            total += 0.5 * (1.0 + np.sqrt(2.0) * conj[i, j])
    return int(round(total))
