"""Momentum map C^N -> u*_N and the Kähler structure on its coadjoint orbits.

Conventions: u*_N is the space of Hermitian matrices with scalar product
<A, B> = Tr(AB)/2 and bracket [A, B]_* = -i[A, B].  A tangent vector of
u*_N at any point is again a Hermitian matrix W_A <-> A, and the 1-form
attached to A acts by A^(W_B) = <A, B>.

At mu = |z><z| the orbit tangent space is spanned by

    phi_a = |e_a><z| + |z><e_a|,    psi_a = i(|z><e_a| - |e_a><z|)

for an orthonormal basis e_a of the complement of z.  Inverting the pushed
forward tensors gives, frame-free,

    metric(X, Y)       = <X, Y> / |z|^2
    two_form(X, Y)     = -<[X, mu]_*, Y> / |z|^4
    complex_str(X)     = -[X, mu]_*            (squares to -|z|^4)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm, expm_frechet

from .algebra import (
    PAULI,
    as_hermitian,
    bracket,
    coordinates,
    from_coordinates,
    generalized_pauli_basis,
    haar_unitary,
    scalar,
)
from .hilbert_kaehler import (
    HilbertPoint,
    as_complex,
    as_real,
    canonical_structures,
    hamiltonian_function,
    hamiltonian_gradient,
    omega_matrix,
)
from .hopf_reduction import pauli_frame, project_point, sphere_kaehler, vertical_fields


def _nonzero_complex(z) -> np.ndarray:
    zc = as_complex(z)
    if not np.any(zc):
        raise ValueError("the momentum map construction needs z != 0")
    return zc


def _herm(a) -> np.ndarray:
    return (a + a.conj().T) / 2


@dataclass(frozen=True)
class DualAlgebraPoint:
    """A Hermitian matrix together with its coordinates in the generalized Pauli basis."""

    value: np.ndarray

    def __post_init__(self):
        v = np.array(as_hermitian(self.value), dtype=complex)
        v.setflags(write=False)
        object.__setattr__(self, "value", v)

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    @property
    def basis(self) -> np.ndarray:
        return generalized_pauli_basis(self.dim)

    @property
    def coords(self) -> np.ndarray:
        return coordinates(self.value, self.basis)

    def reconstruct(self) -> np.ndarray:
        return from_coordinates(self.coords, self.basis)


def momentum_map(z) -> DualAlgebraPoint:
    """mu(z) = |z><z|."""
    zc = _nonzero_complex(z)
    return DualAlgebraPoint(np.outer(zc, zc.conj()))


def momentum_differential(z, v) -> np.ndarray:
    """d mu at z applied to the tangent vector v: |v><z| + |z><v|.

    ``v`` is given in chart coordinates (q, p) or as complex amplitudes.
    """
    zc = as_complex(z)
    vc = as_complex(v)
    return np.outer(vc, zc.conj()) + np.outer(zc, vc.conj())


def equivariance_residual(u, z) -> float:
    """max |mu(Uz) - U mu(z) U^dagger|."""
    zc = _nonzero_complex(z)
    lhs = momentum_map(u @ zc).value
    rhs = u @ momentum_map(zc).value @ u.conj().T
    return float(np.max(np.abs(lhs - rhs)))


def stabilizer_unitary(z, rng: np.random.Generator) -> np.ndarray:
    """A random unitary commuting with mu(z): a phase on z and a unitary on its complement."""
    zc = _nonzero_complex(z)
    n = zc.size
    v = zc / np.linalg.norm(zc)
    comp = complement_basis(zc)
    u = np.exp(1j * rng.uniform(0, 2 * np.pi)) * np.outer(v, v.conj())
    if n > 1:
        w = haar_unitary(n - 1, rng)
        u = u + comp.T @ w @ comp.conj()
    return u


# ------------------------------------------------------------------ frame --


def complement_basis(z) -> np.ndarray:
    """Orthonormal basis (rows) of the complement of z via a Householder reflection.

    The reflection maps z/|z| to a multiple of the first standard basis
    vector; its remaining columns span the orthogonal complement.
    """
    zc = _nonzero_complex(z)
    n = zc.size
    v = zc / np.linalg.norm(zc)
    phase = np.exp(1j * np.angle(v[0])) if v[0] != 0 else 1.0
    w = v.copy()
    w[0] += phase
    h = np.eye(n, dtype=complex) - 2.0 * np.outer(w, w.conj()) / np.vdot(w, w).real
    return h[:, 1:].T.copy()


@dataclass(frozen=True)
class OrbitFrame:
    z: np.ndarray
    complement: np.ndarray
    phis: np.ndarray
    psis: np.ndarray

    @property
    def dim(self) -> int:
        return self.z.size

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.z, self.z).real)

    @property
    def mu(self) -> np.ndarray:
        return np.outer(self.z, self.z.conj())

    @property
    def tangent_basis(self) -> np.ndarray:
        """(phi_1..phi_{N-1}, psi_1..psi_{N-1})."""
        return np.concatenate([self.phis, self.psis])


def frame_from_complement(z, complement) -> OrbitFrame:
    zc = _nonzero_complex(z)
    comp = np.asarray(complement, dtype=complex).reshape(-1, zc.size)
    zz = zc[:, None]
    phis, psis = [], []
    for e in comp:
        ee = e[:, None]
        a = ee @ zz.conj().T
        b = zz @ ee.conj().T
        phis.append(a + b)
        psis.append(1j * (b - a))
    shape = (0, zc.size, zc.size)
    return OrbitFrame(
        z=zc.copy(),
        complement=comp,
        phis=np.array(phis) if phis else np.zeros(shape, complex),
        psis=np.array(psis) if psis else np.zeros(shape, complex),
    )


def build_orbit_frame(z, seed: int | None = None) -> OrbitFrame:
    """Orbit frame at mu(z) on the Householder complement.

    With ``seed`` set, the complement is additionally rotated by a seeded
    Haar-random unitary (used to probe basis-choice independence).
    """
    zc = _nonzero_complex(z)
    comp = complement_basis(zc)
    if seed is not None and zc.size > 1:
        u = haar_unitary(zc.size - 1, np.random.default_rng(seed))
        comp = u @ comp
    return frame_from_complement(zc, comp)


def frame_bracket_residual(frame: OrbitFrame) -> float:
    """max of |[phi_a, mu]_* - |z|^2 psi_a| and |[psi_a, mu]_* + |z|^2 phi_a|."""
    mu, r2 = frame.mu, frame.norm_sq
    res = 0.0
    for phi, psi in zip(frame.phis, frame.psis):
        res = max(res,
                  float(np.max(np.abs(bracket(phi, mu) - r2 * psi))),
                  float(np.max(np.abs(bracket(psi, mu) + r2 * phi))))
    return res


def gram(mats) -> np.ndarray:
    """Gram matrix of <A, B> = Tr(AB)/2 for Hermitian A, B."""
    mats = np.asarray(mats)
    v = mats.reshape(len(mats), -1) if mats.size else np.zeros((len(mats), 0))
    return (v.conj() @ v.T).real / 2.0


class DualityBlocks(NamedTuple):
    phi_on_psi: np.ndarray   # phi^_a([psi_b, mu]_*)
    phi_on_phi: np.ndarray   # phi^_a([phi_b, mu]_*)
    psi_on_psi: np.ndarray   # psi^_a([psi_b, mu]_*)
    psi_on_phi: np.ndarray   # psi^_a([phi_b, mu]_*)


def frame_duality(frame: OrbitFrame) -> DualityBlocks:
    """Frame 1-forms evaluated on the orbit generators, with A^(W_B) = <A, B>."""
    mu = frame.mu
    gen_phi = [bracket(p, mu) for p in frame.phis]
    gen_psi = [bracket(p, mu) for p in frame.psis]

    def block(forms, gens):
        return np.array([[scalar(f, g) for g in gens] for f in forms]).reshape(len(forms), len(gens))

    return DualityBlocks(
        phi_on_psi=block(frame.phis, gen_psi),
        phi_on_phi=block(frame.phis, gen_phi),
        psi_on_psi=block(frame.psis, gen_psi),
        psi_on_phi=block(frame.psis, gen_phi),
    )


def orbit_tangent_rank(z, tol: float = 1e-10) -> int:
    """Real dimension of {[A, mu]_* : A Hermitian}.

    [A, mu]_* = -i(v z^dagger - z v^dagger) with v = A z, so the image is the
    image of span_R{s_a z} under that linear map; both ranks are numerical.
    """
    zc = _nonzero_complex(z)
    vs = generalized_pauli_basis(zc.size) @ zc
    real = np.concatenate([vs.real, vs.imag], axis=1)
    _, sv, vt = np.linalg.svd(real, full_matrices=False)
    span = vt[sv > tol * max(1.0, sv[0])]
    n = zc.size
    images = []
    for row in span:
        v = row[:n] + 1j * row[n:]
        t = -1j * (np.outer(v, zc.conj()) - np.outer(zc, v.conj()))
        images.append(np.concatenate([t.real.ravel(), t.imag.ravel()]))
    if not images:
        return 0
    images = np.array(images)
    return int(np.linalg.matrix_rank(images, tol=tol * max(1.0, np.max(np.abs(images)))))


# ----------------------------------------------------- pushforward tensors --


def pushforward_tensors(z, a, b) -> tuple[float, float]:
    """(mu_*G)(A^, B^) and (mu_*Lambda)(A^, B^) pulled back to z.

    Equal to f_{AB+BA}(z) and f_{[A,B]_*}(z).
    """
    zc = _nonzero_complex(z)
    a = as_hermitian(a)
    b = as_hermitian(b)
    return (hamiltonian_function(_herm(a @ b + b @ a), zc),
            hamiltonian_function(_herm(bracket(a, b)), zc))


def pushforward_tensors_direct(z, a, b) -> tuple[float, float]:
    """Same values from the chart: G(df_A, df_B) and Lambda(df_A, df_B)."""
    zc = _nonzero_complex(z)
    da = hamiltonian_gradient(a, zc)
    db = hamiltonian_gradient(b, zc)
    return float(da @ db), float(da @ omega_matrix(zc.size) @ db)


class OrbitTensorBlock(NamedTuple):
    phi_phi: np.ndarray
    psi_psi: np.ndarray
    phi_psi: np.ndarray

    def full(self, antisymmetric: bool = False) -> np.ndarray:
        cross_t = -self.phi_psi.T if antisymmetric else self.phi_psi.T
        return np.block([[self.phi_phi, self.phi_psi], [cross_t, self.psi_psi]])

    @classmethod
    def from_full(cls, m) -> "OrbitTensorBlock":
        n = m.shape[0] // 2
        return cls(m[:n, :n], m[n:, n:], m[:n, n:])


def pushforward_blocks(frame: OrbitFrame) -> tuple[OrbitTensorBlock, OrbitTensorBlock]:
    """Frame blocks of mu_*G and mu_*Lambda on the 1-forms phi^_a, psi^_a.

    With c_ij = (A_i z)^dagger (A_j z), f_{AB+BA} = Re c and f_{[A,B]_*} = Im c.
    """
    v = frame.tangent_basis @ frame.z
    c = v.conj() @ v.T
    return OrbitTensorBlock.from_full(c.real), OrbitTensorBlock.from_full(c.imag)


def frame_values(rho, mats) -> tuple[np.ndarray, np.ndarray]:
    """Frame-free metric and two-form evaluated on all pairs of ``mats``."""
    mats = np.asarray(mats)
    tr = np.trace(rho).real
    br = -1j * (mats @ rho - rho @ mats)
    g = np.einsum("aij,bji->ab", mats, mats).real / (2 * tr)
    w = -np.einsum("aij,bji->ab", br, mats).real / (2 * tr ** 2)
    return g, w


# ------------------------------------------------------- orbit Kähler data --


def orbit_metric(rho, x, y) -> float:
    return scalar(x, y) / np.trace(rho).real


def orbit_two_form(rho, x, y) -> float:
    return -scalar(bracket(x, rho), y) / np.trace(rho).real ** 2


def orbit_complex_structure(rho, x) -> np.ndarray:
    return -bracket(x, rho)


@dataclass(frozen=True)
class OrbitKaehler:
    """Metric, two-form and complex structure on the orbit through mu(z).

    Frame matrices are indexed by (W_phi_1.., W_psi_1..); they come from
    inverting the pushed-forward tensors against the frame 1-forms.
    """

    frame: OrbitFrame

    @property
    def coframe_pairing(self) -> np.ndarray:
        """A^_i(W_j) = <A_i, A_j> for the frame matrices."""
        return gram(self.frame.tangent_basis)

    def _dual_coframe(self, m):
        p = np.linalg.inv(self.coframe_pairing)
        return p @ m @ p.T

    @property
    def metric_matrix(self) -> np.ndarray:
        gb, _ = pushforward_blocks(self.frame)
        return np.linalg.inv(self._dual_coframe(gb.full()))

    @property
    def two_form_matrix(self) -> np.ndarray:
        _, lb = pushforward_blocks(self.frame)
        return np.linalg.inv(self._dual_coframe(lb.full(antisymmetric=True))).T

    @property
    def complex_structure_matrix(self) -> np.ndarray:
        """|z|^2 (W_phi (x) S(W_phi) + W_psi (x) S(W_psi)) with S from the two-form."""
        return self.frame.norm_sq * self.two_form_matrix.T

    def metric(self, x, y) -> float:
        return orbit_metric(self.frame.mu, x, y)

    def two_form(self, x, y) -> float:
        return orbit_two_form(self.frame.mu, x, y)

    def complex_structure(self, x) -> np.ndarray:
        return orbit_complex_structure(self.frame.mu, x)

    def frame_coordinates(self, x) -> np.ndarray:
        """Coefficients of a tangent matrix in the frame."""
        rhs = np.array([scalar(b, x) for b in self.frame.tangent_basis])
        return np.linalg.solve(self.coframe_pairing, rhs)


def orbit_kaehler(z, seed: int | None = None) -> OrbitKaehler:
    return OrbitKaehler(build_orbit_frame(z, seed))


def orbit_closedness(z, h: float = 1e-3, generators=None) -> float:
    """max |d omega| on the orbit through mu(z), in exponential coordinates.

    rho(s) = U(s) mu U(s)^dagger with U(s) = exp(-i sum_k s_k A_k) over the
    frame matrices; chart tangents come from the exact Frechet derivative
    of expm, and d is taken by central differences with one Richardson step.
    Zero by construction when the orbit has dimension < 3.  Passing
    ``generators`` (Hermitian matrices) restricts the chart to their span,
    which tests d omega on that sub-family of directions only.
    """
    frame = build_orbit_frame(z)
    gens = frame.tangent_basis if generators is None else np.asarray(generators, dtype=complex)
    k = len(gens)
    if k < 3:
        return 0.0
    mu = frame.mu

    def form(s):
        kmat = -1j * np.einsum("k,kij->ij", s, gens)
        u = expm(kmat)
        rho = u @ mu @ u.conj().T
        tang = []
        for a in gens:
            du = expm_frechet(kmat, -1j * a, compute_expm=False)
            tang.append(du @ mu @ u.conj().T + u @ mu @ du.conj().T)
        return np.array([[orbit_two_form(rho, tang[i], tang[j]) for j in range(k)]
                         for i in range(k)])

    def deriv(step):
        d = np.empty((k, k, k))
        for i in range(k):
            e = np.zeros(k)
            e[i] = step
            d[i] = (form(e) - form(-e)) / (2 * step)
        return d

    d = (4 * deriv(h / 2) - deriv(h)) / 3
    dw = d + d.transpose(1, 2, 0) + d.transpose(2, 0, 1)
    return float(np.max(np.abs(dw)))


# ------------------------------------------------------------ N = 2 check --


def literal_two_frame(z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(e, phi, psi) with e = (z_2, -z_1) for a unit z in C^2.

    This e is orthogonal to z only when Im(conj(z_1) z_2) = 0; for general z
    the matrices are still the closed forms 2(y1 s3 - y3 s1), 2(y0 s2 + y2 s0).
    """
    zc = _nonzero_complex(z)
    e = np.array([zc[1], -zc[0]])
    a = np.outer(e, zc.conj())
    b = np.outer(zc, e.conj())
    return e, a + b, 1j * (b - a)


class Crosscheck(NamedTuple):
    literal_frame_dev: float      # literal phi, psi vs Pauli closed forms
    w_phi_dev: float              # W_phi - mu_*(-X_2)
    w_psi_dev: float              # W_psi - mu_*(2(y2 Delta - y3 X1 + y1 X3))
    g_phi_phi: float
    g_psi_psi: float
    g_psi_phi: float
    omega_psi_phi: float
    j_gamma_delta_dev: float      # J(Gamma) - Delta
    j_tilde_dev: float            # J~(W_phi) + W_psi on the orbit frame
    j_tilde_literal_dev: float    # mu_*(J V_phi) + W_psi for the literal pair


def _require_unit_two(z) -> np.ndarray:
    zc = _nonzero_complex(z)
    if zc.size != 2:
        raise ValueError("the N = 2 cross-check needs z in C^2")
    if abs(np.vdot(zc, zc).real - 1.0) > 1e-10:
        raise ValueError("the N = 2 cross-check needs |z| = 1")
    return zc


def n2_crosscheck(z) -> Crosscheck:
    zc = _require_unit_two(z)
    x = as_real(zc)
    frame = pauli_frame()
    y = frame.y(x)
    y0 = frame.y_gamma(x)
    s0, s1, s2, s3 = PAULI
    _, phi, psi = literal_two_frame(zc)
    lit_dev = max(np.max(np.abs(phi - 2 * (y[0] * s3 - y[2] * s1))),
                  np.max(np.abs(psi - 2 * (y0 * s2 + y[1] * s0))))

    x1, x2, x3 = frame.vectors(x)
    v_phi = -x2
    v_psi = 2 * (y[1] * x - y[2] * x1 + y[0] * x3)
    om = omega_matrix(2)
    cs = canonical_structures(2)
    vert = vertical_fields(2)

    orbit = orbit_kaehler(zc)
    f = orbit.frame
    j_dev = np.max(np.abs(orbit.complex_structure(f.phis[0]) + f.psis[0]))
    j_lit = np.max(np.abs(momentum_differential(zc, cs.J.matrix @ v_phi) + psi))
    return Crosscheck(
        literal_frame_dev=float(lit_dev),
        w_phi_dev=float(np.max(np.abs(momentum_differential(zc, v_phi) - phi))),
        w_psi_dev=float(np.max(np.abs(momentum_differential(zc, v_psi) - psi))),
        g_phi_phi=float(v_phi @ v_phi),
        g_psi_psi=float(v_psi @ v_psi),
        g_psi_phi=float(v_psi @ v_phi),
        omega_psi_phi=float(v_psi @ om @ v_phi),
        j_gamma_delta_dev=float(np.max(np.abs(cs.J.matrix @ vert.gamma(x) - vert.delta(x)))),
        j_tilde_dev=float(j_dev),
        j_tilde_literal_dev=float(j_lit),
    )


def fubini_study_compare(z, n_pairs: int = 100, rng: np.random.Generator | None = None) -> float:
    """Max |g_unfold(X, Y) - g_reduce(v_X, v_Y)| over random orbit tangent pairs.

    The unfolding metric acts on Hermitian tangent matrices; the reduction
    metric acts on their Pauli coordinates v_k = Tr(X s_k)/2 at the sphere
    point of z.
    """
    zc = _require_unit_two(z)
    rng = rng or np.random.default_rng(0)
    mu = np.outer(zc, zc.conj())
    y = project_point(zc).y
    g_red = sphere_kaehler().metric(y)
    dev = 0.0
    for _ in range(n_pairs):
        a, b = (_herm(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
                for _ in range(2))
        tx, ty = bracket(a, mu), bracket(b, mu)
        vx = coordinates(tx, np.array(PAULI))[1:]
        vy = coordinates(ty, np.array(PAULI))[1:]
        dev = max(dev, abs(orbit_metric(mu, tx, ty) - vx @ g_red @ vy))
    return float(dev)
