"""Hermitian / anti-Hermitian matrix algebra for the unitary group U(N).

Hermitian matrices are used as the dual algebra u*_N; anti-Hermitian matrices
as the Lie algebra u_N.  The identification A -> -iA ("hat") carries the
scalar product and bracket between the two.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

TOL_SYM = 1e-12

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def hermitian_residual(a) -> float:
    """Max absolute entry of ``a - a^dagger``."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def as_hermitian(a, tol: float = TOL_SYM) -> np.ndarray:
    """Validate ``a`` as Hermitian and return it as a complex array.

    Raises
    ------
    ValueError
        If ``a`` is not square or deviates from Hermitian by more than ``tol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    res = hermitian_residual(a)
    if res > tol:
        raise ValueError(f"matrix is not Hermitian (residual {res:.3e} > {tol:.1e})")
    return a


def as_antihermitian(t, tol: float = TOL_SYM) -> np.ndarray:
    t = np.asarray(t, dtype=complex)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {t.shape}")
    res = float(np.max(np.abs(t + t.conj().T))) if t.size else 0.0
    if res > tol:
        raise ValueError(f"matrix is not anti-Hermitian (residual {res:.3e} > {tol:.1e})")
    return t


def hat(a) -> np.ndarray:
    """u*_N -> u_N, A -> -iA."""
    return -1j * np.asarray(a, dtype=complex)


def unhat(t) -> np.ndarray:
    """Inverse of :func:`hat`."""
    return 1j * np.asarray(t, dtype=complex)


def pairing(a, t) -> float:
    """Evaluate the Hermitian ``a`` on the anti-Hermitian ``t``: i Tr(AT)/2."""
    val = 0.5j * np.trace(np.asarray(a) @ np.asarray(t))
    return float(val.real)


def scalar(a, b) -> float:
    """Scalar product Tr(AB)/2 on Hermitian matrices."""
    return float((0.5 * np.trace(np.asarray(a) @ np.asarray(b))).real)


def bracket(a, b) -> np.ndarray:
    """Dual-algebra bracket -i[A, B], Hermitian for Hermitian inputs."""
    a = np.asarray(a)
    b = np.asarray(b)
    return -1j * (a @ b - b @ a)


class PairingResult(NamedTuple):
    pair: float
    scal: float
    brak: np.ndarray


def pairing_and_bracket(a, b, t) -> PairingResult:
    """Return (A(T), <A, B>, [A, B]) for Hermitian A, B and anti-Hermitian T."""
    a = as_hermitian(a)
    b = as_hermitian(b)
    t = as_antihermitian(t)
    if not (a.shape == b.shape == t.shape):
        raise ValueError("dimension mismatch")
    return PairingResult(pairing(a, t), scalar(a, b), bracket(a, b))


def generalized_pauli_basis(n: int) -> np.ndarray:
    """Orthonormal basis of u*_N under Tr(AB)/2, shape (N^2, N, N).

    Order: scaled identity, then for each pair j < k the symmetric and the
    antisymmetric off-diagonal element, then the traceless diagonal elements.
    For ``n == 2`` this is exactly (1, sigma_x, sigma_y, sigma_z).
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    basis = [np.sqrt(2.0 / n) * np.eye(n, dtype=complex)]
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            basis += [s, a]
    for m in range(1, n):
        d = np.zeros(n)
        d[:m] = 1.0
        d[m] = -m
        basis.append(np.sqrt(2.0 / (m * (m + 1))) * np.diag(d).astype(complex))
    return np.array(basis)


def coordinates(a, basis=None) -> np.ndarray:
    """Coordinates Tr(A sigma_alpha)/2 of a Hermitian matrix."""
    a = np.asarray(a)
    if basis is None:
        basis = generalized_pauli_basis(a.shape[0])
    return np.einsum("ij,aji->a", a, basis).real / 2.0


def from_coordinates(y, basis) -> np.ndarray:
    return np.einsum("a,aij->ij", np.asarray(y, dtype=float), basis)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    """(M + M^dagger)/2 with i.i.d. standard complex Gaussian entries."""
    m = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    return (m + m.conj().T) / 2.0


def random_state(n: int, rng: np.random.Generator, normalize: bool = False) -> np.ndarray:
    z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    if normalize:
        z = z / np.linalg.norm(z)
    return z


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    m = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(m)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
