import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from qkahler.algebra import (
    PAULI,
    as_antihermitian,
    as_hermitian,
    bracket,
    coordinates,
    from_coordinates,
    generalized_pauli_basis,
    haar_unitary,
    hat,
    pairing,
    pairing_and_bracket,
    random_hermitian,
    random_state,
    scalar,
    unhat,
)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
def test_basis_orthonormal_and_hermitian(n):
    b = generalized_pauli_basis(n)
    assert b.shape == (n * n, n, n)
    gram = np.array([[scalar(x, y) for y in b] for x in b])
    np.testing.assert_allclose(gram, np.eye(n * n), atol=1e-14)
    for s in b:
        np.testing.assert_allclose(s, s.conj().T, atol=0)


def test_basis_n2_is_pauli():
    for s, p in zip(generalized_pauli_basis(2), PAULI):
        np.testing.assert_allclose(s, p, atol=1e-15)


def test_pauli_algebra():
    s0, s1, s2, s3 = PAULI
    np.testing.assert_allclose(s1 @ s2, 1j * s3)
    np.testing.assert_allclose(bracket(s1, s2), 2 * s3)
    for s in PAULI[1:]:
        np.testing.assert_allclose(s @ s, s0)


@given(seeds, st.integers(1, 6))
def test_coordinates_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    a = random_hermitian(n, rng)
    b = generalized_pauli_basis(n)
    np.testing.assert_allclose(from_coordinates(coordinates(a, b), b), a, atol=1e-12)


@given(seeds, st.integers(1, 6))
def test_pairing_matches_scalar_through_hat(seed, n):
    # A(B^) = <A, B> with B^ = -iB
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(n, rng), random_hermitian(n, rng)
    assert pairing(a, hat(b)) == pytest.approx(scalar(a, b), abs=1e-12)
    np.testing.assert_allclose(unhat(hat(a)), a)


@given(seeds, st.integers(1, 6))
def test_bracket_is_hermitian_and_ad_invariant(seed, n):
    rng = np.random.default_rng(seed)
    a, b, c = (random_hermitian(n, rng) for _ in range(3))
    br = bracket(a, b)
    np.testing.assert_allclose(br, br.conj().T, atol=1e-12)
    # <[A, B], C> = <A, [B, C]>
    assert scalar(br, c) == pytest.approx(scalar(a, bracket(b, c)), abs=1e-10)
    # Jacobi
    jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
    np.testing.assert_allclose(jac, 0, atol=1e-10)


def test_pairing_and_bracket_validates():
    s0, s1, s2, s3 = PAULI
    res = pairing_and_bracket(s1, s2, -1j * s1)
    assert res.pair == pytest.approx(1.0)
    assert res.scal == pytest.approx(0.0)
    np.testing.assert_allclose(res.brak, 2 * s3)
    with pytest.raises(ValueError, match="not Hermitian"):
        pairing_and_bracket(np.array([[0, 1], [0, 0]]), s1, -1j * s1)
    with pytest.raises(ValueError, match="anti-Hermitian"):
        pairing_and_bracket(s1, s2, s1)
    with pytest.raises(ValueError, match="mismatch"):
        pairing_and_bracket(s1, s2, -1j * np.eye(3))


def test_validators_reject_shapes():
    with pytest.raises(ValueError):
        as_hermitian(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_antihermitian(np.zeros(3))


@given(seeds, st.integers(1, 6))
def test_haar_unitary_is_unitary(seed, n):
    u = haar_unitary(n, np.random.default_rng(seed))
    np.testing.assert_allclose(u @ u.conj().T, np.eye(n), atol=1e-12)


def test_random_state_normalize(rng):
    z = random_state(5, rng, normalize=True)
    assert np.linalg.norm(z) == pytest.approx(1.0)
