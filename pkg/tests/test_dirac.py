import numpy as np
import pytest

from qedfields.dirac import (GAMMA, POLARIZATION_HANDEDNESS, anticommutator, bilinear,
                             build_spinor, current, polarization_vectors, sqrt_hermitian_2x2)
from qedfields.errors import DomainError
from qedfields.kinematics import METRIC


def test_rest_spinor():
    u = build_spinor((0, 0, 0), 1.0)
    assert np.allclose(u.components, [1, 0, 1, 0])


def test_spinor_along_z():
    # w = 1.25 for k = 0.75 along z: sqrt(w -+ k) = 0.5, sqrt(2)
    u = build_spinor((0, 0, 0.75), 1.0)
    assert np.allclose(u.components, [np.sqrt(0.5), 0, np.sqrt(2.0), 0])


def test_sqrt_matches_eigen_decomposition(rng):
    for _ in range(20):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        M = a @ a.conj().T
        S = sqrt_hermitian_2x2(M)
        assert np.allclose(S @ S, M, atol=1e-12)
        assert np.allclose(S, S.conj().T)
        assert np.linalg.eigvalsh(S).min() >= -1e-12


def test_sqrt_rejects_negative_and_non_hermitian():
    with pytest.raises(DomainError):
        sqrt_hermitian_2x2(np.diag([1.0, -0.5]))
    with pytest.raises(DomainError):
        sqrt_hermitian_2x2(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_clifford_algebra():
    for mu in range(4):
        for nu in range(4):
            assert np.abs(anticommutator(mu, nu) - 2 * METRIC[mu, nu] * np.eye(4)).max() < 1e-14


def test_forward_current_is_twice_momentum(rng):
    for _ in range(50):
        k = rng.uniform(-10, 10, 3)
        u = build_spinor(k, 1.0)
        w = u.energy
        assert np.vdot(u.components, u.components).real == pytest.approx(2 * w, rel=1e-12)
        J = current(u, u)
        assert np.allclose(J, 2 * np.concatenate([[w], k]), rtol=0, atol=1e-11 * w)


def test_bilinear_is_complex_conjugate_under_swap(rng):
    a, b = build_spinor(rng.normal(size=3), 1.0), build_spinor(rng.normal(size=3), 1.0)
    for mu in range(4):
        assert bilinear(a, mu, b) == pytest.approx(np.conj(bilinear(b, mu, a)))


@pytest.mark.parametrize("mass", [0.0, -1.0])
def test_nonpositive_mass_rejected(mass):
    with pytest.raises(DomainError):
        build_spinor((0, 0, 1), mass)


def test_ultrarelativistic_spinor_keeps_identities():
    k = np.array([3e3, -4e3, 1.2e4])
    u = build_spinor(k, 1.0)
    J = current(u, u).real
    assert np.allclose(J, 2 * np.concatenate([[u.energy], k]), rtol=1e-12)


def test_polarisation_basis(rng):
    for k in [rng.normal(size=3) for _ in range(20)] + [np.array([0, 0, 2.0]), np.array([0, 0, -1.0])]:
        pair = polarization_vectors(k)
        khat = k / np.linalg.norm(k)
        for v in (pair.v1, pair.v2):
            assert abs(v @ k) < 1e-12
            assert np.linalg.norm(v) == pytest.approx(1.0)
        assert abs(pair.v1 @ pair.v2) < 1e-12
        assert np.cross(pair.v1, pair.v2) @ khat == pytest.approx(POLARIZATION_HANDEDNESS)


def test_polarisation_on_z_axis():
    pair = polarization_vectors((0, 0, 3.0))
    assert np.allclose(pair.v1, [0, -1, 0])
    assert np.allclose(pair.v2, [1, 0, 0])


def test_polarisation_zero_vector():
    with pytest.raises(DomainError):
        polarization_vectors((0, 0, 0))


def test_gamma_hermiticity():
    assert np.allclose(GAMMA[0], GAMMA[0].conj().T)
    for i in range(1, 4):
        assert np.allclose(GAMMA[i], -GAMMA[i].conj().T)
