import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maslovcw import matcore
from maslovcw.errors import BranchCut, SingularInput


def polar_factor_svd(M):
    """Independent polar-decomposition oracle via an SVD."""
    U, s, Vh = np.linalg.svd(M)
    return U @ Vh


def expm_taylor(H, terms=40):
    """Independent matrix exponential: scaled-and-squared Taylor series."""
    H = np.asarray(H, dtype=complex)
    k = max(0, int(np.ceil(np.log2(max(np.linalg.norm(H), 1e-30)))) + 2)
    X = H / 2**k
    out = np.eye(H.shape[0], dtype=complex)
    term = np.eye(H.shape[0], dtype=complex)
    for j in range(1, terms):
        term = term @ X / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def random_symmetric_unitary(n, rng):
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    th = rng.uniform(-np.pi / 2, np.pi / 2, n)
    return (Q * np.exp(2j * th)) @ Q.T


class TestUnitarize:
    def test_identity(self):
        assert np.allclose(matcore.unitarize(np.eye(3)), np.eye(3))

    def test_positive_diagonal_projects_to_identity(self):
        got = matcore.unitarize(np.diag([2.0, 1.0]).astype(complex))
        assert np.allclose(got, np.eye(2), atol=1e-12)

    def test_matches_svd_polar_oracle(self, rng):
        U = matcore.haar_unitary(4, rng)
        H = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        H = 0.5 * (H + H.conj().T)
        M = U @ (np.eye(4) + 1e-6 * H)
        got = matcore.unitarize(M)
        assert np.linalg.norm(got - U) <= 2e-6
        assert np.linalg.norm(got - polar_factor_svd(M)) <= 1e-12

    def test_singular_input_rejected(self):
        with pytest.raises(SingularInput):
            matcore.unitarize(np.diag([1.0, 0.4]).astype(complex))

    def test_post_bound_and_det_modulus(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 7))
            U = matcore.haar_unitary(n, rng)
            E = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            M = U + 0.05 * E
            if np.linalg.svd(M, compute_uv=False)[-1] <= 0.5:
                continue
            got = matcore.unitarize(M)
            assert matcore.unitary_defect(got) <= 1e-12
            gram_defect = np.linalg.norm(M.conj().T @ M - np.eye(n))
            assert np.linalg.norm(got - M) <= 2.0 * gram_defect + 1e-12
            assert abs(abs(np.linalg.det(got)) - 1.0) <= 1e-10


class TestPrincipalLog:
    def test_identity(self):
        H = matcore.principal_log_unitary(np.eye(3))
        assert np.allclose(H, 0.0, atol=1e-12)

    def test_diagonal(self):
        U = np.diag([np.exp(1j * np.pi / 2)])
        H = matcore.principal_log_unitary(U)
        assert np.allclose(H, np.diag([1j * np.pi / 2]))

    def test_round_trip_against_taylor_oracle(self, rng):
        for _ in range(20):
            Q = matcore.haar_unitary(3, rng)
            phases = rng.uniform(-3.0, 3.0, 3)
            U = (Q * np.exp(1j * phases)) @ Q.conj().T
            H = matcore.principal_log_unitary(U)
            assert np.linalg.norm(H + H.conj().T) <= 1e-12
            assert np.linalg.norm(expm_taylor(H) - U) <= 1e-10
            eig = np.linalg.eigvalsh(-1j * H)
            assert np.all(np.abs(eig) < np.pi)

    def test_branch_cut(self):
        with pytest.raises(BranchCut):
            matcore.principal_log_unitary(np.diag([-1.0 + 0j, 1.0]))


class TestTakagi:
    def test_identity_reconstructs(self):
        O, th = matcore.takagi_symmetric_unitary(np.eye(3, dtype=complex))
        assert np.allclose((O * np.exp(2j * th)) @ O.T, np.eye(3))
        assert np.allclose(th, 0.0)

    def test_diagonal_phases(self):
        th_in = np.array([0.3, -0.7])
        M = np.diag(np.exp(2j * th_in))
        O, th = matcore.takagi_symmetric_unitary(M)
        R = (O * np.exp(2j * th)) @ O.T
        assert np.linalg.norm(R - M) <= 1e-12

    def test_construct_then_factor(self, rng):
        M = random_symmetric_unitary(4, rng)
        O, th = matcore.takagi_symmetric_unitary(M)
        R = (O * np.exp(2j * th)) @ O.T
        assert np.linalg.norm(R - M) <= 1e-9
        assert np.linalg.norm(O.imag) <= 1e-10
        assert np.all(th > -np.pi / 2 - 1e-12) and np.all(th <= np.pi / 2 + 1e-12)

    def test_hundred_random_reconstructions(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 7))
            M = random_symmetric_unitary(n, rng)
            O, th = matcore.takagi_symmetric_unitary(M)
            R = (O * np.exp(2j * th)) @ O.T
            assert np.linalg.norm(R - M) <= 1e-9
            assert np.linalg.norm(O @ O.T - np.eye(n)) <= 1e-12

    def test_repeated_phases(self):
        # genuine multiplicity: every shift is degenerate but blocks are scalar
        M = np.diag([1j, 1j, 1j]).astype(complex)
        O, th = matcore.takagi_symmetric_unitary(M)
        assert np.linalg.norm((O * np.exp(2j * th)) @ O.T - M) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=6),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_takagi_reconstruction_property(n, seed):
    rng = np.random.default_rng(seed)
    M = random_symmetric_unitary(n, rng)
    O, th = matcore.takagi_symmetric_unitary(M)
    assert np.linalg.norm((O * np.exp(2j * th)) @ O.T - M) <= 1e-9
