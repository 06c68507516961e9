"""Dense complex small-matrix kernels (n <= 16).

Unitarization by Newton iteration, principal logarithms of unitaries, and
Takagi factorization of symmetric unitaries.  The two factorizations share
one trick: a unitary (resp. symmetric unitary) splits into a commuting
Hermitian (resp. real symmetric) pair, which a single shifted eigh call
diagonalizes jointly.
"""

from __future__ import annotations

import numpy as np

from .errors import BranchCut, DegenerateSpectrum, SingularInput
from .tolerances import TOL, Tolerances

MAX_RANK = 16

# First shift is fixed; the rest are pseudo-random from a frozen seed.  A
# shift only fails when two distinct eigenvalue pairs collide accidentally,
# which happens for at most one shift value per pair.
_SHIFTS = (0.7310585786300049,) + tuple(
    np.random.default_rng(0xC0FFEE).uniform(-2.0, 2.0, 40)
)

_NEWTON_CAP = 20


def frobenius(M: np.ndarray) -> float:
    return float(np.linalg.norm(M))


def unitary_defect(U: np.ndarray) -> float:
    """||U* U - I||_F."""
    n = U.shape[-1]
    return float(
        np.max(np.linalg.norm(np.swapaxes(U, -1, -2).conj() @ U - np.eye(n), axis=(-2, -1)))
    )


def symmetry_defect(M: np.ndarray) -> float:
    return float(np.linalg.norm(M - M.T))


def is_unitary(U: np.ndarray, tol: Tolerances = TOL) -> bool:
    return unitary_defect(U) <= tol.unitary


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))


def unitarize(M: np.ndarray, tol: Tolerances = TOL) -> np.ndarray:
    """Project a near-unitary square matrix to its polar unitary factor.

    Newton iteration U <- (U + U^{-*})/2; quadratically convergent when all
    singular values are near 1.  Raises SingularInput when the smallest
    singular value is <= 0.5, where the iteration is no longer trustworthy.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SingularInput(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise SingularInput("non-finite entries")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= 0.5:
        raise SingularInput(f"smallest singular value {sv[-1]:.3g} <= 0.5")
    X = M
    for _ in range(_NEWTON_CAP):
        X = 0.5 * (X + np.linalg.inv(X).conj().T)
        if unitary_defect(X) <= 1e-14 * X.shape[0]:
            break
    return X


def unitarize_batch(M: np.ndarray, steps: int = 4) -> np.ndarray:
    """Newton polish for a stack of near-unitary matrices (no singularity check)."""
    X = np.asarray(M, dtype=complex)
    for _ in range(steps):
        X = 0.5 * (X + np.swapaxes(np.linalg.inv(X), -1, -2).conj())
    return X


def _joint_diag_hermitian(A: np.ndarray, B: np.ndarray, reconstruct, tol_recon: float):
    """Diagonalize commuting Hermitian A, B by one shifted eigh per attempt.

    ``reconstruct(V, a, b)`` must rebuild the original matrix from the
    candidate basis V and the diagonals a, b; the first candidate whose
    reconstruction error passes is accepted.  Genuine eigenvalue multiplicity
    is harmless (blocks are scalar there); only accidental collisions of
    distinct (a, b) pairs force another shift.
    """
    for c in _SHIFTS:
        w, V = np.linalg.eigh(A + c * B)
        a = np.einsum("ij,jk,ki->i", V.conj().T, A, V).real
        b = np.einsum("ij,jk,ki->i", V.conj().T, B, V).real
        M, err = reconstruct(V, a, b)
        if err <= tol_recon:
            return V, a, b
    raise DegenerateSpectrum(
        "joint diagonalization failed for every shift (reconstruction error "
        f"{err:.3g} > {tol_recon:.3g})"
    )


def principal_log_unitary(U: np.ndarray, tol: Tolerances = TOL) -> np.ndarray:
    """Skew-Hermitian H with exp(H) = U and all eigenphases in (-pi, pi).

    Splits U into the commuting Hermitian pair (U + U*)/2, (U - U*)/2i and
    recovers eigenphases by atan2 on the joint diagonal.  Raises BranchCut
    when an eigenphase falls within tolerance of +-pi.
    """
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    A = 0.5 * (U + U.conj().T)
    B = (U - U.conj().T) / 2j

    target = U

    def rebuild(V, a, b):
        phases = np.arctan2(b, a)
        M = (V * np.exp(1j * phases)) @ V.conj().T
        return M, frobenius(M - target)

    V, a, b = _joint_diag_hermitian(A, B, rebuild, max(1e-10 * n, 1e-12))
    phases = np.arctan2(b, a)
    if np.any(np.pi - np.abs(phases) < tol.branch_cut):
        raise BranchCut("eigenphase within tolerance of the branch cut at +-pi")
    return (V * (1j * phases)) @ V.conj().T


def takagi_symmetric_unitary(M: np.ndarray, tol: Tolerances = TOL):
    """Factor a symmetric unitary as M = O e^{2i Theta} O^T.

    O is real orthogonal and Theta is a real diagonal of phases in
    (-pi/2, pi/2].  M = X + iY with X, Y real symmetric and commuting, so a
    shifted real eigh diagonalizes both at once.
    """
    M = np.asarray(M, dtype=complex)
    if symmetry_defect(M) > max(tol.symmetric, 1e-9):
        raise SingularInput(f"matrix is not symmetric within {tol.symmetric:g}")
    X = 0.5 * (M.real + M.real.T)
    Y = 0.5 * (M.imag + M.imag.T)

    def rebuild(O, x, y):
        two_theta = np.arctan2(y, x)
        R = (O * np.exp(1j * two_theta)) @ O.T
        return R, frobenius(R - M)

    O, x, y = _joint_diag_hermitian(X, Y, rebuild, tol.takagi_recon)
    theta = 0.5 * np.arctan2(y, x)
    return np.ascontiguousarray(O.real), theta


def eigenphases_unitary(U: np.ndarray) -> np.ndarray:
    """Principal eigenphases of a unitary matrix, ascending."""
    return np.sort(np.angle(np.linalg.eigvals(U)))
