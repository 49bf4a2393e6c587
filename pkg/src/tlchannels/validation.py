"""Input validation helpers for states, ensembles and Kraus lists."""

import numpy as np

__all__ = ["check_density_matrix", "check_kraus", "check_square", "is_density_matrix"]

STATE_TOL = 1e-10


def check_square(M, dim=None, name="matrix"):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square 2D array, got shape {M.shape}")
    if dim is not None and M.shape[0] != dim:
        raise ValueError(f"{name} has dimension {M.shape[0]}, expected {dim}")
    return M


def check_density_matrix(rho, dim=None, tol=STATE_TOL):
    """Return ``rho`` as a complex array after checking it is a state.

    Hermitian, unit trace and positive semidefinite, each within ``tol``.
    """
    rho = check_square(rho, dim, "density matrix")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix has trace {np.trace(rho).real:.12g}, expected 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def is_density_matrix(rho, tol=STATE_TOL) -> bool:
    try:
        check_density_matrix(rho, tol=tol)
    except ValueError:
        return False
    return True


def check_kraus(kraus, tol=1e-8):
    """Validate a Kraus list: equal shapes and sum K*K = I within ``tol``."""
    ops = [np.asarray(K, dtype=complex) for K in kraus]
    if not ops:
        raise ValueError("empty Kraus list")
    shape = ops[0].shape
    if any(K.shape != shape or K.ndim != 2 for K in ops):
        raise ValueError("Kraus operators must be 2D arrays of one common shape")
    completeness = sum(K.conj().T @ K for K in ops)
    err = np.abs(completeness - np.eye(shape[1])).max()
    if err > tol:
        raise ValueError(f"Kraus operators are not trace preserving (error {err:.2e})")
    return ops
