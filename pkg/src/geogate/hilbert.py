"""Dense complex linear algebra for small Hilbert spaces (dim <= 9).

Everything here is plain numpy: states are 1-D complex arrays, operators are
2-D complex arrays. No sparse path, no wrapper classes; validity checks are
explicit functions so tests can assert them directly.
"""

from __future__ import annotations

import numpy as np

SI = np.eye(2, dtype=complex)
SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def ket(index: int, dim: int) -> np.ndarray:
    """Computational basis state |index> in the given dimension."""
    if not 0 <= index < dim:
        raise ValueError(f"index {index} outside dimension {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def density(psi: np.ndarray) -> np.ndarray:
    """Rank-1 projector |psi><psi|."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def lowering(dim: int) -> np.ndarray:
    """Truncated bosonic annihilation operator with sqrt(n) matrix elements."""
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)


def number(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T)) < tol)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def check_density_matrix(rho: np.ndarray, tol_herm: float = 1e-10,
                         tol_trace: float = 1e-9, tol_eig: float = 1e-9) -> None:
    """Raise ValueError unless rho is Hermitian, unit trace, and PSD within tolerance."""
    rho = np.asarray(rho)
    if np.max(np.abs(rho - rho.conj().T)) >= tol_herm:
        raise ValueError("density matrix not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) >= tol_trace:
        raise ValueError(f"density matrix trace {np.trace(rho).real} != 1")
    if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < -tol_eig:
        raise ValueError("density matrix has a negative eigenvalue beyond tolerance")


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product, first argument as the leading (slow) factor."""
    if not ops:
        raise ValueError("tensor needs at least one operand")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def expm_hermitian(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(-i H t) for Hermitian H, via eigendecomposition.

    Hermiticity is required (max deviation 1e-8), which makes the result
    unitary up to rounding; Pade would be overkill at these dimensions.
    """
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) >= 1e-8:
        raise ValueError("expm_hermitian requires a Hermitian matrix")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def expm_hermitian_batch(hs: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H_k t) over a stack of Hermitian matrices, shape (n, d, d)."""
    w, v = np.linalg.eigh(hs)
    return np.einsum("kij,kj,klj->kil", v, np.exp(-1j * w * t), v.conj())


def partial_trace(rho: np.ndarray, dims: list[int], keep: int) -> np.ndarray:
    """Trace out all subsystems except dims[keep]."""
    rho = np.asarray(rho, dtype=complex)
    dims = list(dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"dims {dims} do not match matrix of shape {rho.shape}")
    if not 0 <= keep < len(dims):
        raise ValueError(f"keep index {keep} out of range")
    n = len(dims)
    resh = rho.reshape(dims + dims)
    # contract matching bra/ket indices on every traced subsystem
    src = list(range(n)) + [i + n if i == keep else i for i in range(n)]
    out = np.einsum(resh, src, [keep, keep + n])
    return out


def embed(op2: np.ndarray, d: int) -> np.ndarray:
    """Place a 2x2 operator in the top-left block of a d-level identity."""
    op2 = np.asarray(op2, dtype=complex)
    if op2.shape != (2, 2):
        raise ValueError("embed expects a 2x2 operator")
    if d < 2:
        raise ValueError("target dimension must be >= 2")
    out = np.eye(d, dtype=complex)
    out[:2, :2] = op2
    return out


def unitary_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """Phase-invariant trace fidelity |Tr(U^dag V)|^2 / d^2."""
    u = np.asarray(u)
    v = np.asarray(v)
    d = u.shape[0]
    return float(np.abs(np.trace(u.conj().T @ v)) ** 2) / d**2
