# Dense complex matrix engine: Hermitian algebra, tensor/partial-trace,
# matrix functions, vectorization (column-stacking), Choi conversion and
# Schur-complement PSD logic.

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

HERM_TOL_PER_DIM = 1e-12
EIG_TOL = 1e-10


def dag(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return A.conj().T


def hermitize(A: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A^*) / 2."""
    return (A + dag(A)) / 2


def herm_tol(dim: int) -> float:
    return HERM_TOL_PER_DIM * dim


def is_hermitian(A: np.ndarray, tol: float | None = None) -> bool:
    tol = herm_tol(A.shape[0]) if tol is None else tol
    return bool(np.max(np.abs(A - dag(A))) <= tol)


def check_finite(A: np.ndarray) -> None:
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")


def check_density(rho: np.ndarray, eig_tol: float = EIG_TOL) -> np.ndarray:
    """Validate Hermitian, PSD (up to eig_tol) and unit trace; return rho."""
    rho = np.asarray(rho, dtype=complex)
    check_finite(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if not is_hermitian(rho, max(herm_tol(rho.shape[0]), eig_tol)):
        raise ValueError("density matrix is not Hermitian within tolerance")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > max(eig_tol, 1e-9):
        raise ValueError(f"trace {tr} differs from 1 beyond tolerance")
    lmin = float(np.linalg.eigvalsh(hermitize(rho)).min())
    if lmin < -eig_tol:
        raise ValueError(f"density matrix has eigenvalue {lmin} below -{eig_tol}")
    return rho


def check_unitary(U: np.ndarray, tol: float = 1e-10) -> None:
    d = U.shape[0]
    if np.max(np.abs(dag(U) @ U - np.eye(d))) > tol:
        raise ValueError("matrix is not unitary within tolerance")


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product; first factor is the coarse block."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def partial_trace(M: np.ndarray, dims: list[int], keep) -> np.ndarray:
    """Trace out the tensor factors not listed in `keep`.

    dims are the factor dimensions in tensor order; keep is an iterable of
    factor indices to retain. Trace is preserved.
    """
    dims = list(dims)
    keep = sorted(set(keep))
    d = int(np.prod(dims))
    if M.shape != (d, d):
        raise ValueError(f"matrix shape {M.shape} does not match dims {dims}")
    n = len(dims)
    T = M.reshape(dims + dims)
    # trace out factors from the back so axis numbers stay valid
    for ax in sorted(set(range(n)) - set(keep), reverse=True):
        T = np.trace(T, axis1=ax, axis2=ax + T.ndim // 2)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return T.reshape(dk, dk)


def mat_exp(A: np.ndarray) -> np.ndarray:
    return sla.expm(np.asarray(A, dtype=complex))


def _clamped_eigh(A: np.ndarray, eig_tol: float):
    w, V = np.linalg.eigh(hermitize(np.asarray(A, dtype=complex)))
    if w.min() < -eig_tol:
        raise ValueError(f"matrix has eigenvalue {w.min()} below -{eig_tol}; not PSD")
    return np.clip(w, 0.0, None), V


def mat_sqrt_psd(A: np.ndarray, eig_tol: float = EIG_TOL) -> np.ndarray:
    """PSD square root; eigenvalues in [-eig_tol, 0) are clamped to 0."""
    w, V = _clamped_eigh(A, eig_tol)
    return (V * np.sqrt(w)) @ dag(V)


def pinv_psd(A: np.ndarray, eig_tol: float = EIG_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a PSD matrix, restricted to its support."""
    w, V = _clamped_eigh(A, eig_tol)
    winv = np.where(w > eig_tol, 1.0 / np.where(w > eig_tol, w, 1.0), 0.0)
    return (V * winv) @ dag(V)


def vectorize(M: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(M, dtype=complex).reshape(-1, order="F")


def devectorize(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(d, d, order="F")


def superop_from_action(f, d: int) -> np.ndarray:
    """Matrix of an operator map, built by applying f to all matrix units."""
    S = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for i in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1.0
            S[:, i + j * d] = vectorize(np.asarray(f(E), dtype=complex))
    return S


def apply_superop(S: np.ndarray, M: np.ndarray) -> np.ndarray:
    d = M.shape[0]
    return devectorize(S @ vectorize(M), d)


def kron_superop(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Superoperator of X -> A X B under column stacking: B^T (x) A."""
    return np.kron(B.T, A)


def choi(S: np.ndarray) -> np.ndarray:
    """Choi matrix sum_ij E_ij (x) S(E_ij)."""
    d = int(round(np.sqrt(S.shape[0])))
    J = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1.0
            out = apply_superop(S, E)
            J[i * d:(i + 1) * d, j * d:(j + 1) * d] = out
    return J


def is_cp(S: np.ndarray, tol: float = 1e-9) -> bool:
    J = hermitize(choi(S))
    return bool(np.linalg.eigvalsh(J).min() >= -tol)


def is_tp(S: np.ndarray, tol: float = 1e-9) -> bool:
    d = int(round(np.sqrt(S.shape[0])))
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1.0
            if abs(np.trace(apply_superop(S, E)) - (1.0 if i == j else 0.0)) > tol:
                return False
    return True


def schur_psd_check(A: np.ndarray, B: np.ndarray, C: np.ndarray,
                    tol: float = EIG_TOL) -> bool:
    """PSD test for the block matrix [[A, B], [B^*, C]] with invertible A."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    C = np.atleast_2d(np.asarray(C, dtype=complex))
    if abs(np.linalg.det(A)) < 1e-300:
        raise ValueError("A block is singular")
    wA = np.linalg.eigvalsh(hermitize(A))
    if wA.min() < -tol:
        return False
    comp = hermitize(C - dag(B) @ np.linalg.solve(A, B))
    return bool(np.linalg.eigvalsh(comp).min() >= -tol)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of the difference."""
    w = np.linalg.eigvalsh(hermitize(rho - sigma))
    return 0.5 * float(np.abs(w).sum())


def schatten_norm(A: np.ndarray, p: float) -> float:
    s = np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False)
    if np.isinf(p):
        return float(s.max()) if s.size else 0.0
    return float((s ** p).sum() ** (1.0 / p))


def trace_norm(A: np.ndarray) -> float:
    return schatten_norm(A, 1.0)
