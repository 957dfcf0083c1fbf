# GKSL generators and derived channels: construction, exponentiation,
# stationarity analysis and gradient forms.

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .linalg import (
    EIG_TOL,
    apply_superop,
    check_density,
    check_unitary,
    dag,
    devectorize,
    hermitize,
    is_hermitian,
    kron_superop,
    mat_exp,
    vectorize,
)

NULL_TOL = 1e-9


@dataclass
class JumpTerm:
    a: np.ndarray
    rate: float

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        if self.rate < 0:
            raise ValueError("jump rate must be nonnegative")


@dataclass
class BilinearTerm:
    ops: list[np.ndarray]
    kossakowski: np.ndarray

    def __post_init__(self):
        self.ops = [np.asarray(a, dtype=complex) for a in self.ops]
        self.kossakowski = np.asarray(self.kossakowski, dtype=complex)
        g = hermitize(self.kossakowski)
        if np.linalg.eigvalsh(g).min() < -EIG_TOL:
            raise ValueError("Kossakowski matrix must be PSD")


@dataclass
class Lindbladian:
    dim: int
    hamiltonian: np.ndarray | None = None
    jumps: list[JumpTerm] = field(default_factory=list)
    bilinear: BilinearTerm | None = None

    def __post_init__(self):
        if self.hamiltonian is None:
            self.hamiltonian = np.zeros((self.dim, self.dim), dtype=complex)
        self.hamiltonian = np.asarray(self.hamiltonian, dtype=complex)
        if self.hamiltonian.shape != (self.dim, self.dim):
            raise ValueError("Hamiltonian dimension mismatch")
        if not is_hermitian(self.hamiltonian, 1e-10 * max(1, self.dim)):
            raise ValueError("Hamiltonian must be Hermitian")
        for j in self.jumps:
            if j.a.shape != (self.dim, self.dim):
                raise ValueError("jump operator dimension mismatch")


def dissipator(a: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> 2 a rho a^* - a^*a rho - rho a^*a."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    aa = dag(a) @ a
    I = np.eye(d)
    return 2 * kron_superop(a, dag(a)) - kron_superop(aa, I) - kron_superop(I, aa)


def bilinear_dissipator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Sesquilinear dissipator rho -> 2 a rho b^* - b^*a rho - rho b^*a.

    The diagonal piece equals dissipator(a); a PSD-weighted sum over a family
    of operators is a valid GKSL dissipative part, and the sum rule
    L_{a+b} = L_{a,a} + L_{b,b} + L_{a,b} + L_{b,a} holds.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = a.shape[0]
    ba = dag(b) @ a
    I = np.eye(d)
    return 2 * kron_superop(a, dag(b)) - kron_superop(ba, I) - kron_superop(I, ba)


def hamiltonian_superop(H: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> -i[H, rho]."""
    H = np.asarray(H, dtype=complex)
    I = np.eye(H.shape[0])
    return -1j * (kron_superop(H, I) - kron_superop(I, H))


def build(L: Lindbladian) -> np.ndarray:
    S = hamiltonian_superop(L.hamiltonian)
    for j in L.jumps:
        if j.rate != 0:
            S = S + j.rate * dissipator(j.a)
    if L.bilinear is not None:
        g = L.bilinear.kossakowski
        ops = L.bilinear.ops
        for j in range(len(ops)):
            for k in range(len(ops)):
                if g[j, k] != 0:
                    S = S + g[j, k] * bilinear_dissipator(ops[j], ops[k])
    return S


def apply(L: Lindbladian, rho: np.ndarray) -> np.ndarray:
    return apply_superop(build(L), rho)


def propagate(L: Lindbladian, rho: np.ndarray, t: float,
              eig_tol: float = 1e-8) -> np.ndarray:
    """exp(t L) applied to rho, revalidated as a density matrix."""
    if t < 0:
        raise ValueError("propagation time must be nonnegative")
    rho = check_density(rho)
    out = devectorize(mat_exp(t * build(L)) @ vectorize(rho), L.dim)
    return check_density(hermitize(out), eig_tol=eig_tol)


def _lower(i: int, j: int, d: int) -> np.ndarray:
    a = np.zeros((d, d), dtype=complex)
    a[i, j] = 1.0
    return a


def detailed_balance_pair(beta: float) -> Lindbladian:
    """Qubit generator beta^{1/2} D_{|0><1|} + beta^{-1/2} D_{|1><0|}.

    Stationary state is diag(beta, 1) / (1 + beta).
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    return Lindbladian(2, jumps=[
        JumpTerm(_lower(0, 1, 2), beta ** 0.5),
        JumpTerm(_lower(1, 0, 2), beta ** -0.5),
    ])


def chain_lindbladian(mu: np.ndarray, d: int | None = None) -> Lindbladian:
    """Nearest-neighbour detailed-balance chain with stationary state diag(mu)."""
    mu = np.asarray(mu, dtype=float)
    d = len(mu) if d is None else d
    if len(mu) != d:
        raise ValueError("mu length must equal dim")
    if np.any(mu <= 0):
        raise ValueError("mu entries must be strictly positive")
    jumps = []
    for r in range(d - 1):
        beta_r = mu[r] / mu[r + 1]
        jumps.append(JumpTerm(_lower(r, r + 1, d), beta_r ** 0.5))
        jumps.append(JumpTerm(_lower(r + 1, r, d), beta_r ** -0.5))
    return Lindbladian(d, jumps=jumps)


def replacer_lindbladian(sigma: np.ndarray) -> Lindbladian:
    """R_sigma - id as a jump-operator Lindbladian.

    Kraus operators of R_sigma are sqrt(l_i) |v_i><j|; with the factor-2
    dissipator each enters at rate 1/2.
    """
    sigma = check_density(sigma)
    d = sigma.shape[0]
    w, V = np.linalg.eigh(hermitize(sigma))
    jumps = []
    for i in range(d):
        if w[i] <= 1e-15:
            continue
        for j in range(d):
            K = np.sqrt(w[i]) * np.outer(V[:, i], np.eye(d)[j].conj())
            jumps.append(JumpTerm(K, 0.5))
    return Lindbladian(d, jumps=jumps)


def _kernel_basis(S: np.ndarray, null_tol: float) -> np.ndarray:
    _, s, Vh = np.linalg.svd(S)
    d2 = S.shape[0]
    mask = np.concatenate([s, np.zeros(d2 - len(s))]) <= null_tol * max(1.0, s[0] if len(s) else 1.0)
    return Vh[mask].conj().T  # columns span the kernel


def stationary_states(L: Lindbladian, null_tol: float = NULL_TOL,
                      max_iter: int = 500) -> list[np.ndarray]:
    """Extreme stationary densities: kernel of the superoperator intersected
    with the density cone by iterated projection from matrix-unit seeds."""
    S = build(L)
    d = L.dim
    K = _kernel_basis(S, null_tol)
    if K.shape[1] == 0:
        return []
    # orthogonal projector onto the kernel, as acting on vectorized operators
    P = K @ dag(K)

    def proj_kernel(M):
        return devectorize(P @ vectorize(M), d)

    found: list[np.ndarray] = []
    seeds = [np.eye(d) / d]
    for i in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[i, i] = 1.0
        seeds.append(E)
    for seed in seeds:
        M = proj_kernel(seed)
        ok = False
        for _ in range(max_iter):
            M = hermitize(M)
            w, V = np.linalg.eigh(M)
            Mp = (V * np.clip(w, 0, None)) @ dag(V)
            tr = np.trace(Mp).real
            if tr < 1e-12:
                break
            Mp = Mp / tr
            M2 = proj_kernel(Mp)
            if np.max(np.abs(M2 - Mp)) < 1e-12:
                M = M2
                ok = True
                break
            M = M2
        if not ok:
            continue
        M = hermitize(M / np.trace(M).real)
        if all(np.max(np.abs(M - F)) > 1e-8 for F in found):
            found.append(M)
    # keep a linearly independent basis, preferring extreme (low-rank) states
    found.sort(key=lambda F: int(np.sum(np.linalg.eigvalsh(F) > 1e-8)))
    basis: list[np.ndarray] = []
    for F in found:
        if not basis:
            basis.append(F)
            continue
        A = np.stack([vectorize(B) for B in basis], axis=1)
        coef, *_ = np.linalg.lstsq(A, vectorize(F), rcond=None)
        if np.linalg.norm(A @ coef - vectorize(F)) > 1e-8:
            basis.append(F)
    return basis


def spectral_gap(L: Lindbladian, null_tol: float = NULL_TOL) -> float:
    ev = np.linalg.eigvals(build(L))
    nz = ev[np.abs(ev) > null_tol]
    if nz.size == 0:
        return 0.0
    return float(np.min(-nz.real))


def conjugate(L: Lindbladian, U: np.ndarray, tol: float = 1e-10) -> Lindbladian:
    """Generator of the conjugated evolution: a -> U^* a U, H -> U^* H U."""
    check_unitary(U, tol)
    H = dag(U) @ L.hamiltonian @ U
    jumps = [JumpTerm(dag(U) @ j.a @ U, j.rate) for j in L.jumps]
    bil = None
    if L.bilinear is not None:
        bil = BilinearTerm([dag(U) @ a @ U for a in L.bilinear.ops],
                           L.bilinear.kossakowski)
    return Lindbladian(L.dim, hamiltonian=hermitize(H), jumps=jumps, bilinear=bil)


def unital_fixed_point_check(L: Lindbladian, tol: float = 1e-11) -> bool:
    d = L.dim
    return bool(np.max(np.abs(apply(L, np.eye(d) / d))) <= tol)


def heisenberg_superop(L: Lindbladian) -> np.ndarray:
    """Adjoint generator with respect to the trace pairing <A,B> = tr(A^*B)."""
    return dag(build(L))


def gamma_form(L: Lindbladian, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient form Gamma(x, y) = L(x^*y) - L(x)^*y - x^*L(y) with L acting
    in the Heisenberg picture."""
    Sh = heisenberg_superop(L)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)

    def act(M):
        return apply_superop(Sh, M)

    return act(dag(x) @ y) - dag(act(x)) @ y - dag(x) @ act(y)


def gamma_span_criterion(a: np.ndarray, basis: list[np.ndarray],
                         tol: float = 1e-8) -> bool:
    """Whether a lies in span{1, b_1, ..., b_m} (least-squares residual)."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    cols = [vectorize(np.eye(d))] + [vectorize(np.asarray(b, dtype=complex))
                                     for b in basis]
    A = np.stack(cols, axis=1)
    v = vectorize(a)
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    return bool(np.linalg.norm(A @ coef - v) < tol)


def channel_superop(L: Lindbladian, t: float) -> np.ndarray:
    return sla.expm(t * build(L))
