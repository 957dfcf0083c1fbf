# Environment-assisted simulation: one-qubit dilation Hamiltonians, the
# prep / partial-trace pipeline and unitary-mixture approximation of
# dissipative semigroups.

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    apply_superop,
    check_density,
    choi,
    dag,
    hermitize,
    mat_exp,
    partial_trace,
    superop_from_action,
    tensor,
    trace_norm,
)
from .lindblad import JumpTerm, Lindbladian, build, dissipator


@dataclass
class DilatedHamiltonian:
    a: np.ndarray
    H_AE: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.H_AE = np.asarray(self.H_AE, dtype=complex)


def dilated_hamiltonian(a: np.ndarray) -> DilatedHamiltonian:
    """H = a (x) |1><0|_E + a^* (x) |0><1|_E on system (x) environment qubit.

    In the environment-block picture this is [[0, a], [a^*, 0]] with the
    block adjoint placement fixed by the reduction identity
    tr_E(L_H(rho (x) |0><0|)) = D_a(rho).
    """
    a = np.asarray(a, dtype=complex)
    e10 = np.array([[0, 0], [1, 0]], dtype=complex)
    H = tensor(a, e10) + tensor(dag(a), dag(e10))
    return DilatedHamiltonian(a=a, H_AE=hermitize(H))


def prep_channel(rho_A: np.ndarray) -> np.ndarray:
    """rho_A (x) |0><0| on system (x) environment."""
    e00 = np.zeros((2, 2), dtype=complex)
    e00[0, 0] = 1.0
    return tensor(np.asarray(rho_A, dtype=complex), e00)


def reduced_generator(a: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> tr_E(L_{H_AE}(prep(rho))); equals
    dissipator(a) exactly."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    H = dilated_hamiltonian(a).H_AE
    L_H = Lindbladian(2 * d, jumps=[JumpTerm(H, 1.0)])
    S_H = build(L_H)

    def act(rho):
        big = apply_superop(S_H, prep_channel(rho))
        return partial_trace(big, [d, 2], [0])

    return superop_from_action(act, d)


def gaussian_damped_superop(H: np.ndarray, t: float) -> np.ndarray:
    """exp(t D_H): eigenprojection blocks damped by e^{-t (l_j - l_l)^2}.

    For Hermitian H the dissipator acts diagonally on eigenblocks, so the
    semigroup is a pure Gaussian damping of off-diagonal blocks.
    """
    L = Lindbladian(H.shape[0], jumps=[JumpTerm(np.asarray(H, dtype=complex), 1.0)])
    return mat_exp(t * build(L))


def unitary_mixture_step(H: np.ndarray, t: float) -> np.ndarray:
    """Superoperator of (Ad_{exp(i sqrt(2t) H)} + Ad_{exp(-i sqrt(2t) H)})/2."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    Up = mat_exp(1j * math.sqrt(2 * t) * H)

    def act(rho):
        return 0.5 * (Up @ rho @ dag(Up) + dag(Up) @ rho @ Up)

    return superop_from_action(act, d)


def mixture_vs_semigroup_error(H: np.ndarray, t: float) -> float:
    """Choi trace-norm distance between the unitary mixture and exp(t D_H)."""
    diff = unitary_mixture_step(H, t) - gaussian_damped_superop(H, t)
    return trace_norm(choi(diff))


def simulate_dissipator_via_dilation(a: np.ndarray, t: float,
                                     n_trotter: int) -> np.ndarray:
    """n-fold composition of tr_E o unitary_mixture_step(H_AE, t/n) o prep,
    as a superoperator on the system; converges to exp(t dissipator(a))."""
    if n_trotter < 1:
        raise ValueError("n_trotter must be at least 1")
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    H = dilated_hamiltonian(a).H_AE
    M = unitary_mixture_step(H, t / n_trotter)

    def one_step(rho):
        return partial_trace(apply_superop(M, prep_channel(rho)), [d, 2], [0])

    S_step = superop_from_action(one_step, d)
    return np.linalg.matrix_power(S_step, n_trotter)


def dilation_error_vs_exact(a: np.ndarray, t: float, n_trotter: int) -> float:
    """Choi trace-norm distance of the Trotterized dilation from the closed
    form exp(t dissipator(a))."""
    exact = mat_exp(t * dissipator(np.asarray(a, dtype=complex)))
    approx = simulate_dissipator_via_dilation(a, t, n_trotter)
    return trace_norm(choi(approx - exact))
