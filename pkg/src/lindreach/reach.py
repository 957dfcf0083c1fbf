# Reachability machinery: alignment functionals, greedy descent steering
# with restricted generator sets, sampled porcupine obstruction checks and
# finite-time replacer constructions.

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .linalg import check_density, dag, hermitize, schatten_norm, trace_distance
from .lindblad import Lindbladian, apply, build, dissipator, propagate
from .tangent import PathSample

STALL_TOL = 1e-10
OBSTRUCTION_TOL = 1e-9
EQ_TOL = 1e-12


@dataclass
class ResourceSetK:
    generators: list[Lindbladian]
    cone_combinations: bool = False
    max_total_rate: float = 1.0

    def __post_init__(self):
        if not self.generators:
            raise ValueError("resource set must be nonempty")
        dims = {L.dim for L in self.generators}
        if len(dims) != 1:
            raise ValueError("generators must share a dimension")
        if self.max_total_rate <= 0:
            raise ValueError("max_total_rate must be positive")

    @property
    def dim(self) -> int:
        return self.generators[0].dim


@dataclass
class ReachReport:
    reached: bool
    final_state: np.ndarray
    trajectory: PathSample
    generator_schedule: list[tuple[float, float, np.ndarray]]
    stall_certificate: tuple[np.ndarray, float] | None = None
    t_max_exceeded: bool = False


@dataclass
class PorcupineReport:
    sigma: np.ndarray
    epsilon: float
    p: float
    samples: int
    min_alignment_over_samples: float
    obstruction_evidence: bool


def _abs_power_weight(delta: np.ndarray, p: float) -> np.ndarray:
    """(eta - sigma)|eta - sigma|^{p-2} via eigendecomposition.

    Zero eigenvalues contribute 0, the continuity convention for p < 2.
    """
    w, V = np.linalg.eigh(hermitize(delta))
    f = np.where(np.abs(w) > 0, np.sign(w) * np.abs(w) ** (p - 1), 0.0)
    return (V * f) @ dag(V)


def alignment(L: Lindbladian, eta: np.ndarray, sigma: np.ndarray,
              p: float) -> float:
    """tr(L(eta)(eta - sigma)|eta - sigma|^{p-2}), the derivative of
    (1/p)||eta - sigma||_p^p along the flow of L."""
    if not (1.0 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    delta = hermitize(np.asarray(eta, dtype=complex) - np.asarray(sigma, dtype=complex))
    if np.max(np.abs(delta)) < EQ_TOL:
        raise ValueError("eta equals sigma within tolerance")
    W = _abs_power_weight(delta, p)
    return float(np.trace(apply(L, eta) @ W).real)


def _alignment_vector(K: ResourceSetK, eta, sigma, p) -> np.ndarray:
    return np.array([alignment(L, eta, sigma, p) for L in K.generators])


def _combine(K: ResourceSetK, weights: np.ndarray) -> Lindbladian:
    jumps = []
    H = np.zeros((K.dim, K.dim), dtype=complex)
    for w, L in zip(weights, K.generators):
        if w <= 0:
            continue
        H = H + w * L.hamiltonian
        jumps.extend(type(j)(j.a, w * j.rate) for j in L.jumps)
        if L.bilinear is not None:
            raise ValueError("cone combination of bilinear terms unsupported")
    return Lindbladian(K.dim, hamiltonian=hermitize(H), jumps=jumps)


def _best_choice(K: ResourceSetK, eta, sigma, p):
    """Generator (or budget-scaled cone vertex) with minimal alignment.

    The objective is linear in L, so over the rate-budget simplex the optimum
    sits at a vertex: full budget on the single best generator.
    """
    vals = _alignment_vector(K, eta, sigma, p)
    idx = int(np.argmin(vals))
    weights = np.zeros(len(K.generators))
    if K.cone_combinations:
        weights[idx] = K.max_total_rate
        val = K.max_total_rate * vals[idx]
    else:
        weights[idx] = 1.0
        val = vals[idx]
    return weights, val


def reach_drive(K: ResourceSetK, rho0: np.ndarray, sigma: np.ndarray,
                p: float = 2.0, dt: float = 0.01, t_max: float = 50.0,
                target_tol: float = 1e-4,
                stall_tol: float = STALL_TOL) -> ReachReport:
    """Greedy closed-loop steering of rho0 toward sigma.

    At each step the generator (or budgeted cone weight vector) minimizing
    the alignment at the current state is applied for time dt. Terminates on
    target_tol proximity in the Schatten p-norm, on stall (no strictly
    descending choice) or at t_max.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    eta = check_density(rho0)
    sigma = check_density(sigma)
    times = [0.0]
    states = [eta]
    schedule: list[tuple[float, float, np.ndarray]] = []
    t = 0.0
    reached = schatten_norm(eta - sigma, p) <= target_tol
    stall = None
    exceeded = False
    while not reached:
        if t >= t_max:
            exceeded = True
            break
        weights, val = _best_choice(K, eta, sigma, p)
        # normalize by the p-norm gradient scale so stalls are detected
        # uniformly in p and in the distance to the target
        scale = max(schatten_norm(eta - sigma, p) ** (p - 1), 1e-300)
        if val / scale >= -stall_tol:
            stall = (eta, float(val))
            break
        L = _combine(K, weights)
        eta = propagate(L, eta, dt)
        t += dt
        times.append(t)
        states.append(eta)
        schedule.append((t - dt, t, weights))
        reached = schatten_norm(eta - sigma, p) <= target_tol
    return ReachReport(reached=reached, final_state=eta,
                       trajectory=PathSample(np.array(times), states)
                       if len(times) > 1 else PathSample(np.array([0.0, dt]),
                                                         [states[0], states[0]]),
                       generator_schedule=schedule,
                       stall_certificate=stall, t_max_exceeded=exceeded)


def _sphere_samples(sigma: np.ndarray, epsilon: float, p: float,
                    n_samples: int, rng: np.random.Generator,
                    diagonal_slice: bool, eig_tol: float = 1e-10):
    """States on the radius-epsilon p-sphere around sigma that remain inside
    the state space; boundary sigma keeps only the intersected part."""
    d = sigma.shape[0]
    out = []
    attempts = 0
    while len(out) < n_samples and attempts < 50 * max(n_samples, 1):
        attempts += 1
        if diagonal_slice:
            g = rng.standard_normal(d)
            g -= g.mean()
            X = np.diag(g).astype(complex)
        else:
            G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            X = hermitize(G)
            X -= (np.trace(X).real / d) * np.eye(d)
        nrm = schatten_norm(X, p)
        if nrm < 1e-12:
            continue
        eta = sigma + (epsilon / nrm) * X
        if np.linalg.eigvalsh(hermitize(eta)).min() >= -eig_tol:
            out.append(hermitize(eta))
    return out


def porcupine_check(K: ResourceSetK, sigma: np.ndarray, epsilon: float,
                    p: float = 2.0, n_samples: int = 2000, seed: int = 0,
                    diagonal_slice: bool = False,
                    obstruction_tol: float = OBSTRUCTION_TOL) -> PorcupineReport:
    """Sampled obstruction test on the epsilon-sphere around sigma.

    obstruction_evidence is true when the best available alignment is
    nonnegative (within obstruction_tol) at every sampled sphere point, so no
    admissible generator points inward anywhere on the sphere.
    """
    if n_samples <= 0:
        raise ValueError("n_samples must be positive; a vacuous report is invalid")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    sigma = check_density(sigma)
    rng = np.random.default_rng(seed)
    lmin = float(np.linalg.eigvalsh(hermitize(sigma)).min())
    # norm-equivalence margin translating the p-ball radius into a 2-norm one
    d = sigma.shape[0]
    margin = epsilon if p >= 2 else epsilon * d ** (1.0 / p - 0.5)
    interior_ball = lmin > margin
    samples = _sphere_samples(sigma, epsilon, p, n_samples, rng, diagonal_slice)
    if not samples:
        raise ValueError("ball lies outside the state space and the sphere "
                         "does not intersect it")
    if not interior_ball and len(samples) < n_samples // 10:
        raise ValueError("too few sphere points intersect the state space")
    best = math.inf
    for eta in samples:
        vals = _alignment_vector(K, eta, sigma, p)
        best = min(best, float(vals.min()))
    return PorcupineReport(sigma=sigma, epsilon=epsilon, p=p,
                           samples=len(samples),
                           min_alignment_over_samples=best,
                           obstruction_evidence=best >= -obstruction_tol)


def replacer_overshoot(rho: np.ndarray, sigma: np.ndarray, eps: float,
                       n_steps: int = 64) -> dict:
    """Replacer trajectory with overshoot target sigma_tilde = sigma +
    eps (sigma - rho); hits sigma exactly at s = ln(1 + 1/eps)."""
    rho = check_density(rho)
    sigma = check_density(sigma)
    if eps <= 0:
        raise ValueError("eps must be positive")
    sigma_t = sigma + eps * (sigma - rho)
    if np.linalg.eigvalsh(hermitize(sigma_t)).min() < -1e-12:
        raise ValueError("overshoot target is not positive semidefinite; "
                         "decrease eps")
    s = math.log(1.0 + 1.0 / eps)
    ts = np.linspace(0.0, s, n_steps)
    states = [hermitize(math.exp(-t) * rho + (1 - math.exp(-t)) * sigma_t)
              for t in ts]
    return {"trajectory": PathSample(ts, states), "hit_time": s}


def tan_schedule(rho: np.ndarray, sigma: np.ndarray, n_steps: int) -> dict:
    """Time-compressed replacer path e^{-tan t} rho + (1 - e^{-tan t}) sigma
    on [0, pi/2]; the endpoint is sigma and generator norms vanish there."""
    if n_steps < 2:
        raise ValueError("n_steps must be at least 2")
    rho = check_density(rho)
    sigma = check_density(sigma)
    ts = np.linspace(0.0, math.pi / 2, n_steps)
    states = []
    gen_norms = []
    for t in ts:
        if t >= math.pi / 2:
            states.append(sigma.copy())
            gen_norms.append(0.0)
            continue
        u = math.exp(-math.tan(t))
        states.append(hermitize(u * rho + (1 - u) * sigma))
        # generator scale of the reparameterized replacer flow
        gen_norms.append(1.0 / math.cos(t) ** 2 * u
                         * float(np.linalg.norm(rho - sigma)))
    return {"trajectory": PathSample(ts, states),
            "generator_norms": np.array(gen_norms)}


def sparse_alignment_diagonal(rho: np.ndarray, sigma: np.ndarray,
                              r: int, s: int) -> float:
    """Closed-form p=2 alignment of dissipator(|r><s|) on diagonal states:
    2 rho_ss (rho_rr - rho_ss - sigma_rr + sigma_ss)."""
    if r == s:
        raise ValueError("r and s must differ")
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    for M in (rho, sigma):
        if np.max(np.abs(M - np.diag(np.diag(M)))) > 1e-12:
            raise ValueError("states must be diagonal")
    pr, ps = rho[r, r].real, rho[s, s].real
    qr, qs = sigma[r, r].real, sigma[s, s].real
    return 2.0 * ps * (pr - ps - qr + qs)


def lowering_jump(r: int, s: int, d: int) -> Lindbladian:
    """Single-jump generator with jump |r><s| at unit rate."""
    a = np.zeros((d, d), dtype=complex)
    a[r, s] = 1.0
    from .lindblad import JumpTerm
    return Lindbladian(d, jumps=[JumpTerm(a, 1.0)])
