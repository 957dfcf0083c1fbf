# Lie-closure certification of resource sets and randomized unitary-orbit
# span probes.

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import dag, hermitize, is_hermitian, vectorize

SPAN_DROP_TOL = 1e-9


@dataclass
class ResourceSet:
    dim: int
    elements: list[np.ndarray] = field(default_factory=list)
    adjoint_closed: bool = False

    def __post_init__(self):
        self.elements = [np.asarray(e, dtype=complex) for e in self.elements]
        for e in self.elements:
            if e.shape != (self.dim, self.dim):
                raise ValueError("resource element dimension mismatch")


@dataclass
class LieClosureReport:
    basis: list[np.ndarray]
    dim_found: int
    depth_used: int
    is_hormander: bool


def _traceless_antiherm_parts(e: np.ndarray) -> list[np.ndarray]:
    """Generators contributed by one resource element.

    Hermitian content enters as iH; anti-Hermitian content as-is; identity
    components are projected out.
    """
    d = e.shape[0]
    out = []
    for g in (1j * hermitize(e), (e - dag(e)) / 2):
        g = g - (np.trace(g) / d) * np.eye(d)
        if np.linalg.norm(g) > SPAN_DROP_TOL:
            out.append(g)
    return out


def _orthonormalize(vectors: list[np.ndarray], basis: list[np.ndarray],
                    d: int) -> int:
    """Real Gram-Schmidt under Re tr(A^*B); extends basis in place."""
    added = 0
    for v in vectors:
        w = v.copy()
        for _ in range(2):  # reorthogonalize once for stability
            for b in basis:
                w = w - np.real(np.trace(dag(b) @ w)) * b
        nrm = float(np.sqrt(np.real(np.trace(dag(w) @ w))))
        if nrm > SPAN_DROP_TOL:
            basis.append(w / nrm)
            added += 1
    return added


def lie_closure(S: ResourceSet, max_depth: int = 20) -> LieClosureReport:
    """Iterated-commutator closure of the traceless anti-Hermitian parts of S.

    Stops at saturation (three rounds without dimension growth) or max_depth;
    is_hormander iff the closure spans su(d).
    """
    if not S.elements:
        raise ValueError("resource set is empty")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    d = S.dim
    generators: list[np.ndarray] = []
    for e in S.elements:
        generators.extend(_traceless_antiherm_parts(e))
    basis: list[np.ndarray] = []
    _orthonormalize(generators, basis, d)
    target = d * d - 1
    depth = 1
    stagnant = 0
    while depth < max_depth and len(basis) < target and stagnant < 3:
        new = [b @ g - g @ b for b in list(basis) for g in generators]
        added = _orthonormalize(new, basis, d)
        depth += 1
        stagnant = 0 if added else stagnant + 1
    return LieClosureReport(basis=basis, dim_found=len(basis),
                            depth_used=depth,
                            is_hormander=len(basis) == target)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Gaussian matrix with phase fix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def orbit_span_probe(a: np.ndarray, n_samples: int = 200,
                     seed: int = 0, residual_tol: float = 1e-8) -> dict:
    """Randomized check whether |0><1| lies in the span of the unitary orbit
    of {a, a^*} (traceless parts). Evidence, not proof."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    a = a - (np.trace(a) / d) * np.eye(d)
    rng = np.random.default_rng(seed)
    e01 = np.zeros((d, d), dtype=complex)
    e01[0, 1] = 1.0
    cols = []
    span_dim = 0
    stagnant = 0
    used = 0
    for _ in range(n_samples):
        U = haar_unitary(d, rng)
        cols.append(vectorize(dag(U) @ a @ U))
        cols.append(vectorize(dag(U) @ dag(a) @ U))
        used += 1
        A = np.stack(cols, axis=1)
        # real span dimension of the accumulated orbit samples
        AR = np.concatenate([A.real, A.imag], axis=0)
        new_dim = int(np.linalg.matrix_rank(AR, tol=1e-10))
        stagnant = 0 if new_dim > span_dim else stagnant + 1
        span_dim = new_dim
        if stagnant >= 5 or span_dim >= 2 * d * d:
            break
    # membership in the real span (the span the orbit lemma speaks about)
    A = np.stack(cols, axis=1)
    AR = np.concatenate([A.real, A.imag], axis=0)
    target = np.concatenate([vectorize(e01).real, vectorize(e01).imag])
    coef, *_ = np.linalg.lstsq(AR, target, rcond=None)
    residual = float(np.linalg.norm(AR @ coef - target))
    return {
        "contains_e01": residual < residual_tol,
        "span_dim": span_dim,
        "residual": residual,
        "samples_used": used,
    }
