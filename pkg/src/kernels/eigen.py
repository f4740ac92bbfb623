"""
Symmetric Eigensolver

Dense cyclic Jacobi eigendecomposition used by Mercer validation, spectral
embedding, kernel factorization and the Nystrom pseudo-inverse.

Each sweep visits every (p, q) pair once in round-robin order; the pairs of a
round are disjoint, so their rotations are applied together as vector
operations. Results are deterministic: eigenvalues descend, ties keep the
solver's order, and each eigenvector is signed so its largest-magnitude entry
(lowest index on ties) is positive.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DataFormatError, NoConvergence, NotSymmetric
from ..state import GramMatrix

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 50
SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    """
    Eigenpairs of a symmetric matrix.

    Attributes:
        eigenvalues: δ_1 >= δ_2 >= ... >= δ_n
        eigenvectors: n×n matrix V, column k pairs with eigenvalues[k]
        sweeps: Jacobi sweeps performed
        off_norm: Final off-diagonal Frobenius norm of the rotated matrix
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0
    off_norm: float = 0.0

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        """V Δ Vᵀ."""
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T

    def singular_values(self) -> np.ndarray:
        """Σ = Δ^{1/2}, with negative eigenvalues clipped to zero."""
        return np.sqrt(np.clip(self.eigenvalues, 0.0, None))

    def feature_factor(self) -> np.ndarray:
        """ΣVᵀ, whose columns are pulled points reproducing a PSD kernel: FᵀF = K."""
        return self.singular_values()[:, None] * self.eigenvectors.T

    def numerical_rank(self, rtol: float = 1e-10) -> int:
        """Number of eigenvalues above rtol times the leading one."""
        if self.n == 0 or self.eigenvalues[0] <= 0:
            return 0
        return int(np.count_nonzero(self.eigenvalues > rtol * self.eigenvalues[0]))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eigenvalues": self.eigenvalues.tolist(),
            "sweeps": self.sweeps,
            "off_norm": self.off_norm,
        }


# =============================================================================
# Jacobi internals
# =============================================================================

def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint (p, q) pairs, p < q, covering every pair once."""
    size = n + (n % 2)
    players = list(range(size))
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a < n and b < n:
                pairs.append((min(a, b), max(a, b)))
        if pairs:
            pairs.sort()
            P = np.array([p for p, _ in pairs], dtype=np.intp)
            Q = np.array([q for _, q in pairs], dtype=np.intp)
            rounds.append((P, Q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(A: np.ndarray) -> float:
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _relatively_diagonal(A: np.ndarray, tol: float) -> bool:
    """True when every |a_pq| <= tol·sqrt(|a_pp·a_qq|) for p != q."""
    d = np.sqrt(np.abs(np.diag(A)))
    bound = tol * np.outer(d, d)
    np.fill_diagonal(bound, np.inf)
    return bool(np.all(np.abs(A) <= bound))


def _rotate(A: np.ndarray, V: np.ndarray, P: np.ndarray, Q: np.ndarray) -> None:
    """Annihilate A[p, q] for every pair of one round, in place."""
    app = A[P, P]
    aqq = A[Q, Q]
    apq = A[P, Q]

    c = np.ones_like(apq)
    s = np.zeros_like(apq)
    active = apq != 0
    if not np.any(active):
        return
    tau = (aqq[active] - app[active]) / (2.0 * apq[active])
    root = np.sqrt(1.0 + tau * tau)
    sign = np.where(tau >= 0, 1.0, -1.0)
    t = sign / (np.abs(tau) + root)
    c[active] = 1.0 / np.sqrt(1.0 + t * t)
    s[active] = t * c[active]

    row_p = A[P, :]
    row_q = A[Q, :]
    A[P, :] = c[:, None] * row_p - s[:, None] * row_q
    A[Q, :] = s[:, None] * row_p + c[:, None] * row_q

    col_p = A[:, P]
    col_q = A[:, Q]
    A[:, P] = col_p * c - col_q * s
    A[:, Q] = col_p * s + col_q * c
    A[P, Q] = 0.0
    A[Q, P] = 0.0

    vec_p = V[:, P]
    vec_q = V[:, Q]
    V[:, P] = vec_p * c - vec_q * s
    V[:, Q] = vec_p * s + vec_q * c


def _canonical_order(values: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    if vectors.size:
        leading = np.argmax(np.abs(vectors), axis=0)
        signs = np.where(vectors[leading, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)
        vectors = vectors * signs
    return values, vectors


# =============================================================================
# Public operations
# =============================================================================

def eigh(
    S,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> EigenSystem:
    """
    Eigendecomposition of a dense symmetric matrix by cyclic Jacobi rotations.

    Args:
        S: Square symmetric matrix (array or GramMatrix)
        tol: Converged once the off-diagonal norm is <= tol·||S||_F and every
            |a_pq| <= tol·sqrt(|a_pp·a_qq|), or the norm stops decreasing
        max_sweeps: Sweep budget

    Returns:
        EigenSystem: Descending eigenvalues with orthonormal, sign-normalized eigenvectors

    Raises:
        NotSymmetric: If max|S - Sᵀ| > 1e-10·max|S|
        NoConvergence: If the budget runs out; carries the residual
    """
    if isinstance(S, GramMatrix):
        S = S.values
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DataFormatError(f"eigh needs a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise DataFormatError("eigh input has non-finite entries")

    n = S.shape[0]
    if n == 0:
        return EigenSystem(np.zeros(0), np.zeros((0, 0)))

    scale = float(np.max(np.abs(S)))
    asymmetry = float(np.max(np.abs(S - S.T)))
    if asymmetry > SYMMETRY_RTOL * scale:
        raise NotSymmetric(asymmetry, SYMMETRY_RTOL * scale)

    A = (S + S.T) / 2.0
    V = np.eye(n)
    target = tol * float(np.linalg.norm(A))
    schedule = _round_robin(n)

    sweeps = 0
    off = _off_norm(A)
    previous = np.inf
    # Past the norm target, keep sweeping until each off-diagonal entry is
    # small against its own diagonal pair or rounding stops the decrease.
    while not (off <= target and (off >= previous or _relatively_diagonal(A, tol))):
        if sweeps >= max_sweeps:
            if off > target:
                raise NoConvergence(sweeps, off, target)
            logger.debug("eigh: sweep budget spent past the norm target (off-diagonal norm %.3e)", off)
            break
        for P, Q in schedule:
            _rotate(A, V, P, Q)
        sweeps += 1
        previous, off = off, _off_norm(A)
        logger.debug("eigh: sweep %d off-diagonal norm %.3e (target %.3e)", sweeps, off, target)

    values, vectors = _canonical_order(np.diag(A).copy(), V)
    return EigenSystem(eigenvalues=values, eigenvectors=vectors, sweeps=sweeps, off_norm=off)


def evd_factorize(
    K: GramMatrix,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> EigenSystem:
    """
    Eigenvalue decomposition of a kernel, K = VΔVᵀ = (ΣVᵀ)ᵀ(ΣVᵀ).

    The eigenvalues of a linear kernel XᵀX are the squared singular values of
    X; `EigenSystem.singular_values()` exposes Σ = Δ^{1/2} and
    `feature_factor()` the pulled dataset ΣVᵀ.
    """
    return eigh(K.values, tol=tol, max_sweeps=max_sweeps)
