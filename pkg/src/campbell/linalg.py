"""Dense complex eigensolver and quadratic-pencil linearization.

The exact-spectrum oracle rests on two operations: a general nonsymmetric
eigensolver with verified residuals, and the first-companion linearization
that turns det(lam^2 M + lam C + K) = 0 into an ordinary eigenvalue problem.
"""

from dataclasses import dataclass

import numpy as np

MAX_DIM = 1024
RESIDUAL_TOL = 1e-9


class EigenSolverError(RuntimeError):
    """QR iteration failed to converge within the backend's sweep cap."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues, unit-norm right eigenvectors (columns) and residuals."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


def eig_dense(a, tol: float = RESIDUAL_TOL) -> EigenDecomposition:
    """All eigenpairs of a dense square matrix.

    Backed by LAPACK's Hessenberg reduction + implicitly shifted QR with
    deflation.  Every returned pair satisfies ||A v - lam v||_2 <= tol*||A||_F;
    a violation raises, so callers may rely on the bound.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds supported maximum {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")

    try:
        lam, vec = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological input
        raise EigenSolverError(f"eigensolver did not converge for a {n}x{n} matrix: {exc}") from exc

    # np.linalg.eig returns unit 2-norm columns already; renormalize defensively.
    norms = np.linalg.norm(vec, axis=0)
    vec = vec / norms
    scale = np.linalg.norm(a, "fro")
    residuals = np.linalg.norm(a @ vec - vec * lam, axis=0)
    bad = np.nonzero(residuals > tol * max(scale, 1e-300))[0]
    if bad.size:
        i = int(bad[0])
        raise EigenSolverError(
            f"residual bound violated at eigenvalue index {i}: "
            f"{residuals[i]:.3e} > {tol:.1e} * {scale:.3e}"
        )
    return EigenDecomposition(lam, vec, residuals)


def qep_linearize(m, c, k) -> np.ndarray:
    """First-companion matrix of the quadratic pencil lam^2 M + lam C + K.

    State ordering z = (x, dx/dt), giving [[0, I], [-M^-1 K, -M^-1 C]].
    The companion spectrum equals the 2N pencil roots with multiplicity.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    c = np.atleast_2d(np.asarray(c, dtype=float))
    k = np.atleast_2d(np.asarray(k, dtype=float))
    if not (m.shape == c.shape == k.shape) or m.shape[0] != m.shape[1]:
        raise ValueError(
            f"M, C, K must be square and of equal dimension, got {m.shape}, {c.shape}, {k.shape}"
        )
    n = m.shape[0]
    if np.array_equal(m, np.eye(n)):
        m_inv_k, m_inv_c = k, c
    else:
        cond = np.linalg.cond(m)
        if not np.isfinite(cond) or cond > 1e12:
            raise ValueError("mass matrix is singular or near-singular")
        m_inv_k = np.linalg.solve(m, k)
        m_inv_c = np.linalg.solve(m, c)
    top = np.hstack([np.zeros((n, n)), np.eye(n)])
    bottom = np.hstack([-m_inv_k, -m_inv_c])
    return np.vstack([top, bottom])


def conjugate_closure_defect(eigenvalues, tol: float = 1e-12) -> float:
    """Largest distance from an eigenvalue to the conjugate of its best partner.

    Zero (up to rounding) for spectra of real matrices.  Eigenvalues with
    |Im| <= tol count as self-paired.
    """
    lam = np.asarray(eigenvalues, dtype=complex)
    worst = 0.0
    for v in lam:
        if abs(v.imag) <= tol:
            continue
        worst = max(worst, float(np.min(np.abs(lam - np.conj(v)))))
    return worst
