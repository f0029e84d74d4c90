"""Sylvester equations ``A X + B L = X S``.

The solver proper is LAPACK's Bartels-Stewart routine (``trsyl``) reached
through :func:`scipy.linalg.solve_sylvester`; this module adds the
spectral-separation guard and residual verification.  The dense Kronecker
form is kept only as an independent check.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import IllConditioned, SpectraOverlap
from .statespace import eigvals

SPEC_DELTA = 1e-8
TOL_SYLV = 1e-9
COND_MAX = 1e14


@dataclass(frozen=True, eq=False)
class SylvesterSolution:
    X: np.ndarray
    residual_norm: float


def _spectral_scale(*spectra):
    radius = max((np.max(np.abs(s)) for s in spectra if len(s)), default=0.0)
    return max(1.0, radius)


def spectral_distance(M1, M2):
    e1 = eigvals(np.atleast_2d(M1))
    e2 = eigvals(np.atleast_2d(M2))
    return float(np.min(np.abs(e1[:, None] - e2[None, :]))), _spectral_scale(e1, e2)


def spectra_disjoint(M1, M2):
    """True iff the spectra are further apart than ``1e-8`` times the spectral scale."""
    dist, scale = spectral_distance(M1, M2)
    return bool(dist > SPEC_DELTA * scale)


def residual(A, B, L, S, X):
    return float(np.linalg.norm(A @ X + B @ L - X @ S))


def solve_sylvester(A, B, L, S):
    """Unique solution of ``A X + B L = X S``.

    Parameters
    ----------
    A : (n, n) array
    B : (n, m) array
    L : (m, nu) array
    S : (nu, nu) array

    Raises
    ------
    SpectraOverlap
        If the spectra of ``A`` and ``S`` are not separated.
    IllConditioned
        If the separation-based condition estimate exceeds ``1e14`` or the
        relative residual of the computed solution exceeds ``1e-9``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    S = np.atleast_2d(np.asarray(S, dtype=float))
    B = np.asarray(B, dtype=float).reshape(A.shape[0], -1)
    L = np.asarray(L, dtype=float).reshape(-1, S.shape[0])

    dist, scale = spectral_distance(A, S)
    if dist <= SPEC_DELTA * scale:
        raise SpectraOverlap(f"spectra of A and S are {dist:.3g} apart", distance=dist)
    norm_sum = np.linalg.norm(A, "fro") + np.linalg.norm(S, "fro")
    cond = norm_sum / dist
    if cond > COND_MAX:
        raise IllConditioned(f"Sylvester operator condition estimate {cond:.3g}", cond=cond)

    # solve_sylvester solves A X + X B' = Q, hence B' = -S and Q = -B L
    X = spla.solve_sylvester(A, -S, -(B @ L))
    res = residual(A, B, L, S, X)
    if res > TOL_SYLV * max(1.0, norm_sum * np.linalg.norm(X, "fro")):
        raise IllConditioned(f"Sylvester residual {res:.3g} above tolerance", residual=res)
    return SylvesterSolution(X=X, residual_norm=res)


def solve_sylvester_kron(A, B, L, S):
    """Dense ``(I kron A - S^T kron I) vec X = -vec(B L)`` solve; test oracle only."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    S = np.atleast_2d(np.asarray(S, dtype=float))
    n, nu = A.shape[0], S.shape[0]
    BL = np.asarray(B, dtype=float).reshape(n, -1) @ np.asarray(L, dtype=float).reshape(-1, nu)
    K = np.kron(np.eye(nu), A) - np.kron(S.T, np.eye(n))
    x = np.linalg.solve(K, -BL.reshape(-1, order="F"))
    return x.reshape(n, nu, order="F")
