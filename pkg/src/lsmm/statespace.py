"""SISO LTI systems: containers, transfer function evaluation, structural checks."""

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla
from scipy.linalg import lapack

from .errors import EigenFailure, ModelFormatError, SingularResolvent

HURWITZ_EPS = 1e-10
RCOND_MIN = 1e-12
RANK_TOL = 1e-10


def _as_column(v, n, name):
    v = np.asarray(v, dtype=float)
    if v.size != n:
        raise ModelFormatError(f"{name} must have {n} entries, got shape {v.shape}")
    return v.reshape(n, 1)


def _as_row(v, n, name):
    v = np.asarray(v, dtype=float)
    if v.size != n:
        raise ModelFormatError(f"{name} must have {n} entries, got shape {v.shape}")
    return v.reshape(1, n)


def _as_square(M, name):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ModelFormatError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    return M


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Full-order system ``x' = Ax + Bu, y = Cx``.

    ``B`` is stored as an ``(n, 1)`` column and ``C`` as a ``(1, n)`` row.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    validated: bool = field(default=False)

    def __post_init__(self):
        A = _as_square(self.A, "A")
        n = A.shape[0]
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _as_column(self.B, n, "B"))
        object.__setattr__(self, "C", _as_row(self.C, n, "C"))
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(self.B)) and np.all(np.isfinite(self.C))):
            raise ModelFormatError("system matrices contain non-finite entries")
        if self.validated:
            flags = check_minimal(self)
            if not (flags["controllable"] and flags["observable"]):
                raise ModelFormatError(f"system is not minimal: {flags}")

    @property
    def n(self):
        return self.A.shape[0]

    def matrices(self):
        return self.A, self.B, self.C


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Candidate model ``xi' = F xi + G v, psi = H xi`` of order ``r``."""

    F: np.ndarray
    G: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        F = _as_square(self.F, "F")
        r = F.shape[0]
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", _as_column(self.G, r, "G"))
        object.__setattr__(self, "H", _as_row(self.H, r, "H"))

    @property
    def r(self):
        return self.F.shape[0]

    def matrices(self):
        return self.F, self.G, self.H

    def as_statespace(self):
        return StateSpace(self.F, self.G, self.H)


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    grid: np.ndarray
    values: np.ndarray
    flagged: tuple = ()

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).ravel()
        values = np.asarray(self.values).ravel()
        if grid.shape != values.shape:
            raise ValueError("grid and values must have equal length")
        if grid.size and not (np.all(np.isfinite(grid)) and np.all(grid >= 0)):
            raise ValueError("frequency grid must be finite and non-negative")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


def system_matrices(sys):
    """Return ``(A, B, C)`` for either a :class:`StateSpace` or a :class:`ReducedModel`."""
    return sys.matrices()


class Resolvent:
    """LU factorisation of ``sI - A`` with a reciprocal-condition guard.

    Reused for repeated solves at one point (moment chains).
    """

    def __init__(self, A, s):
        n = A.shape[0]
        M = s * np.eye(n) - A
        if np.iscomplexobj(M) and np.all(M.imag == 0):
            M = M.real
        anorm = np.linalg.norm(M, 1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", spla.LinAlgWarning)
            self._lu = spla.lu_factor(M, check_finite=False)
        (gecon,) = lapack.get_lapack_funcs(("gecon",), (self._lu[0],))
        rcond, info = gecon(self._lu[0], anorm, norm="1")
        self.rcond = float(rcond) if info == 0 and anorm > 0 else 0.0
        if not np.isfinite(self.rcond) or self.rcond < RCOND_MIN:
            raise SingularResolvent(f"sI - A is numerically singular at s={s} (rcond={self.rcond:.3g})", s=s)

    def solve(self, rhs):
        return spla.lu_solve(self._lu, rhs, check_finite=False)


def transfer_eval(sys, s):
    """Evaluate ``W(s) = C (sI - A)^{-1} B`` with one LU solve."""
    A, B, C = system_matrices(sys)
    x = Resolvent(A, complex(s)).solve(B.astype(complex))
    return complex((C @ x)[0, 0])


def _thread_count():
    try:
        return max(1, int(os.environ.get("LSMM_THREADS", "1")))
    except ValueError:
        return 1


def frequency_response(sys, grid):
    """Sample ``W(i omega)`` on ``grid`` (rad/s).

    Evaluation is spread over ``LSMM_THREADS`` worker threads when that
    environment variable is above one; output order always follows ``grid``.
    """
    grid = np.asarray(grid, dtype=float).ravel()

    def one(w):
        try:
            return transfer_eval(sys, 1j * w)
        except SingularResolvent as exc:
            raise SingularResolvent(f"resolvent singular at omega={w}", omega=w) from exc

    threads = _thread_count()
    if threads > 1 and grid.size > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, grid))
    else:
        values = [one(w) for w in grid]
    return FrequencyResponse(grid, np.array(values, dtype=complex))


def _rank_deficient(M):
    sv = np.linalg.svd(M, compute_uv=False)
    return sv[0] == 0 or sv[-1] / sv[0] < RANK_TOL


def eigvals(M):
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def check_minimal(sys):
    """PBH rank tests at every eigenvalue of ``A``."""
    A, B, C = system_matrices(sys)
    n = A.shape[0]
    controllable = observable = True
    for lam in eigvals(A):
        shifted = lam * np.eye(n) - A
        if controllable and _rank_deficient(np.hstack([shifted, B])):
            controllable = False
        if observable and _rank_deficient(np.vstack([shifted, C])):
            observable = False
    return {"controllable": controllable, "observable": observable}


def is_hurwitz(M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return bool(np.all(eigvals(M).real < -HURWITZ_EPS))


def spectral_abscissa(M):
    return float(np.max(eigvals(np.atleast_2d(M)).real))
