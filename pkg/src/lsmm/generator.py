"""Signal generators ``w' = S w, theta = L w`` built from interpolation data.

Interpolation points map to real canonical blocks of ``S``: Jordan blocks
for real points, skew ``[[0, w], [-w, 0]]`` blocks (or their real-Jordan
chains) for points on the imaginary axis, real-Jordan blocks for general
conjugate pairs.  Distinct points keep ``S`` non-derogatory.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConjugateClosureViolation, DuplicatePoint, TransformSingular, ValidationError
from .statespace import RANK_TOL, eigvals

POINT_TOL = 1e-10
TRANSFORM_TOL = 1e-9


def _snap(s):
    s = complex(s)
    re, im = s.real, s.imag
    if abs(im) <= POINT_TOL:
        im = 0.0
    if abs(re) <= POINT_TOL:
        re = 0.0
    return complex(re, im)


@dataclass(frozen=True)
class InterpolationSpec:
    """Interpolation points ``s_i`` with orders ``k_i``.

    ``points`` is a tuple of ``(s_i, k_i)``.  ``completed`` records whether
    missing conjugates were added by :meth:`from_points`.
    """

    points: tuple
    completed: bool = False

    def __post_init__(self):
        pts = tuple((_snap(s), int(k)) for s, k in self.points)
        if not pts:
            raise ValidationError("interpolation spec needs at least one point")
        for s, k in pts:
            if k < 0:
                raise ValidationError(f"negative interpolation order at {s}")
        for i, (s, _) in enumerate(pts):
            for t, _ in pts[i + 1:]:
                if abs(s - t) <= POINT_TOL:
                    raise DuplicatePoint(f"duplicate interpolation point {s}")
        for s, k in pts:
            if s.imag != 0.0:
                match = [kk for t, kk in pts if abs(t - s.conjugate()) <= POINT_TOL]
                if not match:
                    raise ConjugateClosureViolation(f"conjugate of {s} missing")
                if match[0] != k:
                    raise ConjugateClosureViolation(f"orders differ at {s} and its conjugate")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points, complete_conjugates=True):
        """Build a spec, inserting each missing conjugate right after its partner."""
        pts = [(_snap(s), int(k)) for s, k in points]
        if not complete_conjugates:
            return cls(tuple(pts))
        out, added = [], False
        for s, k in pts:
            out.append((s, k))
            if s.imag != 0.0:
                conj = s.conjugate()
                if not any(abs(t - conj) <= POINT_TOL for t, _ in pts):
                    out.append((conj, k))
                    added = True
        return cls(tuple(out), completed=added)

    @classmethod
    def imaginary_axis(cls, frequencies):
        """Simple points at ``+/- i w`` for each frequency (zero gives one real point)."""
        pts = []
        for w in frequencies:
            w = float(w)
            if w == 0.0:
                pts.append((0j, 0))
            else:
                pts += [(1j * w, 0), (-1j * w, 0)]
        return cls(tuple(pts))

    @property
    def nu(self):
        return sum(k + 1 for _, k in self.points)

    @property
    def orders(self):
        return [k for _, k in self.points]

    @property
    def layout(self):
        """``(point, order)`` for each moment, in moment-vector order."""
        return [(s, j) for s, k in self.points for j in range(k + 1)]

    def all_simple_on_axis(self):
        return all(k == 0 and s.real == 0.0 for s, k in self.points)

    def characteristic_polynomial(self):
        roots = [s for s, k in self.points for _ in range(k + 1)]
        return np.real_if_close(np.poly(roots), tol=1e6)


@dataclass(frozen=True, eq=False)
class SignalGenerator:
    S: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.S, dtype=float))
        if S.shape[0] != S.shape[1]:
            raise ValidationError("S must be square")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "L", np.asarray(self.L, dtype=float).reshape(1, S.shape[0]))

    @property
    def nu(self):
        return self.S.shape[0]

    def is_skew(self, tol=1e-12):
        return bool(np.linalg.norm(self.S + self.S.T) <= tol * max(1.0, np.linalg.norm(self.S)))


@dataclass(frozen=True, eq=False)
class CanonicalTransform:
    """``T`` with ``S T = T J`` and ``L T = Lambda``; ``M = T T^H`` (real SPD)."""

    T: np.ndarray
    J: np.ndarray
    Lam: np.ndarray
    M: np.ndarray
    spec: InterpolationSpec = None

    def unitary_part(self):
        """``T / sqrt(nu)``; unitary when ``S`` is skew with simple points and ``||L|| = 1``."""
        return self.T / np.sqrt(self.T.shape[0])


def _real_jordan(sigma, omega, size):
    blocks = np.kron(np.eye(size), np.array([[sigma, omega], [-omega, sigma]]))
    return blocks + np.kron(np.eye(size, k=1), np.eye(2))


def build_generator(spec, normalize=None):
    """Real pair ``(S, L)`` whose ``S`` has characteristic polynomial ``prod (s - s_i)^(k_i + 1)``.

    ``normalize=None`` rescales ``L`` to unit norm exactly when every point is
    simple and lies on the imaginary axis (the skew case); ``True``/``False``
    force the choice.
    """
    blocks, rows, seen = [], [], []
    for s, k in spec.points:
        if any(abs(s - t) <= POINT_TOL or abs(s.conjugate() - t) <= POINT_TOL for t in seen):
            continue
        seen.append(s)
        if s.imag == 0.0:
            blocks.append(s.real * np.eye(k + 1) + np.eye(k + 1, k=1))
            row = np.zeros(k + 1)
            row[0] = 1.0
        else:
            blocks.append(_real_jordan(s.real, abs(s.imag), k + 1))
            row = np.zeros(2 * (k + 1))
            row[:2] = 1.0
        rows.append(row)
    nu = sum(b.shape[0] for b in blocks)
    S = np.zeros((nu, nu))
    i = 0
    for b in blocks:
        m = b.shape[0]
        S[i:i + m, i:i + m] = b
        i += m
    L = np.concatenate(rows)
    if normalize is None:
        normalize = spec.all_simple_on_axis()
    if normalize:
        L = L / np.linalg.norm(L)
    return SignalGenerator(S, L)


def is_observable(S, L):
    S = np.atleast_2d(S)
    L = np.asarray(L).reshape(1, -1)
    nu = S.shape[0]
    for lam in eigvals(S):
        sv = np.linalg.svd(np.vstack([lam * np.eye(nu) - S, L]), compute_uv=False)
        if sv[0] == 0 or sv[-1] / sv[0] < RANK_TOL:
            return False
    return True


def is_non_derogatory(S, tol=1e-8):
    S = np.atleast_2d(S)
    nu = S.shape[0]
    for lam in eigvals(S):
        sv = np.linalg.svd(lam * np.eye(nu) - S, compute_uv=False)
        if nu > 1 and sv[-2] <= tol * max(1.0, sv[0]):
            return False
    return True


def check_excitable(gen, omega0):
    """PBH controllability of the pair ``(S, omega0)``."""
    S = gen.S
    w0 = np.asarray(omega0, dtype=float).reshape(-1, 1)
    if not np.any(w0):
        return False
    nu = S.shape[0]
    for lam in eigvals(S):
        sv = np.linalg.svd(np.hstack([lam * np.eye(nu) - S, w0]), compute_uv=False)
        if sv[-1] / sv[0] < RANK_TOL:
            return False
    return True


def build_transform(gen, spec):
    """Solve ``S T = T J``, ``L T = Lambda`` chain by chain.

    For a point ``s`` of order ``k`` the columns satisfy
    ``[S - sI; L] t_0 = [0; 1]`` and ``[S - sI; L] t_j = [t_{j-1}; 0]``.
    Observability makes the stacked matrix full column rank.  Conjugate
    points reuse the conjugated chain so that ``M`` comes out exactly real.
    """
    S, L = gen.S, gen.L
    nu = gen.nu
    if spec.nu != nu:
        raise ValidationError(f"spec has nu={spec.nu} but generator has {nu}")
    chains = {}
    cols, jblocks, lam = [], [], []
    for s, k in spec.points:
        key = (s.real, s.imag)
        partner = (s.real, -s.imag)
        if partner in chains and s.imag != 0.0:
            chain = np.conj(chains[partner])
        else:
            stacked = np.vstack([S - s * np.eye(nu), L]).astype(complex)
            chain = np.zeros((nu, k + 1), dtype=complex)
            rhs = np.zeros(nu + 1, dtype=complex)
            rhs[-1] = 1.0
            for j in range(k + 1):
                if j > 0:
                    rhs = np.concatenate([chain[:, j - 1], [0.0]])
                chain[:, j] = np.linalg.lstsq(stacked, rhs, rcond=None)[0]
            if s.imag == 0.0:
                chain = chain.real.astype(complex)
        chains[key] = chain
        cols.append(chain)
        jblocks.append(s * np.eye(k + 1) + np.eye(k + 1, k=1))
        e1 = np.zeros(k + 1)
        e1[0] = 1.0
        lam.append(e1)
    T = np.hstack(cols)
    J = np.zeros((nu, nu), dtype=complex)
    i = 0
    for b in jblocks:
        m = b.shape[0]
        J[i:i + m, i:i + m] = b
        i += m
    Lam = np.concatenate(lam).reshape(1, nu)

    tnorm = np.linalg.norm(T)
    res_s = np.linalg.norm(S @ T - T @ J)
    res_l = np.linalg.norm(L @ T - Lam)
    if not np.isfinite(tnorm) or res_s > TRANSFORM_TOL * tnorm or res_l > TRANSFORM_TOL * tnorm:
        raise TransformSingular(f"transform residuals {res_s:.3g}, {res_l:.3g}")
    if np.linalg.cond(T) > 1e12:
        raise TransformSingular("transform is numerically singular")
    if np.all(T.imag == 0):
        T = T.real
        J = J.real
    M = (T @ T.conj().T).real
    M = 0.5 * (M + M.T)
    return CanonicalTransform(T=T, J=J, Lam=Lam, M=M, spec=spec)
