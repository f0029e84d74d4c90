"""Moment-matching and least-squares moment-matching model families.

The exact family is ``F = S - Delta L, G = Delta, H = C Pi``.  The
least-squares family is ``F = P (S - Delta L) Q, G = P Delta, H = C Pi Q``
with admissible parameters: ``P`` full row rank with ``ker P`` a conditioned
invariant of ``(S, L)``, ``Q`` the ``M``-weighted Moore-Penrose inverse of
``P``, and ``ker P`` invariant under ``S - Delta L``.
"""

import logging
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg as spla
from scipy.optimize import linear_sum_assignment

from .errors import (DefectiveEigenvalue, InadmissibleParameters, PairSplit, PlacementFailure,
                     RankDeficient, SpectraOverlap, ValidationError)
from .statespace import ReducedModel, eigvals, system_matrices
from .sylvester import spectra_disjoint, solve_sylvester

log = logging.getLogger(__name__)

PLACEMENT_TOL = 1e-6
RANK_TOL = 1e-10
INVARIANCE_TOL = 1e-8
PINV_TOL = 1e-9
SIMPLE_TOL = 1e-8
DOMINANCE = ("real", "magnitude")


@dataclass(frozen=True, eq=False)
class ReductionParameters:
    P: np.ndarray
    Delta: np.ndarray
    Q: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Delta", np.asarray(self.Delta, dtype=float).reshape(P.shape[1], 1))
        object.__setattr__(self, "Q", np.asarray(self.Q, dtype=float).reshape(P.shape[1], P.shape[0]))
        object.__setattr__(self, "M", np.asarray(self.M, dtype=float).reshape(P.shape[1], P.shape[1]))


@dataclass(frozen=True)
class Violation:
    condition: str
    residual: float
    tolerance: float

    def __str__(self):
        return f"({self.condition}) residual {self.residual:.3g} > {self.tolerance:.3g}"


@dataclass
class PlacementResult:
    Delta: np.ndarray
    achieved: np.ndarray
    error: float
    method: str
    attempts: dict = field(default_factory=dict)


# -- exact matching ---------------------------------------------------------

def full_order_family(sys, gen, Delta):
    """Order-``nu`` model ``(S - Delta L, Delta, C Pi)`` matching all moments."""
    A, B, C = system_matrices(sys)
    S, L = gen.S, gen.L
    Delta = np.asarray(Delta, dtype=float).reshape(gen.nu, 1)
    F = S - Delta @ L
    if not spectra_disjoint(S, F):
        raise SpectraOverlap("spectrum(S - Delta L) meets spectrum(S)", stage="reduction")
    Pi = solve_sylvester(A, B, L, S).X
    return ReducedModel(F, Delta, C @ Pi)


# -- eigenvalue selection ---------------------------------------------------

def dominance_index(ev, dominance="real"):
    """Permutation sorting eigenvalues most-dominant first.

    ``"real"``: descending real part, ties by ascending ``|Im|``.
    ``"magnitude"``: ascending modulus.  Within a conjugate pair the member
    with positive imaginary part comes first.
    """
    ev = np.asarray(ev, dtype=complex).ravel()
    if dominance == "real":
        return np.lexsort((-ev.imag, np.abs(ev.imag), -ev.real))
    if dominance == "magnitude":
        return np.lexsort((-ev.imag, -ev.real, np.abs(ev)))
    raise ValidationError(f"dominance must be one of {DOMINANCE}")


def order_eigenvalues(ev, dominance="real"):
    ev = np.asarray(ev, dtype=complex).ravel()
    return ev[dominance_index(ev, dominance)]


def _conjugate_closed_prefix(ev, m):
    sel = ev[:m].copy()
    scale = max(1.0, float(np.max(np.abs(ev)))) if len(ev) else 1.0
    tol = 1e-9 * scale
    used = np.zeros(m, dtype=bool)
    for i in range(m):
        if used[i] or abs(sel[i].imag) <= tol:
            if not used[i]:
                sel[i] = sel[i].real
            used[i] = True
            continue
        partners = [j for j in range(m) if not used[j] and j != i and abs(sel[j] - np.conj(sel[i])) <= 1e-7 * max(1.0, abs(sel[i]))]
        if not partners:
            raise PairSplit(f"taking {m} eigenvalues splits the pair at {sel[i]:.6g}")
        j = partners[0]
        sel[j] = np.conj(sel[i])
        used[i] = used[j] = True
    return sel


def dominant_eigenvalues(M, m, dominance="real"):
    """The ``m`` most dominant eigenvalues of ``M``, conjugate-closed."""
    ev = order_eigenvalues(eigvals(np.atleast_2d(M)), dominance)
    if m > len(ev) or m < 0:
        raise ValidationError(f"cannot take {m} eigenvalues of a {len(ev)}x{len(ev)} matrix")
    return _conjugate_closed_prefix(ev, m)


# -- output injection -------------------------------------------------------

def _pair(achieved, targets):
    cost = np.abs(achieved[:, None] - targets[None, :])
    rows, cols = linear_sum_assignment(cost)
    scale = np.where(np.abs(targets[cols]) > 0, np.abs(targets[cols]), 1.0)
    return float(np.max(cost[rows, cols] / scale)) if len(rows) else 0.0


def spectrum_mismatch(M, targets):
    """Largest relative eigenvalue deviation after optimal pairing."""
    targets = np.asarray(targets, dtype=complex).ravel()
    return _pair(eigvals(np.atleast_2d(M)), targets)


def _ackermann(S, L, targets):
    nu = S.shape[0]
    coeffs = np.real(np.poly(targets))
    St = S.T
    with np.errstate(all="ignore"):
        ctrb = np.empty((nu, nu))
        v = L.ravel().copy()
        for j in range(nu):
            ctrb[:, j] = v
            v = St @ v
        pS = np.zeros((nu, nu))
        for c in coeffs:
            pS = pS @ St + c * np.eye(nu)
        e = np.zeros(nu)
        e[-1] = 1.0
        y = np.linalg.solve(ctrb.T, e)
        K = y @ pS
    return K.reshape(nu, 1)


def _eigenstructure(S, L, targets):
    """Left eigenvectors of ``S - Delta L`` are ``L (tI - S)^{-1}``; require ``w_t Delta = -1``.

    Conjugate targets contribute the real and imaginary parts of one
    equation.  Solved in least squares after row equilibration.
    """
    nu = S.shape[0]
    rows, rhs = [], []
    done = np.zeros(len(targets), dtype=bool)
    for i, t in enumerate(targets):
        if done[i]:
            continue
        w = np.linalg.solve((t * np.eye(nu) - S).T, L.ravel().astype(complex))
        if t.imag == 0.0:
            rows.append(w.real)
            rhs.append(-1.0)
        else:
            rows += [w.real, w.imag]
            rhs += [-1.0, 0.0]
            partner = [j for j in range(i + 1, len(targets)) if not done[j] and targets[j] == np.conj(t)]
            if partner:
                done[partner[0]] = True
        done[i] = True
    W = np.array(rows)
    b = np.array(rhs)
    scale = np.linalg.norm(W, axis=1)
    scale[scale == 0] = 1.0
    Delta = np.linalg.lstsq(W / scale[:, None], b / scale, rcond=None)[0]
    return Delta.reshape(nu, 1)


def _eigenstructure_mp(S, L, targets, dps=40):
    """The eigenstructure equations solved in ``dps``-digit arithmetic.

    For ``nu`` beyond about a dozen the left-eigenvector system is
    Vandermonde-like and a double-precision solve loses most digits; the
    extended solve brings ``Delta`` down to its rounding floor.
    """
    nu = S.shape[0]
    with mpmath.workdps(dps):
        St = mpmath.matrix(S.T.tolist())
        Lm = mpmath.matrix(L.ravel().tolist())
        rows, rhs = [], []
        done = np.zeros(len(targets), dtype=bool)
        for i, t in enumerate(targets):
            if done[i]:
                continue
            w = mpmath.lu_solve(mpmath.mpc(t.real, t.imag) * mpmath.eye(nu) - St, Lm)
            if t.imag == 0.0:
                rows.append([mpmath.re(x) for x in w])
                rhs.append(-1)
            else:
                rows += [[mpmath.re(x) for x in w], [mpmath.im(x) for x in w]]
                rhs += [-1, 0]
                partner = [j for j in range(i + 1, len(targets)) if not done[j] and targets[j] == np.conj(t)]
                if partner:
                    done[partner[0]] = True
            done[i] = True
        Delta = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
        out = np.array([float(x) for x in Delta])
    return out.reshape(nu, 1)


def _check_targets(targets, nu):
    targets = np.asarray(targets, dtype=complex).ravel()
    if len(targets) != nu:
        raise ValidationError(f"need {nu} targets, got {len(targets)}")
    closed = _conjugate_closed_prefix(targets, nu)
    return closed


def injection_placement(gen, targets, tol=PLACEMENT_TOL):
    """Compute an output injection for ``targets`` and report how well it lands.

    Ackermann's formula on the dual pair ``(S^T, L^T)`` is tried first; if
    the verified spectrum misses ``tol`` the eigenstructure solve is tried,
    first in double precision and then in extended precision.
    The most accurate attempt is returned whether or not it meets ``tol``.
    """
    S, L = gen.S, gen.L
    targets = _check_targets(targets, gen.nu)
    attempts = {}
    best = None
    methods = (("ackermann", _ackermann), ("eigenstructure", _eigenstructure),
               ("eigenstructure-mp", _eigenstructure_mp))
    for name, method in methods:
        try:
            Delta = method(S, L, targets)
        except (np.linalg.LinAlgError, ValueError, ZeroDivisionError):
            continue
        if not np.all(np.isfinite(Delta)):
            continue
        achieved = eigvals(S - Delta @ L)
        err = _pair(achieved, targets)
        attempts[name] = err
        if best is None or err < best.error:
            best = PlacementResult(Delta, achieved, err, name)
        if err <= tol:
            break
    if best is None:
        raise PlacementFailure("no placement method produced a finite gain", attempts=attempts)
    best.attempts = attempts
    return best


def place_output_injection(gen, targets, tol=PLACEMENT_TOL):
    """``Delta`` with ``spectrum(S - Delta L) = targets`` to relative ``tol``.

    Raises :class:`PlacementFailure` when no method reaches ``tol``.
    """
    result = injection_placement(gen, targets, tol)
    if result.error > tol:
        raise PlacementFailure(f"achieved spectrum deviates by {result.error:.3g} (relative) > {tol:g}",
                               error=result.error, attempts=result.attempts)
    return result.Delta


# -- invariant bases --------------------------------------------------------

def _real_rows(vectors, eigenvalues):
    """Real Jordan basis rows, one per real eigenvalue and two per pair.

    Each complex vector is phase-fixed so its largest entry is real
    positive; rows are unit-norm with the largest-magnitude entry positive.
    """
    rows = []
    skip = set()
    for i, (v, lam) in enumerate(zip(vectors, eigenvalues)):
        if i in skip:
            continue
        if lam.imag == 0.0:
            parts = [np.real(v)]
        else:
            k = int(np.argmax(np.abs(v)))
            v = v * (np.conj(v[k]) / abs(v[k]))
            parts = [v.real, v.imag]
            for j in range(i + 1, len(eigenvalues)):
                if j not in skip and eigenvalues[j] == np.conj(lam):
                    skip.add(j)
                    break
        for p in parts:
            p = p / np.linalg.norm(p)
            k = int(np.argmax(np.abs(p)))
            rows.append(p if p[k] > 0 else -p)
    return np.array(rows)


def _require_simple(selected, spectrum):
    for lam in selected:
        close = np.abs(spectrum - lam) <= SIMPLE_TOL * max(1.0, abs(lam))
        if np.count_nonzero(close) > 1:
            raise DefectiveEigenvalue(f"eigenvalue {lam:.6g} is not simple")


def dominant_invariant_basis(Sd, r, dominance="real"):
    """``P`` (``r x nu``) with ``P Sd = F P``, from left eigenvectors of ``Sd``."""
    Sd = np.atleast_2d(np.asarray(Sd, dtype=float))
    lam, V = spla.eig(Sd.T)
    idx = dominance_index(lam, dominance)
    lam_sorted = lam[idx]
    V = V[:, idx]
    selected = _conjugate_closed_prefix(lam_sorted, r)
    _require_simple(selected, lam)
    return _real_rows([V[:, i] for i in range(r)], selected)


def injection_basis(gen, eigenvalues):
    """Closed-form left eigenvector rows ``L (tI - S)^{-1}`` of ``S - Delta L``.

    Exact for every ``t`` placed by ``Delta``; avoids eigenvector computation
    on ``S - Delta L``, which is badly conditioned when the injection moves
    the generator spectrum far.
    """
    S, L = gen.S, gen.L
    ev = _conjugate_closed_prefix(np.asarray(eigenvalues, dtype=complex).ravel(), len(eigenvalues))
    _require_simple(ev, ev)
    vecs = [np.linalg.solve((t * np.eye(gen.nu) - S).T, L.ravel().astype(complex)) for t in ev]
    return _real_rows(vecs, ev)


def weighted_pinv(P, M):
    """``Q = M P^T (P M P^T)^{-1}``, the minimum ``M``-norm right inverse of ``P``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    M = np.asarray(M, dtype=float)
    sv = np.linalg.svd(P, compute_uv=False)
    if sv[0] == 0 or sv[-1] / sv[0] <= RANK_TOL or P.shape[0] > P.shape[1]:
        raise RankDeficient("P is not full row rank")
    gram = P @ M @ P.T
    return np.linalg.solve(gram, P @ M).T


# -- admissibility ----------------------------------------------------------

def check_admissible(params, gen):
    """List of violated conditions (empty iff admissible)."""
    P, Delta, Q, M = params.P, params.Delta, params.Q, params.M
    S, L = gen.S, gen.L
    nu = gen.nu
    out = []

    sv = np.linalg.svd(P, compute_uv=False)
    rank_ratio = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    if P.shape[0] > nu or rank_ratio <= RANK_TOL:
        out.append(Violation("A_P", float(rank_ratio), RANK_TOL))
        return out

    # S (ker P ∩ ker L) ⊆ ker P
    N = spla.null_space(np.vstack([P, L]))
    s_norm = max(1.0, np.linalg.norm(S))
    cond_res = float(np.linalg.norm(P @ S @ N) / (np.linalg.norm(P, 2) * s_norm)) if N.size else 0.0
    if cond_res > INVARIANCE_TOL:
        out.append(Violation("A_P", cond_res, INVARIANCE_TOL))

    gram = P @ M @ P.T
    try:
        Q_ref = np.linalg.solve(gram, P @ M).T
        q_res = float(np.linalg.norm(Q - Q_ref) / max(np.linalg.norm(Q_ref), 1e-300))
    except np.linalg.LinAlgError:
        q_res = np.inf
    if not q_res <= PINV_TOL:
        out.append(Violation("A_Q", q_res, PINV_TOL))

    Sd = S - Delta @ L
    inv_res = float(np.linalg.norm(P @ Sd @ (np.eye(nu) - Q @ P))
                    / (np.linalg.norm(P, 2) * max(np.linalg.norm(Sd), 1e-300)))
    if inv_res > INVARIANCE_TOL:
        out.append(Violation("A_Delta", inv_res, INVARIANCE_TOL))
    F = P @ Sd @ Q
    if not spectra_disjoint(S, F):
        dist = float(np.min(np.abs(eigvals(S)[:, None] - eigvals(F)[None, :])))
        out.append(Violation("A_Delta", dist, 0.0))
    return out


def admissibility_residuals(params, gen):
    """Scaled residuals of each admissibility condition (for reports)."""
    P, Delta, Q, M = params.P, params.Delta, params.Q, params.M
    S, L = gen.S, gen.L
    Sd = S - Delta @ L
    N = spla.null_space(np.vstack([P, L]))
    Pn = np.linalg.norm(P, 2)
    Q_ref = np.linalg.solve(P @ M @ P.T, P @ M).T
    return {
        "A_P_conditioned_invariance": float(np.linalg.norm(P @ S @ N) / (Pn * max(1.0, np.linalg.norm(S)))) if N.size else 0.0,
        "A_Q_weighted_pinv": float(np.linalg.norm(Q - Q_ref) / np.linalg.norm(Q_ref)),
        "A_Delta_invariance": float(np.linalg.norm(P @ Sd @ (np.eye(gen.nu) - Q @ P)) / (Pn * np.linalg.norm(Sd))),
    }


# -- least-squares family ---------------------------------------------------

def ls_family(sys, gen, xf, params, check=True):
    """Model ``(P (S - Delta L) Q, P Delta, C Pi Q)``.

    ``xf`` is accepted for symmetry with the rest of the pipeline; the weight
    it induces is already carried by ``params.M``.
    """
    if check:
        violations = check_admissible(params, gen)
        if violations:
            raise InadmissibleParameters("; ".join(str(v) for v in violations), violations=violations)
    A, B, C = system_matrices(sys)
    Pi = solve_sylvester(A, B, gen.L, gen.S).X
    P, Delta, Q = params.P, params.Delta, params.Q
    F = P @ (gen.S - Delta @ gen.L) @ Q
    return ReducedModel(F, P @ Delta, C @ Pi @ Q)


def filler_targets(eigs, count):
    """Real stable targets placed well left of ``eigs`` (used when ``nu > n``)."""
    base = max(1.0, 2.0 * float(np.max(np.abs(eigs))) if len(eigs) else 1.0)
    return -base * (1.0 + np.arange(1, count + 1) / (count + 1))


def dominant_parameters(sys, gen, xf, r, dominance="real", targets=None, basis="structured",
                        tol=PLACEMENT_TOL):
    """Parameters preserving the ``r`` dominant eigenvalues of ``A``.

    ``Delta`` places the ``nu`` dominant eigenvalues of ``A`` on
    ``S - Delta L`` (padded with real fillers when ``nu > n``); the rows of
    ``P`` span the left invariant subspace of the ``r`` most dominant ones;
    ``Q`` is the ``M``-weighted pseudoinverse.  ``basis="structured"`` uses
    :func:`injection_basis`, ``basis="eig"`` uses
    :func:`dominant_invariant_basis` on ``S - Delta L``.

    Returns ``(params, info)`` where ``info`` records targets and the
    placement accuracy.
    """
    if r < 1 or r > gen.nu:
        raise ValidationError(f"order must satisfy 1 <= r <= nu={gen.nu}")
    A = sys.A
    if targets is None:
        m = min(gen.nu, sys.n)
        targets = dominant_eigenvalues(A, m, dominance)
        if gen.nu > m:
            targets = np.concatenate([targets, filler_targets(eigvals(A), gen.nu - m)])
    targets = order_eigenvalues(targets, dominance)
    targets = _conjugate_closed_prefix(targets, len(targets))
    placed = injection_placement(gen, targets, tol=tol)
    if placed.error > tol:
        log.warning("placement misses targets by %.3g (relative); continuing with the %s gain",
                    placed.error, placed.method)
    Delta = placed.Delta
    if basis == "structured":
        keep = _conjugate_closed_prefix(targets, r)
        P = injection_basis(gen, keep)
    elif basis == "eig":
        P = dominant_invariant_basis(gen.S - Delta @ gen.L, r, dominance)
        keep = _conjugate_closed_prefix(targets, r)
    else:
        raise ValidationError("basis must be 'structured' or 'eig'")
    Q = weighted_pinv(P, xf.M)
    params = ReductionParameters(P, Delta, Q, xf.M)
    info = {
        "targets": targets,
        "preserved": keep,
        "placement_error": placed.error,
        "placement_method": placed.method,
        "placement_attempts": dict(placed.attempts),
    }
    return params, info
