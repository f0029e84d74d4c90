"""Error system, steady-state response and r.m.s. bounds.

Driving the error system ``e = C x - H xi`` with the generator output
``u = L w`` gives, once transients die out, ``e_ss(t) = (C Pi - H P) w(t)``.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import DivisionNearZero, HypothesisViolated, LSMMError, NotSkew
from .generator import check_excitable
from .statespace import FrequencyResponse, frequency_response, is_hurwitz, spectral_abscissa, system_matrices
from .sylvester import solve_sylvester

SKEW_TOL = 1e-12
L_NORM_TOL = 1e-9
W_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class ErrorSystem:
    full: object
    reduced: object

    def interconnection(self, gen):
        """State matrix of ``(w, x, xi)`` with ``u = L w``."""
        A, B, _ = system_matrices(self.full)
        F, G, _ = system_matrices(self.reduced)
        n, r, nu = A.shape[0], F.shape[0], gen.nu
        M = np.zeros((nu + n + r, nu + n + r))
        M[:nu, :nu] = gen.S
        M[nu:nu + n, :nu] = B @ gen.L
        M[nu:nu + n, nu:nu + n] = A
        M[nu + n:, :nu] = G @ gen.L
        M[nu + n:, nu + n:] = F
        return M

    def output_row(self):
        _, _, C = system_matrices(self.full)
        _, _, H = system_matrices(self.reduced)
        return C, H


@dataclass(frozen=True, eq=False)
class SteadyStateReport:
    R: np.ndarray
    rms_ess: float
    bound: float
    omega0: np.ndarray
    rms_input: float

    @property
    def ratio(self):
        return self.rms_ess / self.rms_input if self.rms_input > 0 else math.inf

    def as_dict(self):
        return {
            "R": self.R.ravel().tolist(),
            "rms_ess": self.rms_ess,
            "rms_input": self.rms_input,
            "ratio": self.ratio,
            "bound": self.bound,
            "omega0": self.omega0.ravel().tolist(),
        }


def sylvester_pair(sys, model, gen):
    A, B, _ = system_matrices(sys)
    F, G, _ = system_matrices(model)
    Pi = solve_sylvester(A, B, gen.L, gen.S).X
    P = solve_sylvester(F, G, gen.L, gen.S).X
    return Pi, P


def steady_state_row(sys, model, gen):
    """``R = C Pi - H P``."""
    Pi, P = sylvester_pair(sys, model, gen)
    return sys.C @ Pi - model.H @ P


def _modal_coefficients(R, S, omega0):
    # complex Schur form of a normal matrix is diagonal with unitary Z
    T, Z = spla.schur(S.astype(complex), output="complex")
    theta = np.diag(T).imag
    c = (np.asarray(R).reshape(1, -1) @ Z).ravel() * (Z.conj().T @ np.asarray(omega0, dtype=float).ravel())
    return theta, c


def rms_periodic(R, gen, omega0):
    """Exact r.m.s. value of ``t -> R exp(S t) omega0`` for skew ``S``.

    Expanding in the eigenbasis of ``S`` gives a sum of harmonics
    ``c_k exp(i theta_k t)``; the mean square is the sum over distinct
    frequencies of ``|sum of c_k at that frequency|^2``.  For ``S`` made of
    distinct ``[[0, w], [-w, 0]]`` blocks this is
    ``sum 1/2 |R_b|^2 |omega0_b|^2`` (a zero-frequency scalar block keeps its
    full power).
    """
    S = gen.S
    if not gen.is_skew(SKEW_TOL):
        raise NotSkew("S + S^T != 0")
    theta, c = _modal_coefficients(R, S, omega0)
    order = np.argsort(theta)
    theta, c = theta[order], c[order]
    tol = 1e-9 * max(1.0, float(np.max(np.abs(theta))) if theta.size else 1.0)
    total, acc = 0.0, 0j
    for k in range(len(theta)):
        acc += c[k]
        if k == len(theta) - 1 or theta[k + 1] - theta[k] > tol:
            total += abs(acc) ** 2
            acc = 0j
    return math.sqrt(total)


def rms_quadrature(R, gen, omega0, horizon, samples_per_period=64):
    """Trapezoid approximation of the r.m.s. integral over ``[0, horizon]``."""
    S = gen.S
    freqs = np.abs(np.linalg.eigvals(S).imag)
    wmax = max(float(np.max(freqs)), 1e-12)
    steps = max(16, int(math.ceil(horizon * wmax / (2 * math.pi) * samples_per_period)))
    h = horizon / steps
    Phi = spla.expm(S * h)
    w = np.asarray(omega0, dtype=float).ravel()
    R = np.asarray(R).ravel()
    vals = np.empty(steps + 1)
    for i in range(steps + 1):
        vals[i] = (R @ w) ** 2
        w = Phi @ w
    mean_sq = np.trapezoid(vals, dx=h) / horizon
    return math.sqrt(mean_sq)


def slowest_period(gen):
    freqs = np.abs(np.linalg.eigvals(gen.S).imag)
    freqs = freqs[freqs > 1e-12]
    return 2 * math.pi / float(np.min(freqs)) if freqs.size else 1.0


def check_bound_hypotheses(sys, model, gen, omega0):
    if not is_hurwitz(sys.A):
        raise HypothesisViolated("A is not Hurwitz", hypothesis="A Hurwitz")
    if not is_hurwitz(model.F):
        raise HypothesisViolated("F is not Hurwitz", hypothesis="F Hurwitz")
    if not gen.is_skew(SKEW_TOL):
        raise HypothesisViolated("S is not skew-symmetric", hypothesis="S skew")
    if abs(np.linalg.norm(gen.L) - 1.0) > L_NORM_TOL:
        raise HypothesisViolated(f"||L|| = {np.linalg.norm(gen.L):.12g} != 1", hypothesis="unit L")
    if not check_excitable(gen, omega0):
        raise HypothesisViolated("(S, omega0) is not controllable", hypothesis="excitable omega0")


def rms_gain_bound(sys, model, gen, xf=None, omega0=None):
    """Steady-state error r.m.s. and the bound ``||C Pi - H P||``.

    ``omega0`` defaults to ``L^T``.  ``xf`` is not needed for the numbers
    (the bound is expressed in the original coordinates) and is accepted
    for call-site symmetry.
    """
    if omega0 is None:
        omega0 = gen.L.ravel().copy()
    omega0 = np.asarray(omega0, dtype=float).ravel()
    # the Sylvester solves come first so spectral overlap is reported as such
    R = steady_state_row(sys, model, gen)
    check_bound_hypotheses(sys, model, gen, omega0)
    return SteadyStateReport(
        R=R,
        rms_ess=rms_periodic(R, gen, omega0),
        bound=float(np.linalg.norm(R)),
        omega0=omega0,
        rms_input=rms_periodic(gen.L, gen, omega0),
    )


@dataclass(frozen=True, eq=False)
class Simulation:
    t: np.ndarray
    omega: np.ndarray
    x: np.ndarray
    xi: np.ndarray
    e: np.ndarray


def settle_time(sys, model, factor=10.0):
    """``factor`` slowest time constants of ``diag(A, F)``."""
    a = max(spectral_abscissa(sys.A), spectral_abscissa(model.F))
    if a >= 0:
        return math.inf
    return factor / -a


def simulate_interconnection(sys, model, gen, omega0, horizon, step, x0=None, xi0=None):
    """Sample the interconnection with the exact one-step propagator ``expm(M h)``."""
    if step <= 0 or horizon <= 0:
        raise ValueError("step and horizon must be positive")
    es = ErrorSystem(sys, model)
    Mbig = es.interconnection(gen)
    C, H = es.output_row()
    n, r, nu = sys.n, model.r, gen.nu
    steps = int(math.floor(horizon / step + 1e-9))
    Phi = spla.expm(Mbig * step)
    z = np.concatenate([
        np.asarray(omega0, dtype=float).ravel(),
        np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).ravel(),
        np.zeros(r) if xi0 is None else np.asarray(xi0, dtype=float).ravel(),
    ])
    Z = np.empty((steps + 1, z.size))
    for i in range(steps + 1):
        Z[i] = z
        z = Phi @ z
        if not np.all(np.isfinite(z)):
            raise LSMMError(f"state overflow after {i + 1} steps", stage="simulation")
    t = step * np.arange(steps + 1)
    omega, x, xi = Z[:, :nu], Z[:, nu:nu + n], Z[:, nu + n:]
    e = x @ C.ravel() - xi @ H.ravel()
    return Simulation(t, omega, x, xi, e)


def relative_error_response(sys, model, grid):
    """``|W - W_hat| / |W|`` on ``grid``; points with ``|W| < 1e-14`` are NaN and flagged."""
    W = frequency_response(sys, grid).values
    Wh = frequency_response(model, grid).values
    mag = np.abs(W)
    flagged = tuple(int(i) for i in np.flatnonzero(mag < W_FLOOR))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(W - Wh) / mag
    rel[list(flagged)] = np.nan
    return FrequencyResponse(np.asarray(grid, dtype=float), rel, flagged=flagged)


def require_unflagged(resp):
    if resp.flagged:
        raise DivisionNearZero(f"|W| below {W_FLOOR} at grid indices {list(resp.flagged)}")
    return resp
