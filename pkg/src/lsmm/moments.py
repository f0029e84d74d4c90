"""Moments computed two independent ways, the least-squares index and the norm identity."""

from dataclasses import dataclass

import numpy as np

from .errors import SingularResolvent
from .statespace import Resolvent, system_matrices
from .sylvester import solve_sylvester


@dataclass(frozen=True, eq=False)
class MomentVector:
    """Moments ordered by spec point, then by order ``j = 0..k_i``."""

    entries: np.ndarray
    layout: list

    def __len__(self):
        return len(self.entries)


def moment_chain(sys, s, k):
    """``[C (sI - A)^{-(j+1)} B for j = 0..k]`` from ``k + 1`` solves on one factorisation."""
    A, B, C = system_matrices(sys)
    res = Resolvent(A, complex(s))
    v = B[:, 0].astype(complex)
    out = np.empty(k + 1, dtype=complex)
    for j in range(k + 1):
        v = res.solve(v)
        out[j] = C[0] @ v
    return out


def moment_oracle(sys, s, k):
    """Moment of order ``k`` at ``s``: ``(-1)^k / k! W^(k)(s) = C (sI - A)^{-(k+1)} B``."""
    return complex(moment_chain(sys, s, k)[-1])


def moments(sys, spec):
    """Moment vector of ``sys`` at every ``(s_i, j)`` of ``spec`` via :func:`moment_oracle` chains."""
    vals = [moment_chain(sys, s, k) for s, k in spec.points]
    return MomentVector(np.concatenate(vals), spec.layout)


def signature_for(orders):
    """Signs ``(-1)^j`` per block.

    Column ``j`` of the single-point Sylvester solution obeys
    ``pi_j = -(sI - A)^{-1} pi_{j-1}``, so ``C pi_j = (-1)^j eta_j``.
    """
    return np.concatenate([(-1.0) ** np.arange(k + 1) for k in orders])


def moments_via_sylvester(sys, gen, xf):
    """Moments read off ``C Pi T Psi`` where ``A Pi + B L = Pi S``."""
    spec = xf.spec
    A, B, C = system_matrices(sys)
    Pi = solve_sylvester(A, B, gen.L, gen.S).X
    row = (C @ Pi @ xf.T).ravel() * signature_for(spec.orders)
    return MomentVector(row.astype(complex), spec.layout)


def ls_index(sys, model, spec):
    """Sum of squared moment mismatches over all interpolation conditions."""
    try:
        eta = moments(sys, spec).entries
    except SingularResolvent as exc:
        raise SingularResolvent(f"full system: {exc}", system="full") from exc
    try:
        eta_hat = moments(model, spec).entries
    except SingularResolvent as exc:
        raise SingularResolvent(f"model: {exc}", system="model") from exc
    return float(np.sum(np.abs(eta - eta_hat) ** 2))


def dual_norm(row):
    """Dual of the Euclidean norm on a row vector, i.e. its Euclidean norm."""
    return float(np.linalg.norm(np.asarray(row).ravel()))


def verify_norm_identity(sys, model, gen, xf):
    """Both sides of ``||(C Pi - H P) T||^2 = sum |eta - eta_hat|^2``."""
    A, B, C = system_matrices(sys)
    F, G, H = system_matrices(model)
    Pi = solve_sylvester(A, B, gen.L, gen.S).X
    P = solve_sylvester(F, G, gen.L, gen.S).X
    lhs = dual_norm((C @ Pi - H @ P) @ xf.T) ** 2
    rhs = ls_index(sys, model, xf.spec)
    return {"lhs": lhs, "rhs": rhs}
