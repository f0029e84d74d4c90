"""Probe the steady-state r.m.s. inequality ``rms(e) / rms(u) <= ||C Pi - H P||``.

Draws random stable systems, reduced models from the dominant-eigenvalue
construction and random excitable initial states, and reports how often
the inequality fails.  With a skew generator the ratio squared is the
``|omega0_b|^2 |L_b|^2``-weighted mean of ``|R_b|^2 / |L_b|^2`` over the
oscillator blocks, so it can exceed ``||R||^2`` whenever the initial state
concentrates energy where ``|R_b| / |L_b|`` is large.
"""

import argparse
import logging

import numpy as np

from lsmm import InterpolationSpec, build_generator, build_transform, dominant_parameters, ls_family, rms_gain_bound
from lsmm.errors import LSMMError
from lsmm.statespace import StateSpace


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.disable(logging.WARNING)
    rng = np.random.default_rng(args.seed)
    fails = done = 0
    worst = 0.0
    default_fails = 0
    while done < args.trials:
        n = int(rng.integers(3, 9))
        G = rng.standard_normal((n, n))
        A = G - (np.max(np.linalg.eigvals(G).real) + rng.uniform(0.1, 1.0)) * np.eye(n)
        sys = StateSpace(A, rng.standard_normal(n), rng.standard_normal(n))
        spec = InterpolationSpec.imaginary_axis(np.sort(rng.uniform(0.2, 5.0, int(rng.integers(1, 4)))))
        gen = build_generator(spec)
        xf = build_transform(gen, spec)
        try:
            params, _ = dominant_parameters(sys, gen, xf, 1 if rng.random() < 0.5 else 2)
            model = ls_family(sys, gen, xf, params)
            rep = rms_gain_bound(sys, model, gen, omega0=rng.standard_normal(gen.nu))
            default = rms_gain_bound(sys, model, gen)
        except LSMMError:
            continue
        done += 1
        excess = rep.ratio - rep.bound
        fails += excess > 1e-6
        default_fails += default.ratio - default.bound > 1e-6
        worst = max(worst, rep.ratio / rep.bound if rep.bound > 0 else 0.0)
    print(f"random omega0: inequality fails on {fails}/{done} instances; worst ratio/bound = {worst:.3f}")
    print(f"omega0 = L^T:  inequality fails on {default_fails}/{done} instances")


if __name__ == "__main__":
    main()
