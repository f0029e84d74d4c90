"""Single-output pole placement accuracy as a function of the generator size.

For each size, random observable pairs ``(S, L)`` with Gaussian entries and
random stable conjugate-closed targets; reports the achieved relative
spectrum error (optimal pairing) and which method produced the gain.
"""

import argparse
import collections

import numpy as np

from lsmm.generator import SignalGenerator, is_observable
from lsmm.reduction import injection_placement


def targets(rng, nu):
    t = []
    while len(t) < nu:
        if nu - len(t) >= 2 and rng.random() < 0.5:
            z = complex(-rng.uniform(0.1, 2.0), rng.uniform(0.1, 3.0))
            t += [z, z.conjugate()]
        else:
            t.append(complex(-rng.uniform(0.1, 3.0), 0.0))
    return np.array(t)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 12, 16, 20, 24])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print("nu   pass(1e-6)  median err   max err    methods")
    for nu in args.sizes:
        errs, methods = [], collections.Counter()
        for _ in range(args.trials):
            while True:
                gen = SignalGenerator(rng.standard_normal((nu, nu)), rng.standard_normal(nu))
                if is_observable(gen.S, gen.L):
                    break
            res = injection_placement(gen, targets(rng, nu))
            errs.append(res.error)
            methods[res.method] += 1
        errs = np.array(errs)
        print(f"{nu:3d}  {np.sum(errs <= 1e-6):4d}/{args.trials:<5d}  {np.median(errs):10.2e}  {errs.max():9.2e}  "
              f"{dict(methods)}")


if __name__ == "__main__":
    main()
