"""Scaling verdicts on all 3x3 matrices with entries in {-1, 0, 1}.

The null cone for the left-right action is the set of singular matrices, so
the verdict count should match the number of zero determinants (7875).
"""

import argparse
import itertools
import time

import numpy as np

from nullcone import Tensor, scale


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--n", type=int, default=3)
    args = p.parse_args()
    n = args.n
    t0 = time.perf_counter()
    null = singular = mismatch = 0
    for vals in itertools.product((-1, 0, 1), repeat=n * n):
        A = np.array(vals).reshape(n, n)
        v = scale(Tensor.from_array(A.reshape(1, n, n)), args.eps).in_null_cone
        s = round(np.linalg.det(A)) == 0
        null += v
        singular += s
        mismatch += v != s
    print(f"{3 ** (n * n)} matrices: {null} in the null cone, {singular} singular, "
          f"{mismatch} mismatches, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
