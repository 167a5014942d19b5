"""The problem on [0, H] is the problem on [0, 1] in disguise.

With v = u/H, y(u) solves y' = c R(y) - f(u) exactly when w(v) = y(Hv)
solves w' = Hc R(w) - g(v) with g(v) = H f(Hv).  For the pure q-Laplacian
this means the critical speed on [0, H] is given by the same formula with
L = sup f(u)/u^{q'-1}; for the (p, q) operator it is not, because the
p-term is no longer negligible once y is large.

Run:  python demos/rescaling.py
"""

import math

import numpy as np

from pqfronts import (OperatorSpec, ReactionSpec, critical_speed, integrate_backward,
                      rescale_to_unit, speed_bounds)


def main():
    H = 7.0
    r = ReactionSpec.power_logistic(1.0, 1.0, H)
    g = rescale_to_unit(r)
    for op in (OperatorSpec(2, 2, "single_q"), OperatorSpec(4, 2)):
        c = 2 * math.sqrt(H)
        y = integrate_backward(op, r, c)
        w = integrate_backward(op, g, H * c)
        gap = np.max(np.abs(w.y - y.y))
        res = critical_speed(op, r)
        print(f"{op.mode.value:>11} p={op.p:g} q={op.q:g}: max|w - y| = {gap:.2e}, "
              f"lower bound {speed_bounds(op, r).lower:.4f}, c* = {res.c_star:.4f}, "
              f"max y at 2 sqrt 7 = {y.max_y:.3g}")


if __name__ == "__main__":
    main()
