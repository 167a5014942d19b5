"""Critical speeds against their analytic bounds.

For the matched reaction f(u) = u^{q'-1}(1-u) the two slope constants
coincide (L0 = L+ = 1).  The script prints, for a small (p, q) grid, the
lower bound, the piecewise upper bound c+ with its case, the subsolution
refinement of c+ and the critical speed found by backward shooting.

Run:  python demos/speed_bounds.py
"""

from pqfronts import OperatorSpec, ReactionSpec, critical_speed, numeric_cplus, speed_bounds


def main():
    print(f"{'p':>3} {'q':>3}  {'lower':>9}  {'c+':>9} {'case':>8}  {'refined':>9}  {'c*':>9}")
    for p, q in [(2, 2), (3, 2), (4, 2), (5, 2), (3, 3), (4, 3), (5, 3)]:
        op = OperatorSpec(p, q)
        r = ReactionSpec.matched(op.q_conj)
        b = speed_bounds(op, r)
        res = critical_speed(op, r, bounds=b)
        print(f"{p:3d} {q:3d}  {b.lower:9.5f}  {b.upper_analytic:9.5f} {b.upper_case:>8}"
              f"  {b.upper_numeric:9.5f}  {res.c_star:9.5f}")

    # L+ = 6 sits in the middle case of c+; the subsolution search improves it
    op = OperatorSpec(4, 3)
    print("\np=4, q=3, L+=6:  refined c+ =", round(numeric_cplus(op, 6.0), 6),
          " analytic c+ =", speed_bounds(op, ReactionSpec.matched(1.5, a=6.0)).upper_analytic)


if __name__ == "__main__":
    main()
