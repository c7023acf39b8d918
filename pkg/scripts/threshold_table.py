"""Small-data constants and thresholds across a sweep of physical parameters.

Usage: python3 scripts/threshold_table.py [--c 1.0]
"""

import argparse
import itertools

from twofluid.dynamics import PhysicalParams
from twofluid.thresholds import compute_constants, smallness_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, default=1.0)
    args = ap.parse_args()
    print(f"{'nu':>6} {'alpha':>6} {'e':>6} {'lambda1':>9} {'lambda2':>9} {'C':>10} {'case':>6} {'threshold':>11}")
    for nu, alpha, e in itertools.product((0.1, 1.0, 4.0), (0.1, 1.0, 10.0), (0.0, 1.0)):
        p = PhysicalParams(nu_minus=nu, nu_plus=nu, alpha=alpha, e=e)
        lam1, lam2, C = compute_constants(p, args.c)
        case = "4C<1" if 4 * C < 1 else "4C>=1"
        print(f"{nu:6g} {alpha:6g} {e:6g} {lam1:9.4g} {lam2:9.4g} {C:10.4g} {case:>6} {smallness_threshold(C):11.4g}")


if __name__ == "__main__":
    main()
