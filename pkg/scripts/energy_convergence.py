"""Time-step sweep of the truncated inviscid energy identity.

Prints the relative energy drift at t = T for each dt and the least-squares
log-log slope. Usage: python3 scripts/energy_convergence.py [--N 32] [--T 1]
"""

import argparse
import math

import numpy as np

from twofluid.diagnostics import energy_summands
from twofluid.dynamics import TRUNCATED, Formulation, NsmState, PhysicalParams
from twofluid.integrator import StepperConfig, run
from twofluid.spectral import Grid, random_field


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=32)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--rms", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--dts", type=float, nargs="+", default=[4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4])
    args = ap.parse_args()

    grid = Grid(2, args.N)
    rng = np.random.default_rng(args.seed)
    fields = []
    for _ in range(4):
        f = random_field(grid, rng, k_band=8)
        fields.append((args.rms * math.sqrt(grid.volume) / f.norm()) * f)
    s0 = NsmState(0.0, *fields)
    p = PhysicalParams(nu_minus=0.0, nu_plus=0.0, alpha=0.0)
    form = Formulation(TRUNCATED, grid.N / 3)
    e0 = sum(energy_summands(s0, p))
    residuals = []
    print(f"{'dt':>10} {'residual':>12} {'local slope':>12}")
    for dt in args.dts:
        s1 = run(s0, p, form, StepperConfig(dt, args.T)).final_state
        r = abs(sum(energy_summands(s1, p)) - e0) / e0
        local = "" if not residuals else f"{math.log(residuals[-1] / r) / math.log(2):12.2f}"
        residuals.append(r)
        print(f"{dt:10.2e} {r:12.3e} {local}")
    slope = np.polyfit(np.log(args.dts), np.log(residuals), 1)[0]
    print(f"least-squares slope {slope:.3f}")


if __name__ == "__main__":
    main()
