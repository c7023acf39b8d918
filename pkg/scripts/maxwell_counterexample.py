"""Standing-wave check of the unit-constant forced Maxwell bound.

With E0 = (0, sin x1, 0), B0 = 0 and no forcing the magnetic field grows to
|B| = |E0| sin(t), so sup|E| + sup|B| reaches |E0| (1 + sin 1) at T = 1 while
the energy sqrt(|E|^2 + |B|^2) stays at |E0|.
"""

import math

from twofluid.probes import MaxwellSample, maxwell_corpus, probe_maxwell_bound
from twofluid.scenarios import plane_wave
from twofluid.spectral import Grid, SpectralField


def main():
    grid = Grid(2, 16)
    E, _ = plane_wave(grid)
    z = SpectralField.zeros(grid)
    sample = [MaxwellSample(E, z, z)]
    print(f"standing wave: literal ratio {probe_maxwell_bound(sample).max_ratio:.6f} "
          f"(1 + sin 1 = {1 + math.sin(1):.6f}), "
          f"energy-form ratio {probe_maxwell_bound(sample, energy_form=True).max_ratio:.6f}")
    corpus = maxwell_corpus(Grid(2, 32), 20, seed=0)
    lit = probe_maxwell_bound(corpus)
    en = probe_maxwell_bound(corpus, energy_form=True)
    print(f"random corpus (20): literal max {lit.max_ratio:.4f}, energy-form max {en.max_ratio:.4f}")


if __name__ == "__main__":
    main()
