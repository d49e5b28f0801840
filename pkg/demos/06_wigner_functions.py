"""
Wigner functions on a grid
==========================

Sample W(x, p) for a few states, check it integrates to one and that its
marginals are the position and momentum densities.
"""

import numpy as np

from qecw import wigner as wg
from qecw.bosonic import FockSpace

fs = FockSpace(40)
print("W_0(0,0) * pi =", wg.wigner_point(fs.fock(0), 0, 0) * np.pi)
print("W_1(0,0) * pi =", wg.wigner_point(fs.fock(1), 0, 0) * np.pi)

states = {
    "fock 2": fs.fock(2),
    "coherent 1+1j": fs.coherent(1 + 1j),
    "even cat 1.5": wg.cat_state(fs, 1.5, +1),
    "odd cat 1.5": wg.cat_state(fs, 1.5, -1),
}
for name, psi in states.items():
    grid = wg.wigner_grid(psi, nx=81, np_=81)
    m = wg.marginals(grid)
    err = np.max(np.abs(m.rho_x - wg.position_density(psi, m.x_values)))
    print(f"{name:>14s}: integral {grid.integral():.5f}, min W {grid.values.min():+.4f}, "
          f"marginal error {err:.1e}")

# Negative values near the origin are the signature of the cat interference.
grid = wg.wigner_grid(states["odd cat 1.5"], (-2, 2), (-2, 2), 5, 5)
print(grid.to_csv()[:200])
