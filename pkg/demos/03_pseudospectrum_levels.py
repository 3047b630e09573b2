"""Pseudospectral level sets of sigma_min(P(z)) and what they mean for
the distances computed in the other demos."""
import numpy as np

from polydist import Region, contour_extract, grid_sigma_min, random_polynomial, tau_r
from polydist.optimizer import make_rng

P = random_polynomial(4, 1, make_rng(5))
lam = P.eigenvalues()
pad = 1.0
reg = Region(lam.real.min() - pad, lam.real.max() + pad, lam.imag.min() - pad, lam.imag.max() + pad, 80, 80)
grid = grid_sigma_min(P, reg)

for eps in (0.05, 0.2, 0.5):
    lines = contour_extract(grid, eps)
    frac = np.mean(grid.values <= eps)
    print(f"eps={eps:<5g} {len(lines):2d} polylines, {100 * frac:5.1f}% of the grid inside")

# a point at level eps can be made an eigenvalue at cost exactly eps
z = complex(reg.xmin + 0.5, 0.0)
print(f"\ntau_1({{{z:.3g}}}) = {tau_r(P, [z], 1).tau:.6g}")
