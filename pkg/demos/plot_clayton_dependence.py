"""
Dependence in the Clayton-type copula
=====================================

How the asymmetry parameter nu shapes the pair density, the correlation
and the tails, for a fixed underlying Gaussian correlation rho.
"""

# %%
# The density at a few points.  For nu = 2 the copula is reflection
# symmetric; other values of nu tilt the mass towards one corner.
import numpy as np

from claytonrf.copula import (
    blomqvist_beta,
    clayton_bipdf,
    clayton_corr,
    gauss_copula_bipdf,
    kendall_tau,
    tail_probe,
)

rho = 0.7
for nu in (1, 2, 5):
    low = clayton_bipdf(0.05, 0.05, nu, rho)
    high = clayton_bipdf(0.95, 0.95, nu, rho)
    print(f"nu={nu}: c(0.05,0.05)={low:.3f}  c(0.95,0.95)={high:.3f}")
print(f"gaussian: c(0.05,0.05)={gauss_copula_bipdf(0.05, 0.05, rho):.3f}")

# %%
# Correlation, medial correlation and Kendall's tau grow with nu.
for nu in (0.5, 1, 2, 4, 8):
    print(f"nu={nu:>3}: corr={clayton_corr(nu, rho):.4f}  "
          f"blomqvist={blomqvist_beta(nu, rho):.4f}  tau={kendall_tau(nu, rho):.4f}")

# %%
# Finite-t tail ratios F(t,t)/t and the upper analogue.  These only hint at
# the limiting behaviour; no limit is claimed.
for nu in (1, 5):
    probe = tail_probe(nu, 0.9)
    print(f"nu={nu}")
    for t, lo, up in zip(probe["t"], probe["lower"], probe["upper"]):
        print(f"  t={t:.0e}  lower={lo:.4f}  upper={up:.4f}")

# %%
# A density grid like the one behind a contour plot.
axis = (np.arange(9) + 0.5) / 9
uu, vv = np.meshgrid(axis, axis, indexing="ij")
grid = clayton_bipdf(uu.ravel(), vv.ravel(), 1, rho).reshape(uu.shape)
np.set_printoptions(precision=2, suppress=True)
print(grid)
