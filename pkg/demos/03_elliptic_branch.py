# %% [markdown]
# The bounded Weierstrass-type branch
# ===================================
#
# The curve relation (p')^2 = F(p) with three real roots e1 > e2 > e3 has a
# bounded real solution oscillating in [e3, e2]; it is pole-free for all real
# y, which makes it the right branch to integrate numerically.  Exact curve
# points (with a formal square root) cover the rest of the verification
# needs, so no pole handling is ever required.

# %%
import numpy as np

from laxchain import SpectralCurve, exact_wp_jet, wp_init_bounded, wp_trajectory
from fractions import Fraction

curve = SpectralCurve.elliptic(0.0, -1.0, 0.0)  # z^3 - z: roots 1, 0, -1
branch = wp_init_bounded(curve)
e1, e2, e3 = branch.roots
print(f"roots: e1 = {e1:.6f}, e2 = {e2:.6f}, e3 = {e3:.6f}")
print(f"start: wp(0) = {branch.wp}, wp'(0) = {branch.wp_prime}")

# %%
ys, wps, wpps, drift = wp_trajectory(branch, 20.0, 1e-3)
print(f"range of wp over y in [0, 20]: [{wps.min():.9f}, {wps.max():.9f}]")
print(f"confined to [e3, e2] up to {max(e3 - wps.min(), wps.max() - e2):.2e}")
print(f"max |energy drift|: {np.max(np.abs(drift)):.3e}")

# %% [markdown]
# Turning points: wp' crosses zero exactly where wp touches a root.

# %%
crossings = np.where(np.diff(np.sign(wpps)) != 0)[0]
print("first few turning points:")
for i in crossings[:4]:
    print(f"  y = {ys[i]:.3f}  wp = {wps[i]:+.9f}")

# %% [markdown]
# On the exact side a curve point carries a formal square root w with
# w^2 = F(z0); the whole y-jet is induced by the ODE, so the energy and its
# derivative vanish identically, not approximately.

# %%
jet = exact_wp_jet(SpectralCurve.elliptic(0, 0, 0), Fraction(2), order=3)
print("exact jet at z0 = 2 on w^2 = z^3:", jet)
dwp = jet.derivative()
energy = dwp * dwp - SpectralCurve.elliptic(0, 0, 0).eval(jet.truncate(2))
print("(wp')^2 - F(wp) as a jet:", energy, "-> zero:", energy == 0)
