"""
When does the contraction certificate apply?
============================================

For temperature-dependent coefficients the fixed-point maps V (liquid) and W
(solid) are contractions when epsilon < 1 and sigma < 1.  Both factors grow
with the Lipschitz constants of the coefficients.  This demo perturbs the
manufactured problem by an affine temperature dependence and looks at both.
"""
import numpy as np

from stefansim import certificates as C
from stefansim.manufactured import manufactured_spec
from stefansim.solver import SolveOptions, solve

opts = SolveOptions(interface="printed", beta_range=(0.5, 2.0), bracket_grid=12)
sol = solve(manufactured_spec(slope=0.01, interface="printed"), opts)
env = sol.envelopes
print(f"1% affine family: alpha0 = {sol.alpha0:.6f}, beta0 = {sol.beta0:.6f}")
print(f"fitted Lipschitz constants: Lt1 = {env.Lt1:.3g}, Nt1 = {env.Nt1:.3g}, "
      f"Lt2 = {env.Lt2:.3g}, Nt2 = {env.Nt2:.3g}")

###############################################################################
# Liquid factor
# -------------
# epsilon(alpha0, beta0) increases in alpha0 and crosses 1 once.

at = C.alpha_tilde(env, sol.beta0)
print(f"epsilon at the solution = {sol.certificate.epsilon:.4f}; "
      f"epsilon = 1 at alpha0 = {at:.4f}")
print(f"observed liquid contraction ratios: {np.round(sol.diagnostics['ratios_liquid'], 4)}")

###############################################################################
# Solid factor
# ------------
# sigma stays far above 1 for this family, even though the observed ratios
# of W are tiny.  The certificate is sufficient, not necessary.

betas = np.geomspace(1e-3, 10.0, 9)
for b in betas:
    print(f"  beta0 = {b:8.4f}  sigma = {C.sigma_certificate(env, sol.u_c, b):.3e}")

###############################################################################
# Shrinking the solid Lipschitz constants
# ---------------------------------------
# sigma is linear in Lt2 and Nt2 but U-shaped in beta0.  Shrinking the
# constants opens a window where sigma < 1; it widens as they shrink, and
# only for the smallest value does it reach the top of the range.

grid = np.geomspace(1e-3, 10.0, 64)
for t in (1e-9, 1e-10, 1e-11):
    tiny = env.replace(Lt2=t, Nt2=t)
    th = C.threshold_betas(tiny, sol.u_c, (1e-3, 10.0))
    below = grid[[C.sigma_certificate(tiny, sol.u_c, b) < 1 for b in grid]]
    print(f"Lt2 = Nt2 = {t:.0e}: beta_tilde = {th.beta_tilde:.4g}, "
          f"sigma < 1 on grid points {below.min():.3g} .. {below.max():.3g}")
