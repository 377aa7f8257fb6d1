"""
Sweeping the melting latent heat
================================

The sweep below reuses the manufactured problem and solves it for several
values of l_m.  Over this range the boiling front speeds up steadily while
the melting front first slows and then picks up again.
"""
import numpy as np

from stefansim.exceptions import NoRootError
from stefansim.manufactured import manufactured_spec
from stefansim.solver import SolveOptions, solve

base = manufactured_spec()
opts = SolveOptions(beta_range=(0.2, 5.0), bracket_grid=16, n=257)

print(f"{'l_m':>8} {'alpha0':>10} {'beta0':>10} {'epsilon':>8}")
for l_m in np.geomspace(0.1, 8.0, 7):
    try:
        sol = solve(base.replace(l_m=float(l_m)), opts)
    except NoRootError:
        print(f"{l_m:8.3f} {'no root in scan range':>30}")
        continue
    print(f"{l_m:8.3f} {sol.alpha0:10.6f} {sol.beta0:10.6f} {sol.certificate.epsilon:8.3g}")
