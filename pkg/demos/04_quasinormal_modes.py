"""Regge-Wheeler quasinormal modes from the confluent Heun matching determinant."""
# %%
import numpy as np

from heun import RWProblem, find_modes, matching_determinant, rw_to_confluent
from heun.oracles import contour_winding, leaver_qnm

prob = RWProblem(M=1, ell=2, s=2)
region = (0.25 - 0.35j, 0.45 - 0.03j)

# %% The map to the confluent equation
params, tr = rw_to_confluent(prob, 0.37 - 0.09j)
print(params)

# %% Scan, polish, compare with the continued fraction
diag = {}
modes = find_modes(prob, region, diagnostics=diag)
for m in modes:
    ref = leaver_qnm(prob.M, prob.ell, prob.s, m.overtone_hint)
    print(f"n={m.overtone_hint}  {m.omega:.12f}  |D|={m.residual:.1e}  vs continued fraction {abs(m.omega - ref):.1e}")
scan = diag["scan"]
print("grid minimum of |D|:", np.min(scan.absD))

# %% Argument principle on the same rectangle
print("zeros inside:", contour_winding(lambda w: matching_determinant(prob, w), *region))

# %% A partly reflecting surface at r = 3M
for rho in (0.01, 0.05, 0.1):
    moved = find_modes(RWProblem(M=1, ell=2, s=2, rho=rho, r_surface=3.0), region)
    print(rho, [f"{m.omega:.6f}" for m in moved])
