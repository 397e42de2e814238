"""Continuing solutions around singular points and reading off monodromy."""
# %%
import cmath
import math

import numpy as np

from heun import ContinuationPath, HeunParams, StatePair, circle_loop, continue_along_path, default_path, local_basis, monodromy_matrix

p = HeunParams(a=3, q=0.4 + 0.1j, alpha=1.2, beta=-0.3 + 0.2j, gamma=0.45, epsilon=0.3 - 0.1j)

# %% The default path detours above singular points; the branch reached depends on it
path = default_path(p, -0.5, 2.0)
print(np.round(path.waypoints, 3))
start = StatePair(-0.5, 1.0, 0.0)
above = continue_along_path(p, start, path)
below = continue_along_path(p, start, default_path(p, -0.5, -0.5 - 0.4j)
                            .then(default_path(p, -0.5 - 0.4j, 2.0 - 0.4j))
                            .then(default_path(p, 2.0 - 0.4j, 2.0)))
print("above:", above.h, " below:", below.h)

# %% Monodromy around each finite singular point
for point, centre in (("0", 0), ("1", 1), ("a", p.a)):
    basis = local_basis(p, point)
    diag = {}
    M = monodromy_matrix(p, basis, circle_loop(p, centre, 0.5 * basis[0].radius), diagnostics=diag)
    ev = np.linalg.eigvals(M)
    print(point, np.round(ev, 10), "Abel check", f"{diag['abel_residual']:.1e}")
print("expected at 0:", cmath.exp(2j * math.pi * (1 - p.gamma)))

# %% Going round 0 and then 1 composes right to left
basis = local_basis(p, "0")
l0 = circle_loop(p, 0, 0.5)

l1 = ContinuationPath((0.5, 1 - 0.5j, 1.5, 1 + 0.5j, 0.5), 0.1, p)
m0, m1 = monodromy_matrix(p, basis, l0), monodromy_matrix(p, basis, l1)
print(np.max(np.abs(monodromy_matrix(p, basis, l0.then(l1)) - m1 @ m0)))
