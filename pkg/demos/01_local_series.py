"""Local Frobenius solutions of the general and confluent Heun equations."""
# %%
import cmath

import numpy as np

from heun import ConfluentParams, HeunParams, classify_singularities, eval_series, local_basis, local_solution
from heun.oracles import gauss_2f1, ode_residual

# %% Singular points and their exponents
p = HeunParams(a=2.5, q=0.4 + 0.1j, alpha=1.2, beta=-0.3 + 0.2j, gamma=0.45, epsilon=0.3)
for info in classify_singularities(p):
    print(info.location, info.kind, info.exponents)
print("delta from the Fuchs relation:", p.delta)

# %% Both branches at every finite singular point satisfy the ODE
for point in ("0", "1", "a"):
    for sol in local_basis(p, point):
        z = sol.expansion_point + 0.6 * sol.radius * cmath.exp(0.8j)
        r = eval_series(sol, z)
        res = ode_residual(p, z, r.value, r.derivative, r.second_derivative)
        print(f"point {point} exponent {sol.exponent:.3f}: {r.n_terms_used:3d} terms, "
              f"error bound {r.est_error:.1e}, residual {res:.1e}")

# %% With epsilon = 0 and q = a*alpha*beta the equation is Gauss's
al, be, ga = 0.7 - 0.2j, 1.3, 0.9 + 0.1j
g = HeunParams(2.0, 2.0 * al * be, al, be, ga, 0)
for z in (0.2, 0.3j, -0.4 + 0.2j):
    h = eval_series(local_solution(g), z).value
    print(z, h, abs(h - gauss_2f1(al, be, ga, z)))

# %% Confluent equation: a constant solution when mu = nu = 0
c = ConfluentParams(alpha=0.7, beta=0.2, gamma=-0.4, mu=0, nu=0)
print(np.count_nonzero(local_solution(c).coeffs[1:]), "nonzero coefficients beyond c_0")
