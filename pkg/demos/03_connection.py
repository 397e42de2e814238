"""Connection matrices between the local bases at 0 and 1."""
# %%
import cmath
import math

import numpy as np

from heun import ConfluentParams, HeunParams, abel_det_prediction, connection_matrix
from heun.oracles import kummer_connection

# %% Generic general Heun equation
p = HeunParams(a=2.5 + 0.5j, q=0.4, alpha=1.2, beta=-0.3, gamma=0.45, epsilon=0.3)
c01 = connection_matrix(p, "0", "1")
print(np.round(c01.matrix, 8))
print("det:", np.linalg.det(c01.matrix), "Abel:", abel_det_prediction(p, c01))
c10 = connection_matrix(p, "1", "0", path=c01.path.reversed())
print("round trip:", np.max(np.abs(c01.matrix @ c10.matrix - np.eye(2))))

# %% Gauss degeneration against the Gamma-function formula
a, b, c = 0.3, 0.45, 0.8
g = HeunParams(2.5, 2.5 * a * b, a, b, c, 0)
num = connection_matrix(g, "0", "1").matrix
# (z-1)**s here against (1-z)**s in the classical formula
ref = np.diag([1, cmath.exp(-1j * math.pi * (c - a - b))]) @ kummer_connection(a, b, c)
print("vs Gamma formula:", np.max(np.abs(num - ref)))

# %% Confluent equation, serialized with its path
cp = ConfluentParams(alpha=0.6 + 0.2j, beta=0.35, gamma=-0.45, mu=0.7, nu=-0.2 + 0.3j)
print(connection_matrix(cp, "0", "1").to_json()[:160], "...")
