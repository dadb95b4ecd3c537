# %% [markdown]
# # The linearized subproblem
#
# At ``x`` the iteration minimizes ``h(F(x) + J d)`` over ``||d|| <= Delta``
# and then picks a minimum-norm minimizer. When the linearization can reach
# the sublevel set ``C`` this is the same as the distance from 0 to
# ``D(x) = {d : F(x) + J d in C}``.

# %%
import numpy as np

from cgn import L1Deviation, MaxAffine, distance_to_C, solve_linearized
from cgn.subproblem import linearized_distance_to_C

# %%
h = MaxAffine([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], [0.0, 0.0, 0.0])  # max(z1, z2, -z1-z2)
print("h_min =", h.h_min)
Fx = np.array([0.7, -0.1])
J = np.array([[1.0, 0.5], [0.0, 2.0]])

step = solve_linearized(h, Fx, J)
print("d =", step.d, " ||d|| =", step.dist, " value =", step.subproblem_value, " in C:", step.in_C)
print("distance to D:", linearized_distance_to_C(h, Fx, J))

# %% [markdown]
# A trust region smaller than the distance to ``D`` leaves ``C`` out of reach;
# the step then only decreases ``h``.

# %%
small = solve_linearized(h, Fx, J, delta=0.05)
print(small.d, small.subproblem_value, small.in_C)

# %% [markdown]
# For an l1 deviation the set ``C`` is a point and ``d(F(x), C)`` is the
# infinity-norm distance to it.

# %%
print(distance_to_C(L1Deviation([1.0, 2.0]), np.array([1.5, 1.0])))
