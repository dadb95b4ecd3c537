# %% [markdown]
# # The bundled LP solver
#
# All subproblems are linear programs, solved by a bounded-variable dense
# simplex method with a two-phase start and Bland's rule as an anti-cycling
# fallback.

# %%
import numpy as np

from cgn import LPStatus, make_lp, solve_lp

# %% [markdown]
# A small LP: maximize ``x + 2y`` over a triangle.

# %%
lp = make_lp([-1.0, -2.0], A_ub=[[1.0, 1.0], [-1.0, 2.0]], b_ub=[4.0, 2.0], lb=[0.0, 0.0])
sol = solve_lp(lp)
print(sol.status.value, sol.x, -sol.value)

# %% [markdown]
# Beale's example cycles under Dantzig's rule without a safeguard. With the
# default fallback the solver reaches the optimum -5/4.

# %%
beale = make_lp(
    [-0.75, 20.0, -0.5, 6.0],
    A_ub=[[0.25, -8.0, -1.0, 9.0], [0.5, -12.0, -0.5, 3.0], [0.0, 0.0, 1.0, 0.0]],
    b_ub=[0.0, 0.0, 1.0],
)
res = solve_lp(beale)
print(res.status.value, res.value, "iterations:", res.iterations)

# %% [markdown]
# Infeasible and unbounded programs are reported through the status, not
# exceptions.

# %%
print(solve_lp(make_lp([1.0], A_ub=[[1.0]], b_ub=[-1.0], lb=[0.0])).status)
print(solve_lp(make_lp([-1.0, 0.0], A_ub=[[1.0, -1.0]], b_ub=[1.0])).status is LPStatus.UNBOUNDED)
