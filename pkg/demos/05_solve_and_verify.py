# %% [markdown]
# # Running the iteration and checking the majorization
#
# ``run`` performs the Gauss-Newton iteration ``x_{k+1} = x_k + d_k``.
# ``verify_majorization`` then compares the step lengths with the increments
# of the certified scalar sequence.

# %%
import numpy as np

from cgn import certify, run, trace_csv, verify_majorization
from cgn.catalog import get_demo

# %%
spec = get_demo("sqrt2")
report = run(spec.problem)
print(report.summary())
print("x_final - sqrt(2) =", report.x_final[0] - np.sqrt(2.0))
print("step norms:", report.step_norms())
print("ratios:", report.step_ratios())

# %%
cert = certify(spec.problem, spec.regularity, spec.majorant, xi=spec.xi)
check = verify_majorization(report, cert)
print(check.summary())
print("t_k:", np.round(check.t, 12))

# %% [markdown]
# The whole trace as CSV, one row per iterate.

# %%
print(trace_csv(report, check))

# %% [markdown]
# ## Linear convergence at a degenerate solution
#
# ``max(|0.5 - x + 0.5 x^2|)`` has a double root at ``x = 1``. The iteration
# still converges but each step is about half the previous one.

# %%
b = get_demo("boundary")
rb = run(b.problem)
print(rb.summary())
print(np.round(rb.step_ratios(), 4))

# %% [markdown]
# ## An infeasible problem
#
# ``|x^2 + 1|`` never reaches 0. With an unbounded trust region each step is
# the Newton step for ``x^2 + 1``, which jumps around without settling, and
# the run stops at ``max_iter``.

# %%
inf = get_demo("infeasible")
print(run(inf.problem, max_iter=inf.max_iter).summary())
