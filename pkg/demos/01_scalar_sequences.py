# %% [markdown]
# # Scalar majorizing sequences
#
# Every convergence certificate reduces to a one-dimensional Newton iteration
# on ``f(t) = xi + (alpha - 1) t + alpha * phi(t)`` started at ``t = 0``.
# Its limit ``t*`` bounds how far the vector iterates can travel.

# %%
import numpy as np

from cgn import AuxiliaryFunction, Lipschitz, Smale, custom_from_catalog, h3_condition, scalar_sequence

# %% [markdown]
# Lipschitz majorant ``phi(t) = K t^2 / 2 - t`` with K = 1, alpha = 1 and
# xi = 1/4. The closed form gives t* = 1 - sqrt(1/2).

# %%
aux = AuxiliaryFunction(0.25, 1.0, Lipschitz(1.0))
trace = scalar_sequence(aux, tol=1e-15)
print("t* =", trace.t_star, " closed form:", 1 - np.sqrt(0.5))
for k, (t, e) in enumerate(zip(trace.t, trace.errors())):
    print(f"{k:2d}  t_k={t:.16f}  t*-t_k={e:.3e}")

# %% [markdown]
# The error roughly squares at each step. The ratio ``e_{k+1} / e_k^2`` settles
# near the rate constant stored on the trace.

# %%
err = np.array(trace.errors())
print("e_{k+1}/e_k^2:", err[1:-1] / err[:-2] ** 2)
print("rate constant:", trace.q_quadratic_constant)

# %% [markdown]
# ## When the hypothesis fails
#
# For the Lipschitz model the smallest zero exists iff ``2 alpha K xi <= 1``.
# At equality the zero is double, and the sequence still converges, but only
# linearly with ratio 1/2.

# %%
for xi in (0.25, 0.5, 0.6):
    a = AuxiliaryFunction(xi, 1.0, Lipschitz(1.0))
    lhs, rhs, ok = h3_condition(a)
    print(f"xi={xi}: 2*alpha*K*xi={lhs:.3f} <= {rhs}: {ok}", "h4:", a.zero.h4 if ok else None)

tangent = scalar_sequence(AuxiliaryFunction(0.5, 1.0, Lipschitz(1.0)), tol=1e-10)
print("ratios at the tangent case:", np.round(tangent.ratios()[:8], 4))

# %% [markdown]
# ## Smale and tabulated majorants

# %%
smale = scalar_sequence(AuxiliaryFunction(0.05, 1.0, Smale(1.0)))
print("Smale gamma=1, xi=0.05: t* =", smale.t_star, "after", len(smale.t) - 1, "steps")

cubic = custom_from_catalog("cubic", 2.0, K=1.0)
print("custom cubic:", scalar_sequence(AuxiliaryFunction(0.1, 1.0, cubic)).t_star)
