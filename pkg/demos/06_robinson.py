# %% [markdown]
# # Robinson's condition and the convex process norm
#
# When ``C`` is a polyhedral cone ``{z : G z <= 0}``, regularity can be
# obtained from the linear map ``d -> F'(x0) d - C``. Its inverse norm
# ``beta0`` is computed exactly by solving one LP per vertex of the unit
# cube in ``R^m``.

# %%
import numpy as np

from cgn import certify, check_regular_point, estimate_convex_process_inverse_norm, robinson_radius
from cgn.catalog import get_demo

# %%
spec = get_demo("orthant")
p = spec.problem
Fx0, J0 = p.F.evaluate(p.x0)
print("F(x0) =", Fx0)
print("J0 =\n", J0)

est = estimate_convex_process_inverse_norm(J0, p.h.cone_G)
print("beta0 =", est.value, "over", est.n_vertices, "vertices,", est.status)

# %% [markdown]
# A regular point in the stronger sense: every direction of ``R^m`` can be
# written as ``J0 d - c`` with ``c`` in ``C``.

# %%
V, R = spec.regularity.vrep
print("regular point:", check_regular_point(J0, V, R))

# %% [markdown]
# Certify with eta = 1, where the alpha bound equals beta0, and compare the
# radius where the Robinson bound stays quasi-regular.

# %%
cert = certify(p, spec.regularity, spec.majorant, eta=1.0)
print(cert.theorem, cert.valid, "alpha =", cert.alpha, "t* =", cert.t_star, "radius =", cert.radius)
print(cert.notes)

# %% [markdown]
# A non-onto example: ``J0 = [1, 1]^T`` maps one direction onto a line, so
# ``J0 d - C`` misses part of ``R^2`` when C is the origin.

# %%
print(estimate_convex_process_inverse_norm(np.array([[1.0], [1.0]]), np.vstack([np.eye(2), -np.eye(2)])).status)
