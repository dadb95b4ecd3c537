# %% [markdown]
# # Convergence certificates
#
# ``certify`` evaluates the hypotheses of the semi-local convergence result at
# ``x0``: a regularity bound ``beta``, a majorant for ``F'`` and the constants
# ``eta``, ``Delta``, ``xi`` and ``alpha``. Each check is recorded with its two
# sides, so a failing certificate explains itself.

# %%
import numpy as np

from cgn import Lipschitz, QuasiRegular, RegularPoint, certify
from cgn.catalog import get_demo

# %% [markdown]
# The square-root problem ``|x^2 - 2| -> min`` from ``x0 = 1.5``. Here
# ``F'`` is 2-Lipschitz and the pseudo-inverse bound is 1/2 on a ball of
# radius 1/2.

# %%
spec = get_demo("sqrt2")
cert = certify(spec.problem, spec.regularity, spec.majorant, xi=spec.xi)
print(cert.theorem, "valid:", cert.valid, "rate:", cert.rate)
print("alpha =", cert.alpha, "(= 4/9)", " t* =", cert.t_star)
for c in cert.checks:
    print(f"  {c.condition:<24} {c.lhs!s:>22} vs {c.rhs!s:<22} {'ok' if c.holds else 'FAILS'}")

# %% [markdown]
# Predicted error bounds ``t* - t_k`` for the vector iterates:

# %%
print(np.array(cert.predicted_error))

# %% [markdown]
# A step function for ``beta`` (quasi-regular data) gives a certificate of the
# same shape. Doubling beta beyond ``t = 0.1`` makes alpha larger and t* moves
# out.

# %%
qr = QuasiRegular(0.5, breakpoints=[0.0, 0.1], values=[0.5, 1.0])
print(certify(spec.problem, qr, spec.majorant, xi=spec.xi).to_dict()["t_star"])

# %% [markdown]
# A failing case: an xi too large for the Lipschitz constant.

# %%
bad = certify(spec.problem, RegularPoint(0.5, 0.5), Lipschitz(20.0, 0.5), xi=0.125)
print("valid:", bad.valid, "failed:", [c.condition for c in bad.failed()])
