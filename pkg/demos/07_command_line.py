# %% [markdown]
# # The command line
#
# The ``cgn`` entry point wraps the same functions. ``main`` can also be
# called in-process, which is what this script does.

# %%
import io
import json
import os
import tempfile

from cgn.cli import main


def cgn(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    print(f"$ cgn {' '.join(argv)}   [exit {code}]")
    print(buf.getvalue())
    return buf.getvalue()


# %%
cgn("demo", "--list")
cgn("scalar", "--lipschitz", "K=1", "--xi", "0.25")

# %% [markdown]
# Write a problem file, certify it and solve it with a CSV trace.

# %%
doc = json.loads(cgn("demo", "sqrt2"))
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "sqrt2.json")
    with open(path, "w") as fh:
        json.dump(doc, fh)
    cert = json.loads(cgn("certify", path))
    print("valid:", cert["valid"], "t*:", cert["t_star"])
    cgn("solve", path, "--verify", "--trace", os.path.join(tmp, "trace.csv"))
    with open(os.path.join(tmp, "trace.csv")) as fh:
        print(fh.read())

# %% [markdown]
# Exit codes: 1 when the certificate fails, 2 for invalid input, 4 when the
# iteration hits max_iter.

# %%
cgn("certify", "--demo", "inequality")
cgn("scalar", "--lipschitz", "1", "--xi", "0.7")
cgn("solve", "--demo", "infeasible")
