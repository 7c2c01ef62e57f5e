# %% [markdown]
# # Command-line workflow
#
# `askls` wraps the library in five subcommands. This script drives them
# through `askls.cli.main` on a generated three-class CSV inside a temporary
# directory; the equivalent shell commands are printed alongside.

# %%
import io
import json
import tempfile
from pathlib import Path

from askls.cli import main
from askls.data import write_csv
from askls.synthetic import blobs

work = Path(tempfile.mkdtemp(prefix="askls-demo-"))
data = work / "three.csv"
write_csv(data, blobs(30, centers=((0, 0), (3, 0), (0, 3)), scale=1.0, seed=4))


def run(*args):
    print("$ askls", " ".join(map(str, args)))
    buf = io.StringIO()
    code = main([str(a) for a in args], out=buf)
    print(buf.getvalue().rstrip() or "(no stdout)", f"\n[exit {code}]\n")
    return buf.getvalue()


# %% [markdown]
# Pick gamma and sigma with 5-fold cross-validation, then train and predict.

# %%
run("cv", "--data", data, "--kernel", "sne", "--gamma", "1,10,100", "--sigma", "0.5,1,2",
    "--folds", 5)
report = json.loads(run("train", "--data", data, "--kernel", "sne", "--gamma", "1,10,100",
                        "--sigma", "0.5,1,2", "--folds", 5, "--out", work / "model.json"))
print("selected gamma", report["gamma"], "sigma", report["kernel"]["sigma"])
run("predict", "--model-file", work / "model.json", "--data", data, "--out", work / "pred.csv")

# %% [markdown]
# Repeated 60/40 trials print a mean ± std table and write CSV/text reports.

# %%
run("eval", "--data", data, "--kernel", "t", "--gamma", "10", "--trials", 5,
    "--out", work / "eval")
print(sorted(p.name for p in (work / "eval").iterdir()))

# %% [markdown]
# Errors are a single line with a category and a distinct exit code.

# %%
run("train", "--data", work / "missing.csv")
