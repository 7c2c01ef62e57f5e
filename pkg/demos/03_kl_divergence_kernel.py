# %% [markdown]
# # Classifying distributions with an exponentiated KL divergence
#
# Each sample here is a univariate Gaussian. KL divergence is a natural
# dissimilarity between distributions but it is not symmetric, and neither
# is the kernel `exp(-a * KL(P || Q))` built from it. The two-view model uses
# the kernel as is; the classical LS-SVM needs `(K + K^T) / 2` first.

# %%
import numpy as np

from askls import KernelSpec, PrecomputedMatrix, accuracy, fit, fit_lssvm, kl_exp_kernel, symmetrize
from askls.data import split
from askls.synthetic import gaussian_kl_problem

ds, divergences = gaussian_kl_problem(n_per_class=40, seed=2)
K = kl_exp_kernel(divergences.values, a=1.0, row_ids=divergences.row_ids,
                  col_ids=divergences.col_ids)
print("unit diagonal:", np.allclose(np.diag(K.values), 1.0))
print("largest |K - K^T|: %.3f" % np.abs(K.values - K.values.T).max())

# %% [markdown]
# Transductive evaluation: the kernel matrix covers every sample, training
# uses the train-by-train block and prediction reads the test rows (source
# view) and test columns (target view).

# %%
asym = KernelSpec.precomputed(PrecomputedMatrix(K.row_ids, K.values))
sym = KernelSpec.precomputed(PrecomputedMatrix(K.row_ids, symmetrize(K).values))
results = {"AsK-LS on K": [], "LS-SVM on (K+K^T)/2": []}
for seed in range(10):
    train, test = split(ds, 0.6, seed)
    y_tr = np.where(train.labels == 1, 1, -1)
    y_te = np.where(test.labels == 1, 1, -1)
    results["AsK-LS on K"].append(
        accuracy(fit(train.samples, y_tr, asym, 10.0).predict(test.samples), y_te))
    results["LS-SVM on (K+K^T)/2"].append(
        accuracy(fit_lssvm(train.samples, y_tr, sym, 10.0).predict(test.samples), y_te))
for name, acc in results.items():
    print(f"{name:<22} {np.mean(acc):.3f} ± {np.std(acc):.3f}")

# %% [markdown]
# Both models do well here, and the symmetrized one is marginally better:
# the classes differ in variance, which the symmetric part of the divergence
# already exposes. Keeping the kernel asymmetric pays off when the direction
# itself is the signal, as in `04_direction_graph.py`.
