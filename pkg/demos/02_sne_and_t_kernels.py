# %% [markdown]
# # Direction-dependent similarities: SNE and Student-t kernels
#
# Both kernels divide a similarity profile by its sum over the training set,
# taken from the point of view of the first argument. Every row of the Gram
# matrix then sums to one, and `K(x, z)` generally differs from `K(z, x)`:
# a point in a sparse region spreads its mass over far neighbours, while a
# point in a dense cluster concentrates it.

# %%
import numpy as np

from askls import KernelSpec, accuracy, fit, sne_gram, t_gram
from askls.data import split, standardize
from askls.synthetic import blobs

# one tight and one diffuse cluster, so density differs between the classes
ds = blobs(n_per_class=40, centers=((0.0, 0.0), (2.5, 0.0)), scale=0.6, seed=1)
X = ds.samples
S = sne_gram(X, X, X, sigma=1.0)
T = t_gram(X, X, X)
print("SNE row sums in [%.15f, %.15f]" % (S.sum(1).min(), S.sum(1).max()))
print("T   row sums in [%.15f, %.15f]" % (T.sum(1).min(), T.sum(1).max()))
print("largest |K - K^T|: SNE %.3g, T %.3g" % (np.abs(S - S.T).max(), np.abs(T - T.T).max()))

# %% [markdown]
# Fit the two-view model with each kernel on a 60/40 split. The reference set
# used for normalization is frozen to the training samples inside the model,
# so a test point is always normalized against the same set.

# %%
train, test = split(ds, 0.6, seed=0)
train, test, _ = standardize(train, test)
y_train = np.where(train.labels == 1, 1, -1)
y_test = np.where(test.labels == 1, 1, -1)
for spec in (KernelSpec.sne(1.0), KernelSpec.t()):
    model = fit(train.samples, y_train, spec, gamma=50.0)
    sc = model.decision_scores(test.samples)
    print(f"{spec.family.value:>3}: test accuracy {accuracy(model.predict(test.samples), y_test):.3f}, "
          f"mean |f_s - f_t| = {np.mean(np.abs(sc.f_s - sc.f_t)):.3g}")
